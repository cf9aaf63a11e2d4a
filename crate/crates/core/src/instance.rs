//! Bipartite instances, node subsets, pareto payoffs and instance validation.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::payoff::PayoffFn;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// A node, identified by side and a zero-based index within that side.
///
/// Displayed one-based (`a1` is `NodeId::a(0)`), which is also the key used
/// in result documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub side: Side,
    pub index: usize,
}

impl NodeId {
    pub const fn a(index: usize) -> Self {
        NodeId { side: Side::A, index }
    }

    pub const fn b(index: usize) -> Self {
        NodeId { side: Side::B, index }
    }

    pub fn is_a(self) -> bool {
        self.side == Side::A
    }

    pub fn label(self) -> String {
        self.to_string()
    }

    /// Parses labels of the form `a3` / `b1`.
    pub fn parse_label(s: &str) -> Option<Self> {
        let (side, rest) = match s.as_bytes().first()? {
            b'a' => (Side::A, &s[1..]),
            b'b' => (Side::B, &s[1..]),
            _ => return None,
        };
        let n: usize = rest.parse().ok()?;
        (n >= 1).then(|| NodeId { side, index: n - 1 })
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.side {
            Side::A => 'a',
            Side::B => 'b',
        };
        write!(f, "{}{}", c, self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub weight: T,
    /// Payoff of the A endpoint as a function of its split.
    pub payoff_a: PayoffFn<T>,
    /// Payoff of the B endpoint as a function of its split.
    pub payoff_b: PayoffFn<T>,
}

impl<T: Scalar> Edge<T> {
    pub fn linear(a: usize, b: usize, weight: T) -> Self {
        Edge {
            a,
            b,
            weight,
            payoff_a: PayoffFn::identity(),
            payoff_b: PayoffFn::identity(),
        }
    }

    pub fn payoff(&self, side: Side) -> &PayoffFn<T> {
        match side {
            Side::A => &self.payoff_a,
            Side::B => &self.payoff_b,
        }
    }

    pub fn endpoint(&self, side: Side) -> NodeId {
        match side {
            Side::A => NodeId::a(self.a),
            Side::B => NodeId::b(self.b),
        }
    }

    pub fn label(&self) -> String {
        format!("({},{})", NodeId::a(self.a), NodeId::b(self.b))
    }
}

/// Bipartite network with weighted edges and a payoff function for each
/// (node, incident edge) pair. Edges are kept sorted by `(a, b)`.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    a_count: usize,
    b_count: usize,
    edges: Vec<Edge<T>>,
    /// `(b, edge index)` per A node, ascending in `b`.
    adj_a: Vec<Vec<(usize, usize)>>,
    /// `(a, edge index)` per B node, ascending in `a`.
    adj_b: Vec<Vec<(usize, usize)>>,
    lookup: HashMap<(usize, usize), usize>,
}

impl<T: Scalar> Instance<T> {
    /// Builds an instance, rejecting out-of-range endpoints and duplicate
    /// edges. Semantic checks (connectivity, weights, monotonicity) are done by
    /// [`Instance::validate`].
    pub fn new(a_count: usize, b_count: usize, mut edges: Vec<Edge<T>>) -> Result<Self> {
        if a_count == 0 || b_count == 0 {
            return Err(Error::Parse("both sides need at least one node".into()));
        }
        edges.sort_by_key(|e| (e.a, e.b));
        let mut lookup = HashMap::with_capacity(edges.len());
        let mut adj_a = vec![Vec::new(); a_count];
        let mut adj_b = vec![Vec::new(); b_count];
        for (k, e) in edges.iter().enumerate() {
            if e.a >= a_count || e.b >= b_count {
                return Err(Error::Parse(format!(
                    "edge ({}, {}) references a node outside a={a_count}, b={b_count}",
                    e.a, e.b
                )));
            }
            if lookup.insert((e.a, e.b), k).is_some() {
                return Err(Error::Parse(format!("duplicate edge {}", e.label())));
            }
            adj_a[e.a].push((e.b, k));
            adj_b[e.b].push((e.a, k));
        }
        for list in adj_b.iter_mut() {
            list.sort_unstable();
        }
        Ok(Instance {
            a_count,
            b_count,
            edges,
            adj_a,
            adj_b,
            lookup,
        })
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    pub fn node_count(&self) -> usize {
        self.a_count + self.b_count
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge<T> {
        &self.edges[k]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&(a, b)).copied()
    }

    /// `(neighbor index, edge index)` pairs, ascending in neighbor index.
    pub fn neighbors(&self, node: NodeId) -> &[(usize, usize)] {
        match node.side {
            Side::A => &self.adj_a[node.index],
            Side::B => &self.adj_b[node.index],
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.a_count)
            .map(NodeId::a)
            .chain((0..self.b_count).map(NodeId::b))
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.a_count, self.b_count)
    }

    pub fn full(&self) -> SubInstance<'_, T> {
        SubInstance {
            inst: self,
            nodes: self.all_nodes(),
        }
    }

    pub fn restrict(&self, nodes: NodeSet) -> SubInstance<'_, T> {
        debug_assert_eq!(nodes.a.len(), self.a_count);
        debug_assert_eq!(nodes.b.len(), self.b_count);
        SubInstance { inst: self, nodes }
    }

    /// Payoff `v_receiver(partner, partner_payoff)` on edge `k`: what the
    /// `receiver` side gets when the other endpoint is held at
    /// `partner_payoff` and the rest of the weight goes to the receiver.
    /// Fails with `NonConvergence` when that value is not representable.
    pub fn pareto(&self, k: usize, receiver: Side, partner_payoff: T) -> Result<T> {
        let e = &self.edges[k];
        let partner_split = e.payoff(receiver.other()).invert(partner_payoff)?;
        let v = e.payoff(receiver).eval(e.weight - partner_split);
        if !v.is_finite() && partner_payoff.is_finite() {
            return Err(Error::NonConvergence {
                value: partner_payoff.as_f64(),
            });
        }
        Ok(v)
    }

    /// [`Instance::pareto`] that saturates instead of failing when the
    /// partner's payoff is too large in magnitude to invert or the result
    /// overflows: a huge positive partner payoff leaves the receiver `-inf`,
    /// a huge negative one `+inf`.
    /// Only for comparisons (maxima, tightness, stability), never for offers
    /// that are stored.
    pub fn pareto_saturating(&self, k: usize, receiver: Side, partner_payoff: T) -> Result<T> {
        let e = &self.edges[k];
        let partner_split = match e.payoff(receiver.other()).invert(partner_payoff) {
            Ok(s) => s,
            Err(Error::NonConvergence { .. }) if partner_payoff > T::zero() => T::infinity(),
            Err(Error::NonConvergence { .. }) if partner_payoff < T::zero() => T::neg_infinity(),
            Err(err) => return Err(err),
        };
        Ok(e.payoff(receiver).eval(e.weight - partner_split))
    }

    /// [`Instance::pareto`] addressed by endpoints.
    pub fn pareto_payoff(
        &self,
        edge: (usize, usize),
        receiver: NodeId,
        partner_payoff: T,
    ) -> Result<T> {
        let k = self.edge_index(edge.0, edge.1).ok_or_else(|| {
            Error::InvalidArgument(format!("no edge ({}, {})", edge.0, edge.1))
        })?;
        let on_edge = match receiver.side {
            Side::A => receiver.index == edge.0,
            Side::B => receiver.index == edge.1,
        };
        if !on_edge {
            return Err(Error::InvalidArgument(format!(
                "{receiver} is not an endpoint of {}",
                self.edges[k].label()
            )));
        }
        self.pareto(k, receiver.side, partner_payoff)
    }

    pub fn is_connected(&self) -> bool {
        self.full().is_connected()
    }

    /// Structured validation report. Never panics.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if !self.is_connected() {
            issues.push(ValidationIssue::NotConnected);
        }
        let eps_inv = T::lit(T::EPS_INV);
        let mut max_inversion_error = 0.0f64;
        for e in &self.edges {
            if !e.weight.is_finite() {
                issues.push(ValidationIssue::NonFiniteWeight { edge: e.label() });
            } else if e.weight < T::zero() {
                issues.push(ValidationIssue::NegativeWeight {
                    edge: e.label(),
                    weight: e.weight.as_f64(),
                });
            }
            for side in [Side::A, Side::B] {
                let f = e.payoff(side);
                let node = e.endpoint(side);
                let param_issues = f.parameter_issues();
                if !param_issues.is_empty() {
                    for message in param_issues {
                        issues.push(ValidationIssue::BadPayoff {
                            node,
                            edge: e.label(),
                            message,
                        });
                    }
                    continue;
                }
                if f.eval(T::zero()) != T::zero() {
                    issues.push(ValidationIssue::BadPayoff {
                        node,
                        edge: e.label(),
                        message: "not normalized (u(0) != 0)".into(),
                    });
                }
                let span = T::lit(2.0) * T::one().max(e.weight.abs());
                let grid = sample_grid(-span, span, 161);
                let values: Vec<T> = grid.iter().map(|&s| f.eval(s)).collect();
                if values.windows(2).any(|w| !(w[0] < w[1])) {
                    issues.push(ValidationIssue::BadPayoff {
                        node,
                        edge: e.label(),
                        message: "not strictly increasing on sample grid".into(),
                    });
                    continue;
                }
                for &v in &values {
                    match f.invert(v) {
                        Ok(s) => {
                            let err = (f.eval(s) - v).abs();
                            max_inversion_error = max_inversion_error.max(err.as_f64());
                            if err > eps_inv * T::one().max(v.abs()) {
                                issues.push(ValidationIssue::InversionError {
                                    node,
                                    edge: e.label(),
                                    error: err.as_f64(),
                                });
                                break;
                            }
                        }
                        Err(_) => {
                            issues.push(ValidationIssue::InversionError {
                                node,
                                edge: e.label(),
                                error: f64::INFINITY,
                            });
                            break;
                        }
                    }
                }
            }
        }
        ValidationReport {
            issues,
            max_inversion_error,
        }
    }

    pub fn cast<U: Scalar>(&self) -> Instance<U> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                a: e.a,
                b: e.b,
                weight: U::lit(e.weight.as_f64()),
                payoff_a: e.payoff_a.cast(),
                payoff_b: e.payoff_b.cast(),
            })
            .collect();
        Instance::new(self.a_count, self.b_count, edges).expect("cast preserves structure")
    }

    /// True when every payoff function is the identity (transferable utility).
    pub fn is_all_linear_identity(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.payoff_a.is_identity() && e.payoff_b.is_identity())
    }
}

fn sample_grid<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n).map(|k| lo + step * T::lit(k as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    NotConnected,
    NegativeWeight { edge: String, weight: f64 },
    NonFiniteWeight { edge: String },
    BadPayoff { node: NodeId, edge: String, message: String },
    InversionError { node: NodeId, edge: String, error: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NotConnected => write!(f, "graph not connected"),
            ValidationIssue::NegativeWeight { edge, weight } => {
                write!(f, "edge {edge} has negative weight {weight}")
            }
            ValidationIssue::NonFiniteWeight { edge } => {
                write!(f, "edge {edge} has a non-finite weight")
            }
            ValidationIssue::BadPayoff {
                node,
                edge,
                message,
            } => write!(f, "payoff of {node} on {edge}: {message}"),
            ValidationIssue::InversionError { node, edge, error } => {
                write!(f, "payoff of {node} on {edge}: inversion roundtrip error {error:e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Largest `|u(u^{-1}(v)) - v|` seen on the sample grids.
    pub max_inversion_error: f64,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(self.issues))
        }
    }
}

/// Subset of an instance's nodes, as membership flags per side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    a: Vec<bool>,
    b: Vec<bool>,
}

impl NodeSet {
    pub fn empty(a_count: usize, b_count: usize) -> Self {
        NodeSet {
            a: vec![false; a_count],
            b: vec![false; b_count],
        }
    }

    pub fn full(a_count: usize, b_count: usize) -> Self {
        NodeSet {
            a: vec![true; a_count],
            b: vec![true; b_count],
        }
    }

    pub fn insert(&mut self, node: NodeId) {
        match node.side {
            Side::A => self.a[node.index] = true,
            Side::B => self.b[node.index] = true,
        }
    }

    pub fn remove(&mut self, node: NodeId) {
        match node.side {
            Side::A => self.a[node.index] = false,
            Side::B => self.b[node.index] = false,
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        match node.side {
            Side::A => self.a.get(node.index).copied().unwrap_or(false),
            Side::B => self.b.get(node.index).copied().unwrap_or(false),
        }
    }

    pub fn a_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.a.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i)
    }

    pub fn b_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.b.iter().enumerate().filter(|(_, &x)| x).map(|(j, _)| j)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.a_indices()
            .map(NodeId::a)
            .chain(self.b_indices().map(NodeId::b))
    }

    pub fn a_len(&self) -> usize {
        self.a.iter().filter(|&&x| x).count()
    }

    pub fn b_len(&self) -> usize {
        self.b.iter().filter(|&&x| x).count()
    }

    pub fn len(&self) -> usize {
        self.a_len() + self.b_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An instance restricted to a node subset: the induced subgraph.
#[derive(Debug, Clone)]
pub struct SubInstance<'a, T> {
    inst: &'a Instance<T>,
    nodes: NodeSet,
}

impl<'a, T: Scalar> SubInstance<'a, T> {
    pub fn instance(&self) -> &'a Instance<T> {
        self.inst
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(node)
    }

    pub fn a_nodes(&self) -> Vec<usize> {
        self.nodes.a_indices().collect()
    }

    pub fn b_nodes(&self) -> Vec<usize> {
        self.nodes.b_indices().collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Neighbors inside the subset, ascending, with edge indices.
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (usize, usize)> + '_ {
        let other = node.side.other();
        self.inst
            .neighbors(node)
            .iter()
            .copied()
            .filter(move |&(n, _)| self.nodes.contains(NodeId { side: other, index: n }))
    }

    /// Indices of edges with both endpoints inside the subset.
    pub fn edge_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.inst
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| self.nodes.contains(NodeId::a(e.a)) && self.nodes.contains(NodeId::b(e.b)))
            .map(|(k, _)| k)
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.nodes.iter().next() else {
            return true;
        };
        let mut seen = NodeSet::empty(self.inst.a_count, self.inst.b_count);
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(node) = queue.pop_front() {
            let other = node.side.other();
            for (n, _) in self.neighbors(node) {
                let next = NodeId { side: other, index: n };
                if !seen.contains(next) {
                    seen.insert(next);
                    count += 1;
                    queue.push_back(next);
                }
            }
        }
        count == self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn single(payoff_a: PayoffFn<f64>, payoff_b: PayoffFn<f64>, w: f64) -> Instance<f64> {
        Instance::new(
            1,
            1,
            vec![Edge {
                a: 0,
                b: 0,
                weight: w,
                payoff_a,
                payoff_b,
            }],
        )
        .unwrap()
    }

    #[test]
    fn pareto_examples() {
        let lin = single(PayoffFn::identity(), PayoffFn::identity(), 1.0);
        assert_abs_diff_eq!(lin.pareto_payoff((0, 0), NodeId::b(0), 0.3).unwrap(), 0.7, epsilon = 1e-15);

        // receiver b is sqrt, partner a linear: sqrt(1 - 0) = 1
        let inst = single(PayoffFn::identity(), PayoffFn::power(0.5, 1.0), 1.0);
        assert_abs_diff_eq!(inst.pareto_payoff((0, 0), NodeId::b(0), 0.0).unwrap(), 1.0, epsilon = 1e-15);

        // partner a is sqrt holding 0.5, so s_a = 0.25 and b gets 0.75
        let inst = single(PayoffFn::power(0.5, 1.0), PayoffFn::identity(), 1.0);
        assert_abs_diff_eq!(inst.pareto_payoff((0, 0), NodeId::b(0), 0.5).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn pareto_rejects_non_endpoint() {
        let inst = single(PayoffFn::identity(), PayoffFn::identity(), 1.0);
        assert!(inst.pareto_payoff((0, 0), NodeId::b(3), 0.0).is_err());
        assert!(inst.pareto_payoff((1, 0), NodeId::b(0), 0.0).is_err());
    }

    #[test]
    fn labels_roundtrip() {
        assert_eq!(NodeId::a(0).to_string(), "a1");
        assert_eq!(NodeId::parse_label("b12"), Some(NodeId::b(11)));
        assert_eq!(NodeId::parse_label("b0"), None);
        assert_eq!(NodeId::parse_label("c1"), None);
    }

    #[test]
    fn validate_connected_linear_2x2() {
        let edges = vec![
            Edge::linear(0, 0, 5.0),
            Edge::linear(0, 1, 3.0),
            Edge::linear(1, 0, 4.0),
            Edge::linear(1, 1, 1.0),
        ];
        let inst = Instance::new(2, 2, edges).unwrap();
        let report = inst.validate();
        assert!(report.is_ok(), "{:?}", report.issues);
    }

    #[test]
    fn validate_disconnected() {
        let inst = Instance::new(2, 1, vec![Edge::linear(0, 0, 1.0)]).unwrap();
        let report = inst.validate();
        assert!(report.issues.iter().any(|i| i.to_string() == "graph not connected"));
    }

    #[test]
    fn validate_flat_segment() {
        let flat = PayoffFn::piecewise(vec![0.5], vec![1.0, 0.0]).unwrap();
        let inst = single(flat, PayoffFn::identity(), 1.0);
        let report = inst.validate();
        assert!(report
            .issues
            .iter()
            .any(|i| i.to_string().contains("not strictly increasing")));
    }

    #[test]
    fn validate_negative_weight_and_offset() {
        let inst = single(
            PayoffFn::Linear { a: 1.0, b: 0.5 },
            PayoffFn::identity(),
            -1.0,
        );
        let msgs: Vec<String> = inst.validate().issues.iter().map(|i| i.to_string()).collect();
        assert!(msgs.iter().any(|m| m.contains("negative weight")));
        assert!(msgs.iter().any(|m| m.contains("not normalized")));
    }

    #[test]
    fn structural_errors() {
        assert!(Instance::<f64>::new(1, 1, vec![Edge::linear(0, 1, 1.0)]).is_err());
        assert!(Instance::<f64>::new(1, 1, vec![Edge::linear(0, 0, 1.0), Edge::linear(0, 0, 2.0)]).is_err());
        assert!(Instance::<f64>::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn sub_instance_neighbors_are_filtered() {
        let edges = vec![Edge::linear(0, 0, 1.0), Edge::linear(1, 0, 1.0), Edge::linear(1, 1, 1.0)];
        let inst = Instance::new(2, 2, edges).unwrap();
        let mut nodes = NodeSet::empty(2, 2);
        nodes.insert(NodeId::a(1));
        nodes.insert(NodeId::b(0));
        nodes.insert(NodeId::b(1));
        let sub = inst.restrict(nodes);
        let nb: Vec<_> = sub.neighbors(NodeId::b(0)).map(|(a, _)| a).collect();
        assert_eq!(nb, vec![1]);
        assert_eq!(sub.edge_indices().count(), 2);
        assert!(sub.is_connected());
    }

    fn mixed_edge(kind: usize, w: f64) -> Instance<f64> {
        let fs = [
            PayoffFn::identity(),
            PayoffFn::power(0.4, 1.5),
            PayoffFn::power(2.2, 0.8),
            PayoffFn::log1p(1.1),
            PayoffFn::piecewise(vec![0.5, 2.0], vec![0.7, 1.4, 0.3]).unwrap(),
        ];
        single(fs[kind % 5].clone(), fs[(kind / 5) % 5].clone(), w)
    }

    proptest! {
        #[test]
        fn pareto_is_an_involution(kind in 0usize..25, w in 0.0f64..10.0, x in -5.0f64..12.0) {
            let inst = mixed_edge(kind, w);
            let y = inst.pareto(0, Side::B, x).unwrap();
            let back = inst.pareto(0, Side::A, y).unwrap();
            prop_assert!((back - x).abs() <= 2e-10 * x.abs().max(1.0), "x={} back={}", x, back);
        }

        #[test]
        fn pareto_strictly_decreasing(kind in 0usize..25, w in 0.0f64..10.0, x in -5.0f64..12.0, dx in 1e-3f64..3.0) {
            let inst = mixed_edge(kind, w);
            prop_assert!(inst.pareto(0, Side::B, x).unwrap() > inst.pareto(0, Side::B, x + dx).unwrap());
            prop_assert!(inst.pareto(0, Side::A, x).unwrap() > inst.pareto(0, Side::A, x + dx).unwrap());
        }
    }
}
