//! Simple paths, path-induced offers and the maximum-offer profile.
//!
//! Everything here enumerates simple paths explicitly, so it is exponential
//! in the worst case and guarded by a node-count cap.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, NodeSet, SubInstance};
use crate::profile::OfferProfile;
use crate::scalar::Scalar;

/// Default cap on the number of nodes for which paths are enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// A simple path: alternating sides, consecutive nodes joined by an edge,
/// no node repeated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    pub fn new<T: Scalar>(inst: &Instance<T>, nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("empty path".into()));
        }
        let mut seen = NodeSet::empty(inst.a_count(), inst.b_count());
        for &n in &nodes {
            let in_range = match n.side {
                crate::instance::Side::A => n.index < inst.a_count(),
                crate::instance::Side::B => n.index < inst.b_count(),
            };
            if !in_range || seen.contains(n) {
                return Err(Error::InvalidArgument(format!("invalid or repeated node {n} in path")));
            }
            seen.insert(n);
        }
        for w in nodes.windows(2) {
            if edge_between(inst, w[0], w[1]).is_none() {
                return Err(Error::InvalidArgument(format!("no edge between {} and {}", w[0], w[1])));
            }
        }
        Ok(Path { nodes })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("paths are non-empty")
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Prefix ending at `node`, if `node` lies on the path.
    pub fn prefix_to(&self, node: NodeId) -> Option<Path> {
        let pos = self.nodes.iter().position(|&n| n == node)?;
        Some(Path {
            nodes: self.nodes[..=pos].to_vec(),
        })
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::matching::format_path(&self.nodes))
    }
}

fn edge_between<T: Scalar>(inst: &Instance<T>, x: NodeId, y: NodeId) -> Option<usize> {
    if x.side == y.side {
        return None;
    }
    let (a, b) = if x.is_a() { (x.index, y.index) } else { (y.index, x.index) };
    inst.edge_index(a, b)
}

fn check_cap<T: Scalar>(sub: &SubInstance<'_, T>, cap: usize) -> Result<()> {
    let nodes = sub.node_count();
    if nodes > cap {
        return Err(Error::InstanceTooLarge { nodes, cap });
    }
    Ok(())
}

/// All simple paths of `sub` from `from` to `to`, in lexicographic order of
/// their node sequences.
pub fn enumerate_simple_paths<T: Scalar>(
    sub: &SubInstance<'_, T>,
    from: NodeId,
    to: NodeId,
    cap: usize,
) -> Result<Vec<Path>> {
    if from == to {
        return Err(Error::InvalidArgument("path endpoints must differ".into()));
    }
    check_cap(sub, cap)?;
    if !sub.contains(from) || !sub.contains(to) {
        return Ok(Vec::new());
    }
    let inst = sub.instance();
    let mut out = Vec::new();
    let mut stack = vec![from];
    let mut on_path = NodeSet::empty(inst.a_count(), inst.b_count());
    on_path.insert(from);
    paths_dfs(sub, to, &mut stack, &mut on_path, &mut out);
    Ok(out)
}

fn paths_dfs<T: Scalar>(
    sub: &SubInstance<'_, T>,
    to: NodeId,
    stack: &mut Vec<NodeId>,
    on_path: &mut NodeSet,
    out: &mut Vec<Path>,
) {
    let cur = *stack.last().expect("non-empty");
    if cur == to {
        out.push(Path { nodes: stack.clone() });
        return;
    }
    for (n, _) in sub.neighbors(cur).collect::<Vec<_>>() {
        let next = NodeId {
            side: cur.side.other(),
            index: n,
        };
        if on_path.contains(next) {
            continue;
        }
        on_path.insert(next);
        stack.push(next);
        paths_dfs(sub, to, stack, on_path, out);
        stack.pop();
        on_path.remove(next);
    }
}

/// Offer induced on the last node of `path` when its first node is offered
/// `x`: each node receives the pareto payoff of its predecessor.
pub fn path_induced_offer<T: Scalar>(inst: &Instance<T>, path: &Path, x: T) -> Result<T> {
    let mut offer = x;
    for w in path.nodes().windows(2) {
        let k = edge_between(inst, w[0], w[1]).expect("path edges exist");
        offer = inst.pareto(k, w[1].side, offer)?;
    }
    Ok(offer)
}

/// Maximum-offer profile together with one maximizing path per A node.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxOfferProfile<T> {
    pub profile: OfferProfile<T>,
    /// Lexicographically smallest maximizing path from the root to each A
    /// node of the subinstance (the root maps to the one-node path).
    pub argmax: BTreeMap<usize, Path>,
}

/// For every A node, the largest offer induced on it by a simple path from
/// `root` carrying offer `x`; every B node then gets the best pareto payoff
/// over its neighbors. Nodes outside `sub` are NaN.
pub fn max_offer_profile<T: Scalar>(
    sub: &SubInstance<'_, T>,
    root: usize,
    x: T,
    cap: usize,
) -> Result<MaxOfferProfile<T>> {
    check_cap(sub, cap)?;
    let inst = sub.instance();
    let root_node = NodeId::a(root);
    if !sub.contains(root_node) {
        return Err(Error::InvalidArgument(format!("root {root_node} not in subinstance")));
    }
    let mut profile = OfferProfile::undefined(inst.a_count(), inst.b_count());
    let mut best: Vec<Option<(T, Vec<NodeId>)>> = vec![None; inst.a_count()];
    best[root] = Some((x, vec![root_node]));

    let mut stack = vec![root_node];
    let mut on_path = NodeSet::empty(inst.a_count(), inst.b_count());
    on_path.insert(root_node);
    let mut overflowed = false;
    offers_dfs(sub, x, &mut stack, &mut on_path, &mut best, &mut overflowed)?;

    let mut argmax = BTreeMap::new();
    for a in sub.nodes().a_indices() {
        let (v, nodes) = best[a].clone().ok_or_else(|| {
            if overflowed {
                // Every path to this node left the representable range.
                Error::NonConvergence { value: f64::NEG_INFINITY }
            } else {
                Error::InvalidArgument(format!("{} unreachable from {root_node}", NodeId::a(a)))
            }
        })?;
        profile.a[a] = v;
        argmax.insert(a, Path { nodes });
    }
    for b in sub.nodes().b_indices() {
        let mut o: Option<T> = None;
        for (a, k) in sub.neighbors(NodeId::b(b)) {
            let v = inst.pareto_saturating(k, crate::instance::Side::B, profile.a[a])?;
            o = Some(match o {
                Some(cur) if cur >= v => cur,
                _ => v,
            });
        }
        let o = o.ok_or_else(|| Error::InvalidArgument(format!("{} isolated", NodeId::b(b))))?;
        if !o.is_finite() {
            return Err(Error::NonConvergence { value: o.as_f64() });
        }
        profile.b[b] = o;
    }
    Ok(MaxOfferProfile { profile, argmax })
}

fn offers_dfs<T: Scalar>(
    sub: &SubInstance<'_, T>,
    offer: T,
    stack: &mut Vec<NodeId>,
    on_path: &mut NodeSet,
    best: &mut [Option<(T, Vec<NodeId>)>],
    overflowed: &mut bool,
) -> Result<()> {
    let inst = sub.instance();
    let cur = *stack.last().expect("non-empty");
    let nbrs: Vec<(usize, usize)> = sub.neighbors(cur).collect();
    for (n, k) in nbrs {
        let next = NodeId {
            side: cur.side.other(),
            index: n,
        };
        if on_path.contains(next) {
            continue;
        }
        let next_offer = inst.pareto_saturating(k, next.side, offer)?;
        if !next_offer.is_finite() {
            // The giver's offer is beyond what its payoff can invert in this
            // precision; every later A offer on this branch is then
            // astronomically negative, so the branch cannot hold a maximum.
            *overflowed = true;
            continue;
        }
        on_path.insert(next);
        stack.push(next);
        if next.is_a() {
            // DFS visits paths in lexicographic order, so only a strict
            // improvement replaces the recorded path.
            let improves = match &best[n] {
                None => true,
                Some((v, _)) => next_offer > *v,
            };
            if improves {
                best[n] = Some((next_offer, stack.clone()));
            }
        }
        offers_dfs(sub, next_offer, stack, on_path, best, overflowed)?;
        stack.pop();
        on_path.remove(next);
    }
    Ok(())
}
