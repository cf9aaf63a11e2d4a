//! Stable alternating spanning-tree profiles and offer-generating functions.
//!
//! [`SpanningEngine::stable_spanning_profile`] builds, for a node set with
//! one more A node than B nodes, the unique stable profile whose equality
//! subgraph carries a near-perfect matching with an alternating tree spanning
//! every node, with a prescribed offer on the root. The construction seeds
//! with the maximum-offer profile and then repeatedly lowers the offers of an
//! alternating tree that does not contain the root, recursing on the tree's
//! node set, until one tree spans everything.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, NodeSet, Side, SubInstance};
use crate::matching::{
    band, build_equality_subgraph, complete_matching, expanding_nodes, find_augmenting_path, grow_alternating_tree,
    max_instability, maximum_matching, reroot, AlternatingTree, EqualitySubgraph, HungarianForest, Matching,
};
use crate::paths::{max_offer_profile, DEFAULT_ENUMERATION_CAP};
use crate::profile::OfferProfile;
use crate::scalar::Scalar;

/// Node-count limit of [`brute_force_spanning_profile`].
pub const BRUTE_FORCE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningProfileResult<T> {
    pub nodes: NodeSet,
    pub root: usize,
    /// Offers on `nodes`; NaN elsewhere.
    pub profile: OfferProfile<T>,
    /// Alternating tree rooted at `root` spanning `nodes`.
    pub tree: AlternatingTree,
    /// Matching inside `nodes` leaving only `root` unmatched.
    pub near_perfect_matching: Matching,
    pub iterations: usize,
}

type MemoKey = (NodeSet, usize, (u64, i16, i8));

/// Computes spanning-tree profiles on subsets of one instance, memoizing
/// recursive sub-results within each top-level call.
pub struct SpanningEngine<'a, T> {
    inst: &'a Instance<T>,
    eps_eq: T,
    enumeration_cap: usize,
    memo: HashMap<MemoKey, SpanningProfileResult<T>>,
    /// Number of constructions run (memo misses) since the engine was built.
    pub constructions: usize,
}

impl<'a, T: Scalar> SpanningEngine<'a, T> {
    pub fn new(inst: &'a Instance<T>, eps_eq: T, enumeration_cap: usize) -> Self {
        SpanningEngine {
            inst,
            eps_eq,
            enumeration_cap,
            memo: HashMap::new(),
            constructions: 0,
        }
    }

    /// Engine with the scalar's default tolerance and enumeration cap.
    pub fn with_defaults(inst: &'a Instance<T>) -> Self {
        Self::new(inst, T::lit(T::EPS_EQ), DEFAULT_ENUMERATION_CAP)
    }

    pub fn instance(&self) -> &'a Instance<T> {
        self.inst
    }

    /// Stable spanning-tree profile on `nodes` with offer `x` on `root`.
    ///
    /// If the construction from `root` overflows, the profile is found from
    /// another A node instead: its offer generating function onto `root` is
    /// increasing, so bisection on its offer reaches `x`.
    pub fn stable_spanning_profile(&mut self, nodes: &NodeSet, root: usize, x: T) -> Result<SpanningProfileResult<T>> {
        self.memo.clear();
        match self.spanning(nodes, root, x) {
            Err(e @ Error::NonConvergence { .. }) => {
                let others: Vec<usize> = nodes.a_indices().filter(|&j| j != root).collect();
                for j in others {
                    if let Some(r) = self.through(nodes, j, root, x) {
                        return Ok(r);
                    }
                }
                Err(e)
            }
            r => r,
        }
    }

    /// Spanning profile rooted at `via` whose offer on `root` is `x` (within
    /// the equality band), re-expressed with `root` as the root.
    fn through(&mut self, nodes: &NodeSet, via: usize, root: usize, x: T) -> Option<SpanningProfileResult<T>> {
        let eval = |this: &mut Self, y: T| {
            this.memo.clear();
            this.spanning(nodes, via, y).ok().map(|r| (r.profile.a[root] - x, r))
        };
        // Bracket the crossing by doubling steps away from zero.
        let (mut lo, mut hi);
        let (g0, r0) = eval(self, T::zero())?;
        if g0 == T::zero() {
            return self.rerooted(nodes, r0, root, x);
        }
        let up = g0 < T::zero();
        let (mut y, mut step) = (T::zero(), T::one());
        let mut far = None;
        for _ in 0..128 {
            let next = if up { y + step } else { y - step };
            let (g, r) = eval(self, next)?;
            if (g >= T::zero()) == up {
                far = Some((next, g, r));
                break;
            }
            y = next;
            step = step + step;
        }
        let (yf, gf, rf) = far?;
        if up {
            (lo, hi) = (y, yf);
        } else {
            (lo, hi) = (yf, y);
        }
        let mut best = (gf.abs(), rf);
        for _ in 0..256 {
            let mid = lo + (hi - lo) / (T::one() + T::one());
            if mid <= lo || mid >= hi {
                break;
            }
            let (g, r) = eval(self, mid)?;
            let done = g == T::zero();
            if g < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            if g.abs() < best.0 {
                best = (g.abs(), r);
            }
            if done {
                break;
            }
        }
        if best.0 > band(self.eps_eq, x) {
            return None;
        }
        self.rerooted(nodes, best.1, root, x)
    }

    fn rerooted(&self, nodes: &NodeSet, r: SpanningProfileResult<T>, root: usize, x: T) -> Option<SpanningProfileResult<T>> {
        let sub = self.inst.restrict(nodes.clone());
        let mut profile = r.profile;
        profile.a[root] = x;
        let eq = build_equality_subgraph(&sub, &profile, self.eps_eq).ok()?;
        let matching = reroot(&eq, &r.near_perfect_matching, r.root, root).ok()?;
        let tree = grow_alternating_tree(&eq, &matching, root).ok()?;
        let stable = max_instability(&sub, &profile).ok()? <= T::lit(10.0) * self.eps_eq;
        (tree.len() == nodes.len() && stable).then(|| SpanningProfileResult {
            nodes: nodes.clone(),
            root,
            profile,
            tree,
            near_perfect_matching: matching,
            iterations: r.iterations,
        })
    }

    /// `f^S_{from,to}(x)`: the offer on `to` in the spanning profile rooted
    /// at `from` with offer `x`.
    pub fn offer_generating_fn(&mut self, nodes: &NodeSet, from: NodeId, to: NodeId, x: T) -> Result<T> {
        if !from.is_a() {
            return Err(Error::InvalidArgument(format!("generating function source {from} must be on side A")));
        }
        if !nodes.contains(to) {
            return Err(Error::InvalidArgument(format!("{to} is not in the node set")));
        }
        let r = self.stable_spanning_profile(nodes, from.index, x)?;
        Ok(r.profile[to])
    }

    /// Among `candidates` (A node -> offer), the one whose spanning profile
    /// on `nodes` gives every other candidate at least its offer. Candidates
    /// are tried from the largest offer down (lowest index first on equal
    /// offers), and a later one replaces the current choice only if the
    /// current profile falls short of its offer.
    pub fn select_dominant_expander(
        &mut self,
        nodes: &NodeSet,
        candidates: &BTreeMap<usize, T>,
    ) -> Result<(usize, SpanningProfileResult<T>)> {
        self.memo.clear();
        self.select(nodes, candidates)
    }

    fn select(&mut self, nodes: &NodeSet, candidates: &BTreeMap<usize, T>) -> Result<(usize, SpanningProfileResult<T>)> {
        if candidates.is_empty() {
            return Err(Error::InvalidArgument("no expanding candidates".into()));
        }
        let mut order: Vec<(usize, T)> = candidates.iter().map(|(&i, &eo)| (i, eo)).collect();
        // Stable sort keeps index order on equal offers. Very negative offers
        // come last, so they are only built if nothing else covers them.
        order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal));
        let eps = self.eps_eq;
        let short = |res: &SpanningProfileResult<T>, i: usize, eo: T| res.profile.a[i] < eo - band(eps, eo);

        // Candidate profiles are totally ordered, so a single pass that
        // switches whenever the current profile falls short finds the top.
        // A candidate whose profile overflows is passed over; the dominance
        // check below catches the case where it was the top after all.
        let mut cur: Option<(usize, SpanningProfileResult<T>)> = None;
        let mut overflow: Option<Error> = None;
        for (i, eo) in order {
            if let Some((_, res)) = &cur {
                if !short(res, i, eo) {
                    continue;
                }
            }
            match self.spanning(nodes, i, eo) {
                Ok(res) => cur = Some((i, res)),
                Err(e @ Error::NonConvergence { .. }) => overflow = overflow.or(Some(e)),
                Err(e) => return Err(e),
            }
        }
        let Some((chosen, res)) = cur else {
            return Err(overflow.expect("every candidate failed"));
        };
        let slack = T::lit(10.0) * self.eps_eq;
        if candidates.iter().any(|(&i, &eo)| res.profile.a[i] < eo - band(slack, eo)) {
            return Err(overflow.unwrap_or_else(|| {
                Error::NoProfile("no candidate's spanning profile covers every expanding offer".into())
            }));
        }
        Ok((chosen, res))
    }

    fn spanning(&mut self, nodes: &NodeSet, root: usize, x: T) -> Result<SpanningProfileResult<T>> {
        let key = (nodes.clone(), root, x.bits_key());
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let r = self.construct(nodes, root, x)?;
        self.memo.insert(key, r.clone());
        Ok(r)
    }

    fn construct(&mut self, nodes: &NodeSet, root: usize, x: T) -> Result<SpanningProfileResult<T>> {
        self.constructions += 1;
        let inst = self.inst;
        let (na, nb) = (nodes.a_len(), nodes.b_len());
        if na != nb + 1 {
            return Err(Error::SideSizeMismatch { a: na, b: nb });
        }
        if !nodes.contains(NodeId::a(root)) {
            return Err(Error::InvalidArgument(format!("root {} not in node set", NodeId::a(root))));
        }
        let sub = inst.restrict(nodes.clone());
        if !sub.is_connected() {
            return Err(Error::NoProfile("subinstance is not connected".into()));
        }
        match nb {
            0 => Ok(self.singleton(nodes, root, x)),
            1 => self.star(&sub, root, x),
            _ => self.iterate(&sub, root, x),
        }
    }

    fn singleton(&self, nodes: &NodeSet, root: usize, x: T) -> SpanningProfileResult<T> {
        let inst = self.inst;
        let mut profile = OfferProfile::undefined(inst.a_count(), inst.b_count());
        profile.a[root] = x;
        let eq = EqualitySubgraph::from_edges(nodes.clone(), inst.a_count(), inst.b_count(), [], self.eps_eq.as_f64());
        let m = Matching::new(inst.a_count(), inst.b_count());
        let tree = grow_alternating_tree(&eq, &m, root).expect("root is unmatched");
        SpanningProfileResult {
            nodes: nodes.clone(),
            root,
            profile,
            tree,
            near_perfect_matching: m,
            iterations: 0,
        }
    }

    /// One B node between the root and one other A node: two folds.
    fn star(&self, sub: &SubInstance<'_, T>, root: usize, x: T) -> Result<SpanningProfileResult<T>> {
        let inst = self.inst;
        let b = sub.nodes().b_indices().next().expect("one B node");
        let other = sub
            .nodes()
            .a_indices()
            .find(|&a| a != root)
            .expect("two A nodes");
        let k_root = inst.edge_index(root, b).expect("connected star");
        let k_other = inst.edge_index(other, b).expect("connected star");
        let mut profile = OfferProfile::undefined(inst.a_count(), inst.b_count());
        profile.a[root] = x;
        profile.b[b] = inst.pareto(k_root, Side::B, x)?;
        profile.a[other] = inst.pareto(k_other, Side::A, profile.b[b])?;
        let m = Matching::from_pairs(inst.a_count(), inst.b_count(), [(other, b)])?;
        let eq = EqualitySubgraph::from_edges(
            sub.nodes().clone(),
            inst.a_count(),
            inst.b_count(),
            [(root, b), (other, b)],
            self.eps_eq.as_f64(),
        );
        let tree = grow_alternating_tree(&eq, &m, root)?;
        Ok(SpanningProfileResult {
            nodes: sub.nodes().clone(),
            root,
            profile,
            tree,
            near_perfect_matching: m,
            iterations: 0,
        })
    }

    fn iterate(&mut self, sub: &SubInstance<'_, T>, root: usize, x: T) -> Result<SpanningProfileResult<T>> {
        let inst = self.inst;
        let nodes = sub.nodes().clone();
        let (na, nb) = (nodes.a_len(), nodes.b_len());
        let eps = self.eps_eq;
        let strict = T::lit(10.0) * eps;

        let mut profile = max_offer_profile(sub, root, x, self.enumeration_cap)?.profile;
        let mut eq = build_equality_subgraph(sub, &profile, eps)?;
        let mut matching = maximum_matching(&eq);
        let cap = 4 * na * nb;
        let mut iterations = 0;

        loop {
            debug_assert!(
                max_instability(sub, &profile)? <= strict,
                "spanning construction lost stability"
            );
            debug_assert!(profile.a[root] == x, "root offer changed");

            if matching.len() == nb {
                let free = nodes
                    .a_indices()
                    .find(|&a| matching.mate_of_a(a).is_none())
                    .expect("near-perfect matching leaves one A node free");
                let tree = grow_alternating_tree(&eq, &matching, free)?;
                if tree.len() == nodes.len() {
                    let matching = reroot(&eq, &matching, free, root)?;
                    let tree = grow_alternating_tree(&eq, &matching, root)?;
                    return Ok(SpanningProfileResult {
                        nodes,
                        root,
                        profile,
                        tree,
                        near_perfect_matching: matching,
                        iterations,
                    });
                }
            }
            if iterations >= cap {
                return Err(Error::IterationCapExceeded { cap });
            }
            iterations += 1;

            let forest = HungarianForest::over_unmatched(&eq, &matching)?;
            debug_assert!(forest_invariants_hold(&eq, &matching, &forest), "Hungarian forest invariants violated");
            let Some(tree) = forest.trees.iter().find(|t| !t.contains(NodeId::a(root))) else {
                return Err(Error::NoProfile(format!(
                    "every alternating tree contains the root {} but none spans the node set",
                    NodeId::a(root)
                )));
            };
            let mut candidates = expanding_nodes(sub, tree, &profile)?;
            // An expanding offer of -inf is met by every profile, so such a
            // candidate never decides the selection.
            let before = candidates.len();
            candidates.retain(|_, eo| *eo != T::neg_infinity());
            if candidates.is_empty() && before > 0 {
                return Err(Error::NonConvergence { value: f64::NEG_INFINITY });
            }
            if candidates.is_empty() {
                return Err(Error::NoProfile(format!(
                    "alternating tree at {} has no expanding node",
                    NodeId::a(tree.root)
                )));
            }
            let tree_nodes = tree.nodes().clone();
            let tree_root = tree.root;
            let (chosen, inner) = self.select(&tree_nodes, &candidates)?;

            #[cfg(debug_assertions)]
            for n in tree_nodes.iter() {
                let (old, new) = (profile[n], inner.profile[n]);
                let ok = if n.is_a() { new <= old + strict } else { new >= old - strict };
                debug_assert!(ok, "offer on {n} moved the wrong way: {old} -> {new}");
            }

            profile.overwrite_from(&inner.profile, &tree_nodes);
            eq = build_equality_subgraph(sub, &profile, eps)?;
            let tree_eq = build_equality_subgraph(&inst.restrict(tree_nodes.clone()), &profile, eps)?;
            let inside = reroot(&tree_eq, &inner.near_perfect_matching, chosen, tree_root)?;
            let outside = matching.filtered(|a, b| !tree_nodes.contains(NodeId::a(a)) && !tree_nodes.contains(NodeId::b(b)));
            matching = outside.merged(&inside)?;
            if let Some(path) = find_augmenting_path(&eq, &matching, tree_root) {
                matching = crate::matching::augment_along(&matching, &path)?;
            }
            matching = complete_matching(&eq, &matching);
        }
    }
}

fn forest_invariants_hold(eq: &EqualitySubgraph, matching: &Matching, forest: &HungarianForest) -> bool {
    let in_forest = forest.nodes(eq.a_count(), eq.b_count());
    let unmatched_b_outside = eq
        .nodes()
        .b_indices()
        .filter(|&b| !in_forest.contains(NodeId::b(b)) && matching.mate_of_b(b).is_none())
        .count();
    if forest.trees.len() != unmatched_b_outside + 1 {
        return false;
    }
    let closed = in_forest.a_indices().all(|a| {
        eq.neighbors(NodeId::a(a))
            .iter()
            .all(|&b| in_forest.contains(NodeId::b(b)))
    });
    closed && forest.trees.iter().all(|t| t.check_invariants(eq, matching).is_ok())
}

/// Spanning trees of `nodes` in which every B node has degree two, each with
/// the profile obtained by folding offers outward from `root`. Only trees
/// whose profile is stable within `eps_eq` on all edges of `nodes` are kept.
pub fn brute_force_stable_trees<T: Scalar>(
    inst: &Instance<T>,
    nodes: &NodeSet,
    root: usize,
    x: T,
    eps_eq: T,
) -> Result<Vec<(Vec<(usize, usize)>, OfferProfile<T>)>> {
    if nodes.len() > BRUTE_FORCE_CAP {
        return Err(Error::InstanceTooLarge {
            nodes: nodes.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let (na, nb) = (nodes.a_len(), nodes.b_len());
    if na != nb + 1 {
        return Err(Error::SideSizeMismatch { a: na, b: nb });
    }
    let sub = inst.restrict(nodes.clone());
    let bs: Vec<usize> = nodes.b_indices().collect();
    let options: Vec<Vec<(usize, usize)>> = bs
        .iter()
        .map(|&b| {
            let nbrs: Vec<usize> = sub.neighbors(NodeId::b(b)).map(|(a, _)| a).collect();
            let mut pairs = Vec::new();
            for (p, &a1) in nbrs.iter().enumerate() {
                for &a2 in &nbrs[p + 1..] {
                    pairs.push((a1, a2));
                }
            }
            pairs
        })
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; bs.len()];
    let mut parent: Vec<usize> = (0..inst.a_count()).collect();
    enumerate_trees(inst, &sub, root, x, eps_eq, &bs, &options, 0, &mut choice, &mut parent, &mut out)?;
    Ok(out)
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        a = parent[a];
    }
    a
}

#[allow(clippy::too_many_arguments)]
fn enumerate_trees<T: Scalar>(
    inst: &Instance<T>,
    sub: &SubInstance<'_, T>,
    root: usize,
    x: T,
    eps_eq: T,
    bs: &[usize],
    options: &[Vec<(usize, usize)>],
    depth: usize,
    choice: &mut Vec<usize>,
    parent: &mut Vec<usize>,
    out: &mut Vec<(Vec<(usize, usize)>, OfferProfile<T>)>,
) -> Result<()> {
    if depth == bs.len() {
        // Each B node joins two A components, so |B| successful unions over
        // |B| + 1 A nodes leave a single spanning tree.
        let edges: Vec<(usize, usize)> = bs
            .iter()
            .enumerate()
            .flat_map(|(d, &b)| {
                let (a1, a2) = options[d][choice[d]];
                [(a1, b), (a2, b)]
            })
            .collect();
        // Trees whose folds overflow are skipped: their offers cannot be
        // represented, so they cannot be the (finite) stable profile.
        let Ok(profile) = fold_tree(inst, sub.nodes(), &edges, root, x) else {
            return Ok(());
        };
        if profile.is_defined_on(sub.nodes()) && matches!(max_instability(sub, &profile), Ok(v) if v <= eps_eq) {
            out.push((edges, profile));
        }
        return Ok(());
    }
    for (c, &(a1, a2)) in options[depth].iter().enumerate() {
        let (r1, r2) = (find(parent, a1), find(parent, a2));
        if r1 == r2 {
            continue;
        }
        choice[depth] = c;
        parent[r2] = r1;
        enumerate_trees(inst, sub, root, x, eps_eq, bs, options, depth + 1, choice, parent, out)?;
        parent[r2] = r2;
    }
    Ok(())
}

/// Offers propagated from `root` along the edges of a tree.
fn fold_tree<T: Scalar>(
    inst: &Instance<T>,
    nodes: &NodeSet,
    edges: &[(usize, usize)],
    root: usize,
    x: T,
) -> Result<OfferProfile<T>> {
    let mut profile = OfferProfile::undefined(inst.a_count(), inst.b_count());
    let mut seen = NodeSet::empty(inst.a_count(), inst.b_count());
    profile.a[root] = x;
    seen.insert(NodeId::a(root));
    let mut queue = std::collections::VecDeque::from([NodeId::a(root)]);
    while let Some(n) = queue.pop_front() {
        for &(a, b) in edges {
            let next = match n.side {
                Side::A if a == n.index => NodeId::b(b),
                Side::B if b == n.index => NodeId::a(a),
                _ => continue,
            };
            if seen.contains(next) {
                continue;
            }
            let k = inst.edge_index(a, b).expect("tree edges are instance edges");
            profile[next] = inst.pareto(k, next.side, profile[n])?;
            seen.insert(next);
            queue.push_back(next);
        }
    }
    debug_assert_eq!(seen.len(), nodes.len());
    Ok(profile)
}

/// Exhaustive counterpart of [`SpanningEngine::stable_spanning_profile`]:
/// enumerates every spanning tree in which each B node has exactly one
/// child, folds offers from the root, and returns the first stable one.
pub fn brute_force_spanning_profile<T: Scalar>(
    inst: &Instance<T>,
    nodes: &NodeSet,
    root: usize,
    x: T,
    eps_eq: T,
) -> Result<SpanningProfileResult<T>> {
    let stable = brute_force_stable_trees(inst, nodes, root, x, eps_eq)?;
    let (edges, profile) = stable
        .into_iter()
        .next()
        .ok_or_else(|| Error::NoProfile("no spanning tree yields a stable profile".into()))?;
    let eq = EqualitySubgraph::from_edges(
        nodes.clone(),
        inst.a_count(),
        inst.b_count(),
        edges.iter().copied(),
        eps_eq.as_f64(),
    );
    // Orient the tree away from the root: each B node's child is its mate.
    let mut depth_a = vec![usize::MAX; inst.a_count()];
    depth_a[root] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for b in nodes.b_indices() {
            let ends: Vec<usize> = edges.iter().filter(|e| e.1 == b).map(|e| e.0).collect();
            let (p, q) = (ends[0], ends[1]);
            for (from, to) in [(p, q), (q, p)] {
                if depth_a[from] != usize::MAX && depth_a[to] == usize::MAX {
                    depth_a[to] = depth_a[from] + 2;
                    changed = true;
                }
            }
        }
    }
    let pairs = nodes.b_indices().map(|b| {
        let ends: Vec<usize> = edges.iter().filter(|e| e.1 == b).map(|e| e.0).collect();
        let child = if depth_a[ends[0]] > depth_a[ends[1]] { ends[0] } else { ends[1] };
        (child, b)
    });
    let m = Matching::from_pairs(inst.a_count(), inst.b_count(), pairs)?;
    let tree = grow_alternating_tree(&eq, &m, root)?;
    Ok(SpanningProfileResult {
        nodes: nodes.clone(),
        root,
        profile,
        tree,
        near_perfect_matching: m,
        iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Edge;
    use crate::matching::check_spanning_tree_profile;
    use crate::payoff::PayoffFn;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn star(w1: f64, w2: f64) -> Instance<f64> {
        Instance::new(2, 1, vec![Edge::linear(0, 0, w1), Edge::linear(1, 0, w2)]).unwrap()
    }

    fn sqrt_star() -> Instance<f64> {
        let mut e = Edge::linear(0, 0, 1.0);
        e.payoff_b = PayoffFn::power(0.5, 1.0);
        Instance::new(2, 1, vec![e, Edge::linear(1, 0, 1.0)]).unwrap()
    }

    fn worked() -> Instance<f64> {
        Instance::new(
            2,
            2,
            vec![
                Edge::linear(0, 0, 5.0),
                Edge::linear(0, 1, 3.0),
                Edge::linear(1, 0, 4.0),
                Edge::linear(1, 1, 1.0),
            ],
        )
        .unwrap()
    }

    fn complete_3x2(weights: [f64; 6]) -> Instance<f64> {
        let mut edges = Vec::new();
        for a in 0..3 {
            for b in 0..2 {
                edges.push(Edge::linear(a, b, weights[a * 2 + b]));
            }
        }
        Instance::new(3, 2, edges).unwrap()
    }

    #[test]
    fn overflowing_seed_falls_back_to_another_root() {
        // From a5 at this offer the maximum-offer seed leaves f64 range, but
        // the same profile is reachable from a3.
        use crate::generate::{generate_spanning_instance, PayoffFamily};
        let inst = generate_spanning_instance(7, 4, 0.4, PayoffFamily::Mixed).unwrap();
        let all = inst.all_nodes();
        let sub = inst.full();
        assert!(matches!(
            max_offer_profile(&sub, 4, 69.18871950285427, DEFAULT_ENUMERATION_CAP),
            Err(Error::NonConvergence { .. })
        ));
        let mut engine = SpanningEngine::with_defaults(&inst);
        let from_a3 = engine.stable_spanning_profile(&all, 2, 0.2167991719872192).unwrap();
        let y = from_a3.profile.a[4];
        let from_a5 = engine.stable_spanning_profile(&all, 4, y).unwrap();
        assert_eq!(from_a5.root, 4);
        assert_eq!(from_a5.profile.a[4], y);
        assert_eq!(from_a5.tree.len(), all.len());
        assert!(check_spanning_tree_profile(&sub, &from_a5.profile, 1e-8).unwrap());
        for n in all.iter() {
            let scale = from_a3.profile[n].abs().max(1.0);
            assert!((from_a5.profile[n] - from_a3.profile[n]).abs() <= 1e-8 * scale, "{n}");
        }
    }

    #[test]
    fn star_examples() {
        let s = star(2.0, 1.0);
        let all = s.all_nodes();
        let mut eng = SpanningEngine::with_defaults(&s);
        let r = eng.stable_spanning_profile(&all, 0, 0.5).unwrap();
        assert_eq!(r.profile.a, vec![0.5, -0.5]);
        assert_eq!(r.profile.b, vec![1.5]);
        assert_eq!(r.tree.len(), 3);
        assert!(r.near_perfect_matching.contains(1, 0));
        for x in [-3.0, -0.25, 0.0, 1.0, 2.5, 7.0] {
            let v = eng.offer_generating_fn(&all, NodeId::a(0), NodeId::a(1), x).unwrap();
            assert_abs_diff_eq!(v, x - 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            eng.offer_generating_fn(&all, NodeId::a(0), NodeId::a(1), 3.0).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        let oracle = brute_force_spanning_profile(&s, &all, 0, 0.5, 1e-8).unwrap();
        assert_eq!(oracle.profile, r.profile);
    }

    #[test]
    fn nonlinear_star() {
        let s = sqrt_star();
        let all = s.all_nodes();
        let mut eng = SpanningEngine::with_defaults(&s);
        let r = eng.stable_spanning_profile(&all, 0, 0.75).unwrap();
        assert_abs_diff_eq!(r.profile.b[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.profile.a[1], 0.5, epsilon = 1e-9);
        let oracle = brute_force_spanning_profile(&s, &all, 0, 0.75, 1e-8).unwrap();
        assert!(r.profile.max_abs_diff(&oracle.profile, &all) <= 1e-9);
        for x in [0.0, 0.1, 0.5, 0.9] {
            let v = eng.offer_generating_fn(&all, NodeId::a(0), NodeId::a(1), x).unwrap();
            assert_abs_diff_eq!(v, 1.0 - (1.0 - x).sqrt(), epsilon = 1e-9);
        }
    }

    #[test]
    fn inverse_roundtrip_on_star() {
        let s = sqrt_star();
        let all = s.all_nodes();
        let mut eng = SpanningEngine::with_defaults(&s);
        for x in [-2.0, -0.3, 0.0, 0.4, 0.8, 3.0] {
            let y = eng.offer_generating_fn(&all, NodeId::a(0), NodeId::a(1), x).unwrap();
            let back = eng.offer_generating_fn(&all, NodeId::a(1), NodeId::a(0), y).unwrap();
            assert_abs_diff_eq!(back, x, epsilon = 4e-10);
        }
    }

    #[test]
    fn dominant_expander_examples() {
        let w = worked();
        let mut tree_nodes = NodeSet::empty(2, 2);
        for n in [NodeId::a(0), NodeId::a(1), NodeId::b(0)] {
            tree_nodes.insert(n);
        }
        let mut eng = SpanningEngine::with_defaults(&w);
        let cands = BTreeMap::from([(0, 3.0), (1, 1.0)]);
        let (c, r) = eng.select_dominant_expander(&tree_nodes, &cands).unwrap();
        assert_eq!(c, 0);
        assert_eq!((r.profile.a[0], r.profile.b[0], r.profile.a[1]), (3.0, 2.0, 2.0));

        let (c, _) = eng.select_dominant_expander(&tree_nodes, &BTreeMap::from([(1, 1.0)])).unwrap();
        assert_eq!(c, 1);

        let sym = star(2.0, 2.0);
        let all = sym.all_nodes();
        let mut eng = SpanningEngine::with_defaults(&sym);
        let (c, _) = eng.select_dominant_expander(&all, &BTreeMap::from([(0, 1.0), (1, 1.0)])).unwrap();
        assert_eq!(c, 0);
    }

    #[test]
    fn complete_3x2_agrees_with_oracle() {
        let inst = complete_3x2([5.0, 3.0, 4.0, 1.0, 2.0, 6.0]);
        let all = inst.all_nodes();
        let mut eng = SpanningEngine::with_defaults(&inst);
        for root in 0..3 {
            for x in [-1.0, 0.0, 1.5, 3.0, 8.0] {
                let r = eng.stable_spanning_profile(&all, root, x).unwrap();
                let o = brute_force_spanning_profile(&inst, &all, root, x, 1e-8).unwrap();
                assert!(r.profile.max_abs_diff(&o.profile, &all) <= 1e-9, "root {root} x {x}");
                assert!(check_spanning_tree_profile(&inst.full(), &r.profile, 1e-8).unwrap());
                assert_eq!(r.tree.len(), 5);
                assert_eq!(r.near_perfect_matching.len(), 2);
                assert!(r.near_perfect_matching.mate_of_a(root).is_none());
            }
        }
    }

    #[test]
    fn errors() {
        let w = worked();
        let mut eng = SpanningEngine::with_defaults(&w);
        assert!(matches!(
            eng.stable_spanning_profile(&w.all_nodes(), 0, 1.0),
            Err(Error::SideSizeMismatch { a: 2, b: 2 })
        ));
        assert!(matches!(
            eng.offer_generating_fn(&w.all_nodes(), NodeId::b(0), NodeId::a(0), 1.0),
            Err(Error::InvalidArgument(_))
        ));
        let mut disconnected = NodeSet::empty(2, 2);
        disconnected.insert(NodeId::a(0));
        disconnected.insert(NodeId::a(1));
        disconnected.insert(NodeId::b(1));
        let lone = Instance::new(2, 2, vec![Edge::linear(0, 0, 1.0), Edge::linear(0, 1, 1.0), Edge::linear(1, 0, 1.0)]).unwrap();
        let mut eng = SpanningEngine::with_defaults(&lone);
        assert!(matches!(eng.stable_spanning_profile(&disconnected, 0, 1.0), Err(Error::NoProfile(_))));
    }

    #[test]
    fn oracle_keeps_a_single_tree_on_generic_instances() {
        let inst = complete_3x2([5.3, 3.1, 4.7, 1.2, 2.9, 6.4]);
        for x in [0.0, 1.0, 2.0] {
            let trees = brute_force_stable_trees(&inst, &inst.all_nodes(), 0, x, 1e-8).unwrap();
            assert_eq!(trees.len(), 1, "x = {x}");
        }
    }

    fn arb_spanning_instance() -> impl Strategy<Value = Instance<f64>> {
        (1usize..=3, proptest::collection::vec(any::<bool>(), 12), proptest::collection::vec(0.0f64..10.0, 12), proptest::collection::vec(0.3f64..3.0, 24))
            .prop_filter_map("connected", |(nb, mask, w, ex)| {
                let na = nb + 1;
                let mut edges = Vec::new();
                for a in 0..na {
                    for b in 0..nb {
                        let k = a * 3 + b;
                        if mask[k] || a == b || a == b + 1 {
                            let mut e = Edge::linear(a, b, w[k]);
                            e.payoff_a = PayoffFn::power(ex[2 * k], 1.0);
                            e.payoff_b = PayoffFn::log1p(ex[2 * k + 1]);
                            edges.push(e);
                        }
                    }
                }
                Instance::new(na, nb, edges).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn agrees_with_brute_force(inst in arb_spanning_instance(), x in -2.0f64..4.0, root in 0usize..4) {
            let root = root % inst.a_count();
            let all = inst.all_nodes();
            let mut eng = SpanningEngine::with_defaults(&inst);
            let r = eng.stable_spanning_profile(&all, root, x).unwrap();
            let o = brute_force_spanning_profile(&inst, &all, root, x, 1e-7).unwrap();
            prop_assert!(r.profile.max_abs_diff(&o.profile, &all) <= 1e-7);
        }

        #[test]
        fn offers_move_monotonically(inst in arb_spanning_instance(), x in -2.0f64..4.0, gap in 1e-2f64..2.0) {
            let all = inst.all_nodes();
            let mut eng = SpanningEngine::with_defaults(&inst);
            let lo = eng.stable_spanning_profile(&all, 0, x).unwrap().profile;
            let hi = eng.stable_spanning_profile(&all, 0, x + gap).unwrap().profile;
            for a in 0..inst.a_count() {
                prop_assert!(hi.a[a] - lo.a[a] > 1e-7);
            }
            for b in 0..inst.b_count() {
                prop_assert!(lo.b[b] - hi.b[b] > 1e-7);
            }
        }

        #[test]
        fn generating_functions_are_continuous(inst in arb_spanning_instance(), x in -2.0f64..4.0) {
            let all = inst.all_nodes();
            let mut eng = SpanningEngine::with_defaults(&inst);
            let base = eng.stable_spanning_profile(&all, 0, x).unwrap().profile;
            let mut last = f64::INFINITY;
            for delta in [1e-2, 1e-4, 1e-6] {
                let moved = eng.stable_spanning_profile(&all, 0, x + delta).unwrap().profile;
                let diff = base.max_abs_diff(&moved, &all);
                prop_assert!(diff < last);
                last = diff;
            }
        }

        #[test]
        fn cross_inequalities_between_stable_profiles(inst in arb_spanning_instance(), x1 in -2.0f64..4.0, x2 in -2.0f64..4.0) {
            let all = inst.all_nodes();
            let mut eng = SpanningEngine::with_defaults(&inst);
            let p1 = eng.stable_spanning_profile(&all, 0, x1).unwrap().profile;
            let p2 = eng.stable_spanning_profile(&all, 0, x2).unwrap().profile;
            for (lo, hi) in [(&p1, &p2), (&p2, &p1)] {
                // equality edges of `hi` transmit an A-side ordering to the
                // B side in reverse, and vice versa
                let eq = build_equality_subgraph(&inst.full(), hi, 1e-8).unwrap();
                for &(a, b) in eq.edges() {
                    if lo.a[a] <= hi.a[a] {
                        prop_assert!(lo.b[b] >= hi.b[b] - 1e-7);
                    }
                    if lo.a[a] < hi.a[a] - 1e-6 {
                        prop_assert!(lo.b[b] > hi.b[b]);
                    }
                    if lo.b[b] <= hi.b[b] {
                        prop_assert!(lo.a[a] >= hi.a[a] - 1e-7);
                    }
                    if lo.b[b] < hi.b[b] - 1e-6 {
                        prop_assert!(lo.a[a] > hi.a[a]);
                    }
                }
            }
        }
    }
}
