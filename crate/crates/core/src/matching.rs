//! Equality subgraphs, matchings, alternating trees and Hungarian forests.
//!
//! All iteration is in ascending node index so every structure built here
//! is reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, NodeSet, Side, SubInstance};
use crate::profile::OfferProfile;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    mate_a: Vec<Option<usize>>,
    mate_b: Vec<Option<usize>>,
}

impl Matching {
    pub fn new(a_count: usize, b_count: usize) -> Self {
        Matching {
            mate_a: vec![None; a_count],
            mate_b: vec![None; b_count],
        }
    }

    /// Builds a matching from `(a, b)` pairs; fails if a node is used twice.
    pub fn from_pairs(
        a_count: usize,
        b_count: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut m = Matching::new(a_count, b_count);
        for (a, b) in pairs {
            if a >= a_count || b >= b_count {
                return Err(Error::InvalidArgument(format!("pair ({a}, {b}) out of range")));
            }
            if m.mate_a[a].is_some() || m.mate_b[b].is_some() {
                return Err(Error::InvalidArgument(format!(
                    "pair ({a}, {b}) shares a node with another matched edge"
                )));
            }
            m.insert(a, b);
        }
        Ok(m)
    }

    pub fn mate_of_a(&self, a: usize) -> Option<usize> {
        self.mate_a[a]
    }

    pub fn mate_of_b(&self, b: usize) -> Option<usize> {
        self.mate_b[b]
    }

    pub fn mate(&self, node: NodeId) -> Option<NodeId> {
        match node.side {
            Side::A => self.mate_a[node.index].map(NodeId::b),
            Side::B => self.mate_b[node.index].map(NodeId::a),
        }
    }

    pub fn is_matched(&self, node: NodeId) -> bool {
        self.mate(node).is_some()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.mate_a[a] == Some(b)
    }

    fn insert(&mut self, a: usize, b: usize) {
        debug_assert!(self.mate_a[a].is_none() && self.mate_b[b].is_none());
        self.mate_a[a] = Some(b);
        self.mate_b[b] = Some(a);
    }

    fn remove(&mut self, a: usize, b: usize) {
        debug_assert!(self.contains(a, b));
        self.mate_a[a] = None;
        self.mate_b[b] = None;
    }

    /// Matched pairs in ascending A order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate_a
            .iter()
            .enumerate()
            .filter_map(|(a, m)| m.map(|b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.mate_a.iter().filter(|m| m.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keeps only pairs for which `keep(a, b)` holds.
    pub fn filtered(&self, keep: impl Fn(usize, usize) -> bool) -> Matching {
        let mut m = Matching::new(self.mate_a.len(), self.mate_b.len());
        for (a, b) in self.pairs() {
            if keep(a, b) {
                m.insert(a, b);
            }
        }
        m
    }

    /// Union with a node-disjoint matching.
    pub fn merged(&self, other: &Matching) -> Result<Matching> {
        Matching::from_pairs(
            self.mate_a.len(),
            self.mate_b.len(),
            self.pairs().chain(other.pairs()),
        )
    }
}

/// Edges `(a, b)` of a subinstance on which the stability inequality is
/// tight: `|O_b - v_b(a, O_a)| <= tolerance * max(1, |O_b|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualitySubgraph {
    nodes: NodeSet,
    adj_a: Vec<Vec<usize>>,
    adj_b: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    pub tolerance: f64,
}

impl EqualitySubgraph {
    /// Builds an equality subgraph from an explicit edge list.
    pub fn from_edges(
        nodes: NodeSet,
        a_count: usize,
        b_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        tolerance: f64,
    ) -> Self {
        let mut adj_a = vec![Vec::new(); a_count];
        let mut adj_b = vec![Vec::new(); b_count];
        let mut list: Vec<(usize, usize)> = edges.into_iter().collect();
        list.sort_unstable();
        list.dedup();
        for &(a, b) in &list {
            adj_a[a].push(b);
            adj_b[b].push(a);
        }
        for l in adj_b.iter_mut() {
            l.sort_unstable();
        }
        EqualitySubgraph {
            nodes,
            adj_a,
            adj_b,
            edges: list,
            tolerance,
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn a_count(&self) -> usize {
        self.adj_a.len()
    }

    pub fn b_count(&self) -> usize {
        self.adj_b.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.adj_a[a].binary_search(&b).is_ok()
    }

    pub fn neighbors(&self, node: NodeId) -> &[usize] {
        match node.side {
            Side::A => &self.adj_a[node.index],
            Side::B => &self.adj_b[node.index],
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.nodes.iter().next() else {
            return true;
        };
        let mut seen = NodeSet::empty(self.a_count(), self.b_count());
        seen.insert(start);
        let mut count = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for &n in self.neighbors(node) {
                let next = NodeId {
                    side: node.side.other(),
                    index: n,
                };
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

/// Scaled residuals of edge `k` from both endpoints:
/// `(v_b(a, O_a) - O_b) / max(1, |O_b|)` and `(v_a(b, O_b) - O_a) / max(1, |O_a|)`.
///
/// Both vanish together and are positive together. Numerically each
/// multiplies rounding error by the ratio of the two payoff slopes, one
/// way or the other, so callers use whichever is better conditioned.
pub fn edge_residuals<T: Scalar>(inst: &Instance<T>, k: usize, profile: &OfferProfile<T>) -> Result<(T, T)> {
    let e = inst.edge(k);
    let (oa, ob) = (profile.a[e.a], profile.b[e.b]);
    let rb = (inst.pareto_saturating(k, Side::B, oa)? - ob) / band(T::one(), ob);
    let ra = (inst.pareto_saturating(k, Side::A, ob)? - oa) / band(T::one(), oa);
    Ok((rb, ra))
}

/// Equality subgraph of `profile` on the edges of `sub`: edges where either
/// scaled residual is within `eps_eq`.
pub fn build_equality_subgraph<T: Scalar>(
    sub: &SubInstance<'_, T>,
    profile: &OfferProfile<T>,
    eps_eq: T,
) -> Result<EqualitySubgraph> {
    let inst = sub.instance();
    let mut edges = Vec::new();
    for k in sub.edge_indices() {
        let e = inst.edge(k);
        let (rb, ra) = edge_residuals(inst, k, profile)?;
        if rb.abs() <= eps_eq || ra.abs() <= eps_eq {
            edges.push((e.a, e.b));
        }
    }
    Ok(EqualitySubgraph::from_edges(
        sub.nodes().clone(),
        inst.a_count(),
        inst.b_count(),
        edges,
        eps_eq.as_f64(),
    ))
}

/// Tolerance band around `value`: absolute for offers up to one in
/// magnitude, relative beyond.
#[inline]
pub fn band<T: Scalar>(eps: T, value: T) -> T {
    eps * value.abs().max(T::one())
}

/// Stability violation of edge `k`: the smaller of its two scaled
/// residuals (zero or negative when stable). NaN if an offer is undefined.
pub fn edge_instability<T: Scalar>(inst: &Instance<T>, k: usize, profile: &OfferProfile<T>) -> Result<T> {
    let (rb, ra) = edge_residuals(inst, k, profile)?;
    if rb.is_nan() || ra.is_nan() {
        return Ok(T::nan());
    }
    Ok(rb.min(ra))
}

/// Largest [`edge_instability`] over the edges of `sub`.
pub fn max_instability<T: Scalar>(sub: &SubInstance<'_, T>, profile: &OfferProfile<T>) -> Result<T> {
    let inst = sub.instance();
    let mut worst = T::neg_infinity();
    for k in sub.edge_indices() {
        let gap = edge_instability(inst, k, profile)?;
        if gap > worst || gap.is_nan() {
            worst = gap;
        }
    }
    Ok(worst)
}

pub fn is_stable<T: Scalar>(sub: &SubInstance<'_, T>, profile: &OfferProfile<T>, eps: T) -> Result<bool> {
    let worst = max_instability(sub, profile)?;
    Ok(!worst.is_nan() && worst <= eps)
}

/// Maximum-cardinality matching of `eq` by repeated shortest augmenting
/// paths, seeded from unmatched A nodes in ascending order.
pub fn maximum_matching(eq: &EqualitySubgraph) -> Matching {
    let mut m = Matching::new(eq.a_count(), eq.b_count());
    for a in eq.nodes.a_indices().collect::<Vec<_>>() {
        if m.mate_of_a(a).is_some() {
            continue;
        }
        if let Some(path) = find_augmenting_path(eq, &m, a) {
            m = augment_along(&m, &path).expect("augmenting path from BFS alternates");
        }
    }
    m
}

/// Extends a matching to maximum cardinality within `eq`.
pub fn complete_matching(eq: &EqualitySubgraph, start: &Matching) -> Matching {
    let mut m = start.clone();
    loop {
        let mut improved = false;
        for a in eq.nodes.a_indices().collect::<Vec<_>>() {
            if m.mate_of_a(a).is_some() {
                continue;
            }
            if let Some(path) = find_augmenting_path(eq, &m, a) {
                m = augment_along(&m, &path).expect("augmenting path from BFS alternates");
                improved = true;
            }
        }
        if !improved {
            return m;
        }
    }
}

/// Swaps matched and unmatched edges along `path`.
///
/// The path must start at an unmatched A node, its edges must alternate
/// unmatched/matched, and it must end either at an unmatched B node
/// (augmenting, size grows by one) or with a matched edge into an A node
/// (size unchanged, the end node becomes unmatched).
pub fn augment_along(matching: &Matching, path: &[NodeId]) -> Result<Matching> {
    if path.len() <= 1 {
        return Ok(matching.clone());
    }
    let fail = |msg: &str| Error::NotAlternating(format!("{msg}: {}", format_path(path)));
    if !path[0].is_a() {
        return Err(fail("path must start on side A"));
    }
    if matching.is_matched(path[0]) {
        return Err(fail("path start is matched"));
    }
    let mut pairs = Vec::with_capacity(path.len() - 1);
    for (k, w) in path.windows(2).enumerate() {
        let (x, y) = (w[0], w[1]);
        if x.side == y.side {
            return Err(fail("consecutive nodes on the same side"));
        }
        let (a, b) = if x.is_a() { (x.index, y.index) } else { (y.index, x.index) };
        let matched = matching.contains(a, b);
        let should_be_matched = k % 2 == 1;
        if matched != should_be_matched {
            return Err(fail("edges do not alternate"));
        }
        pairs.push((a, b, matched));
    }
    let last = *path.last().expect("non-empty");
    if !last.is_a() && matching.is_matched(last) {
        return Err(fail("path ends at a matched B node"));
    }
    let mut m = matching.clone();
    for &(a, b, matched) in &pairs {
        if matched {
            m.remove(a, b);
        }
    }
    for &(a, b, matched) in &pairs {
        if !matched {
            m.insert(a, b);
        }
    }
    Ok(m)
}

pub(crate) fn format_path(path: &[NodeId]) -> String {
    path.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-")
}

/// Alternating tree: every path from the unmatched root alternates
/// unmatched/matched edges, each B node has exactly one child (its mate),
/// and all leaves are A nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingTree {
    pub root: usize,
    nodes: NodeSet,
    /// Parent of each tree A node (its mate), `None` for the root.
    a_parent: Vec<Option<usize>>,
    /// Parent of each tree B node.
    b_parent: Vec<Option<usize>>,
    depth_a: Vec<usize>,
    depth_b: Vec<usize>,
    /// Nodes in BFS discovery order.
    order: Vec<NodeId>,
}

impl AlternatingTree {
    fn singleton(a_count: usize, b_count: usize, root: usize) -> Self {
        let mut nodes = NodeSet::empty(a_count, b_count);
        nodes.insert(NodeId::a(root));
        AlternatingTree {
            root,
            nodes,
            a_parent: vec![None; a_count],
            b_parent: vec![None; b_count],
            depth_a: vec![0; a_count],
            depth_b: vec![0; b_count],
            order: vec![NodeId::a(root)],
        }
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.contains(node)
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn a_nodes(&self) -> Vec<usize> {
        self.nodes.a_indices().collect()
    }

    pub fn b_nodes(&self) -> Vec<usize> {
        self.nodes.b_indices().collect()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        if !self.contains(node) {
            return None;
        }
        match node.side {
            Side::A => self.a_parent[node.index].map(NodeId::b),
            Side::B => self.b_parent[node.index].map(NodeId::a),
        }
    }

    pub fn depth(&self, node: NodeId) -> Option<usize> {
        self.contains(node).then(|| match node.side {
            Side::A => self.depth_a[node.index],
            Side::B => self.depth_b[node.index],
        })
    }

    /// Tree path from the root to `node`, inclusive.
    pub fn path_from_root(&self, node: NodeId) -> Option<Vec<NodeId>> {
        if !self.contains(node) {
            return None;
        }
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Checks the structural invariants against the matching it was grown
    /// from. Returns a description of the first violation.
    pub fn check_invariants(&self, eq: &EqualitySubgraph, matching: &Matching) -> Result<(), String> {
        if matching.is_matched(NodeId::a(self.root)) {
            return Err("root is matched".into());
        }
        if self.nodes.a_len() != self.nodes.b_len() + 1 {
            return Err(format!(
                "|A^T| = {} but |B^T| = {}",
                self.nodes.a_len(),
                self.nodes.b_len()
            ));
        }
        for b in self.nodes.b_indices() {
            let parent = self.b_parent[b].ok_or("B node without parent")?;
            if !eq.contains(parent, b) || matching.contains(parent, b) {
                return Err(format!("edge into {} is not an unmatched equality edge", NodeId::b(b)));
            }
            let child = matching.mate_of_b(b).ok_or("tree B node is unmatched")?;
            if !self.nodes.contains(NodeId::a(child)) || self.a_parent[child] != Some(b) {
                return Err(format!("{} does not have its mate as only child", NodeId::b(b)));
            }
            let children = self
                .nodes
                .a_indices()
                .filter(|&a| self.a_parent[a] == Some(b))
                .count();
            if children != 1 {
                return Err(format!("{} has {children} children", NodeId::b(b)));
            }
            if self.depth_b[b] % 2 != 1 {
                return Err(format!("{} at even depth", NodeId::b(b)));
            }
        }
        for a in self.nodes.a_indices() {
            if self.depth_a[a] % 2 != 0 {
                return Err(format!("{} at odd depth", NodeId::a(a)));
            }
        }
        Ok(())
    }
}

/// Alternating tree rooted at an unmatched A node: BFS over `eq`, children
/// in ascending index. Unmatched B nodes are never added (reaching one means
/// an augmenting path exists; see [`find_augmenting_path`]).
pub fn grow_alternating_tree(eq: &EqualitySubgraph, matching: &Matching, root: usize) -> Result<AlternatingTree> {
    grow_excluding(eq, matching, root, None)
}

fn grow_excluding(
    eq: &EqualitySubgraph,
    matching: &Matching,
    root: usize,
    claimed: Option<&NodeSet>,
) -> Result<AlternatingTree> {
    if matching.mate_of_a(root).is_some() {
        return Err(Error::RootMatched(NodeId::a(root).to_string()));
    }
    let mut tree = AlternatingTree::singleton(eq.a_count(), eq.b_count(), root);
    let mut queue = VecDeque::from([root]);
    let free = |n: NodeId| claimed.map_or(true, |c| !c.contains(n));
    while let Some(a) = queue.pop_front() {
        for &b in eq.neighbors(NodeId::a(a)) {
            let bn = NodeId::b(b);
            if tree.nodes.contains(bn) || !free(bn) {
                continue;
            }
            let Some(mate) = matching.mate_of_b(b) else {
                continue;
            };
            if mate == a {
                continue;
            }
            let an = NodeId::a(mate);
            if !free(an) {
                continue;
            }
            tree.nodes.insert(bn);
            tree.b_parent[b] = Some(a);
            tree.depth_b[b] = tree.depth_a[a] + 1;
            tree.order.push(bn);
            tree.nodes.insert(an);
            tree.a_parent[mate] = Some(b);
            tree.depth_a[mate] = tree.depth_b[b] + 1;
            tree.order.push(an);
            queue.push_back(mate);
        }
    }
    Ok(tree)
}

/// Shortest augmenting path from the unmatched A node `root` (lowest indices
/// first among equal lengths).
pub fn find_augmenting_path(eq: &EqualitySubgraph, matching: &Matching, root: usize) -> Option<Vec<NodeId>> {
    if matching.mate_of_a(root).is_some() {
        return None;
    }
    let mut b_parent: Vec<Option<usize>> = vec![None; eq.b_count()];
    let mut seen_a = vec![false; eq.a_count()];
    seen_a[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        for &b in eq.neighbors(NodeId::a(a)) {
            if b_parent[b].is_some() || matching.mate_of_a(a) == Some(b) {
                continue;
            }
            b_parent[b] = Some(a);
            match matching.mate_of_b(b) {
                None => {
                    let mut path = vec![NodeId::b(b)];
                    let mut cur_a = a;
                    loop {
                        path.push(NodeId::a(cur_a));
                        if cur_a == root {
                            break;
                        }
                        let mb = matching.mate_of_a(cur_a).expect("interior A nodes are matched");
                        path.push(NodeId::b(mb));
                        cur_a = b_parent[mb].expect("visited B has a parent");
                    }
                    path.reverse();
                    return Some(path);
                }
                Some(next) if !seen_a[next] => {
                    seen_a[next] = true;
                    queue.push_back(next);
                }
                Some(_) => {}
            }
        }
    }
    None
}

/// Alternating path from the unmatched `root` to the first matched A node
/// (BFS order) satisfying `target`.
pub fn find_alternating_path_to(
    eq: &EqualitySubgraph,
    matching: &Matching,
    root: usize,
    target: impl Fn(usize) -> bool,
) -> Option<Vec<NodeId>> {
    let tree = grow_alternating_tree(eq, matching, root).ok()?;
    tree.order()
        .iter()
        .find(|n| n.is_a() && n.index != root && target(n.index))
        .and_then(|&n| tree.path_from_root(n))
}

/// Moves the unmatched node of a tree from `from` to `to` by swapping along
/// the alternating path between them.
pub fn reroot(eq: &EqualitySubgraph, matching: &Matching, from: usize, to: usize) -> Result<Matching> {
    if from == to {
        return Ok(matching.clone());
    }
    let tree = grow_alternating_tree(eq, matching, from)?;
    let path = tree.path_from_root(NodeId::a(to)).ok_or_else(|| {
        Error::NotAlternating(format!(
            "{} is not reachable from {} by an alternating path",
            NodeId::a(to),
            NodeId::a(from)
        ))
    })?;
    augment_along(matching, &path)
}

/// Node-disjoint alternating trees, one per root, grown in the given order;
/// a node reachable from several roots belongs to the first one.
#[derive(Debug, Clone, PartialEq)]
pub struct HungarianForest {
    pub trees: Vec<AlternatingTree>,
}

impl HungarianForest {
    pub fn build(eq: &EqualitySubgraph, matching: &Matching, roots: &[usize]) -> Result<Self> {
        let mut claimed = NodeSet::empty(eq.a_count(), eq.b_count());
        let mut trees = Vec::with_capacity(roots.len());
        for &r in roots {
            let tree = grow_excluding(eq, matching, r, Some(&claimed))?;
            for n in tree.order() {
                claimed.insert(*n);
            }
            trees.push(tree);
        }
        Ok(HungarianForest { trees })
    }

    /// Forest rooted at every unmatched A node of the subgraph.
    pub fn over_unmatched(eq: &EqualitySubgraph, matching: &Matching) -> Result<Self> {
        let roots: Vec<usize> = eq
            .nodes()
            .a_indices()
            .filter(|&a| matching.mate_of_a(a).is_none())
            .collect();
        Self::build(eq, matching, &roots)
    }

    pub fn nodes(&self, a_count: usize, b_count: usize) -> NodeSet {
        let mut s = NodeSet::empty(a_count, b_count);
        for t in &self.trees {
            for n in t.order() {
                s.insert(*n);
            }
        }
        s
    }
}

/// Expanding offers of a tree: for each tree A node with an edge of `sub`
/// leaving the tree, the best pareto payoff it could get from an outside B
/// node, `max_j v_a(j, O_j)`.
pub fn expanding_nodes<T: Scalar>(
    sub: &SubInstance<'_, T>,
    tree: &AlternatingTree,
    profile: &OfferProfile<T>,
) -> Result<BTreeMap<usize, T>> {
    let inst = sub.instance();
    let mut out = BTreeMap::new();
    for a in tree.nodes().a_indices() {
        let mut best: Option<T> = None;
        for (b, k) in sub.neighbors(NodeId::a(a)) {
            if tree.contains(NodeId::b(b)) {
                continue;
            }
            let v = inst.pareto_saturating(k, Side::A, profile.b[b])?;
            best = Some(match best {
                Some(cur) if cur >= v => cur,
                _ => v,
            });
        }
        if let Some(v) = best {
            out.insert(a, v);
        }
    }
    Ok(out)
}

/// Outside B nodes adjacent (in `sub`) to some tree A node.
pub fn joining_nodes<T: Scalar>(sub: &SubInstance<'_, T>, tree: &AlternatingTree) -> BTreeSet<usize> {
    tree.nodes()
        .a_indices()
        .flat_map(|a| sub.neighbors(NodeId::a(a)).map(|(b, _)| b).collect::<Vec<_>>())
        .filter(|&b| !tree.contains(NodeId::b(b)))
        .collect()
}

/// True iff `profile` is stable on `sub`, its equality subgraph has a
/// near-perfect matching, and that matching has an alternating tree spanning
/// every node of `sub`.
pub fn check_spanning_tree_profile<T: Scalar>(
    sub: &SubInstance<'_, T>,
    profile: &OfferProfile<T>,
    eps_eq: T,
) -> Result<bool> {
    let (na, nb) = (sub.nodes().a_len(), sub.nodes().b_len());
    if na != nb + 1 {
        return Err(Error::SideSizeMismatch { a: na, b: nb });
    }
    if !profile.is_defined_on(sub.nodes()) || !is_stable(sub, profile, eps_eq)? {
        return Ok(false);
    }
    let eq = build_equality_subgraph(sub, profile, eps_eq)?;
    let m = maximum_matching(&eq);
    if m.len() != nb {
        return Ok(false);
    }
    let root = sub
        .nodes()
        .a_indices()
        .find(|&a| m.mate_of_a(a).is_none())
        .expect("near-perfect matching leaves one A node free");
    let tree = grow_alternating_tree(&eq, &m, root)?;
    Ok(tree.len() == sub.node_count())
}
