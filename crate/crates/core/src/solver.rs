//! The generalized Hungarian iteration.
//!
//! Initialization gives every B node offer zero and every A node its best
//! pareto payoff against zero, then takes a maximum matching of the equality
//! subgraph. Unmatched A nodes with positive offers are queued as roots.
//! Each step takes the alternating tree of the first root, lowers the offers
//! on that tree to the stable spanning profile of its dominant expanding
//! node, and repairs the matching: augment from the root if possible, else
//! move the free node onto a matched A node whose offer reached zero. The
//! root leaves the queue once it is matched or its offer is zero.
//!
//! Worked 2x2 instance (weights a1b1=5, a1b2=3, a2b1=4, a2b2=1, identity
//! payoffs):
//!
//! ```text
//! t=0  O = (a1 5, a2 4 | b1 0, b2 0)  EQ = {a1b1, a2b1}  M = {a1b1}  roots = [a2]
//!      tree a2-b1-a1; expanding offers a1: 3 (via b2), a2: 1 (via b2)
//!      spanning profile from a1 at 3 gives a2 = 2 >= 1, so a1 dominates
//! t=1  O = (a1 3, a2 2 | b1 2, b2 0)  a1b2 becomes tight
//!      augmenting path a2-b1-a1-b2  M = {a1b2, a2b1}  roots = []
//! ```

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, NodeSet, Side};
use crate::matching::{
    augment_along, band, build_equality_subgraph, find_alternating_path_to, find_augmenting_path, grow_alternating_tree,
    maximum_matching, reroot, AlternatingTree, EqualitySubgraph, Matching,
};
use crate::paths::DEFAULT_ENUMERATION_CAP;
use crate::profile::{NodeMap, OfferProfile, StableWeightedMatching};
use crate::scalar::Scalar;
use crate::spanning::SpanningEngine;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Equality-subgraph band; offers at most this far from zero count as zero.
    pub eps_eq: T,
    /// Inversion tolerance. Must be at least 100 times finer than `eps_eq`.
    pub eps_inv: T,
    /// Split-sum and sign tolerance of the final reconstruction.
    pub eps_feas: T,
    /// Step limit; `None` means `4 |A| |B| |B|`.
    pub max_iterations: Option<usize>,
    /// Node-count cap for simple-path enumeration.
    pub enumeration_cap: usize,
    /// Record one [`StepRecord`] per step.
    pub trace: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            eps_eq: T::lit(T::EPS_EQ),
            eps_inv: T::lit(T::EPS_INV),
            eps_feas: T::lit(T::EPS_FEAS),
            max_iterations: None,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            trace: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_eq", self.eps_eq), ("eps_inv", self.eps_inv), ("eps_feas", self.eps_feas)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.eps_eq < T::lit(100.0) * self.eps_inv {
            return Err(Error::InvalidArgument(format!(
                "eps_eq ({}) must be at least 100 * eps_inv ({})",
                self.eps_eq, self.eps_inv
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidArgument("max_iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, inst: &Instance<T>) -> usize {
        self.max_iterations
            .unwrap_or_else(|| (4 * inst.a_count() * inst.b_count() * inst.b_count()).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub t: usize,
    pub profile: OfferProfile<T>,
    pub eq: EqualitySubgraph,
    pub matching: Matching,
    /// Unmatched A nodes with positive offers, front first.
    pub roots: VecDeque<usize>,
    /// Alternating tree of the front root, if any.
    pub tree: Option<AlternatingTree>,
}

impl<T: Scalar> SolverState<T> {
    pub fn is_done(&self) -> bool {
        self.roots.is_empty()
    }
}

/// What a step did to the matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepEvent {
    /// Initial state.
    Init,
    /// Offers changed and an augmenting path from the root grew the matching.
    Augment,
    /// The root was matched by shifting the free node onto a zero-offer node.
    Reroute,
    /// The root's offer reached zero while it stayed unmatched.
    ZeroOffer,
    /// Offers changed, the tree grew, the root is still queued.
    Grow,
    /// The front root was already matched or at zero and was dropped.
    Skip,
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub event: StepEvent,
    /// Root processed by this step (`null` for the initial record).
    pub root: Option<String>,
    pub offers: TraceOffers,
    pub matching: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOffers {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl StepRecord {
    fn snapshot<T: Scalar>(state: &SolverState<T>, event: StepEvent, root: Option<usize>) -> Self {
        StepRecord {
            t: state.t,
            event,
            root: root.map(|r| NodeId::a(r).label()),
            offers: TraceOffers {
                a: state.profile.a.iter().map(|v| v.as_f64()).collect(),
                b: state.profile.b.iter().map(|v| v.as_f64()).collect(),
            },
            matching: state.matching.pairs().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn profile<T: Scalar>(&self) -> OfferProfile<T> {
        NodeMap {
            a: self.offers.a.iter().map(|&v| T::lit(v)).collect(),
            b: self.offers.b.iter().map(|&v| T::lit(v)).collect(),
        }
    }
}

/// Parses a trace file (one JSON record per non-empty line).
pub fn parse_trace(text: &str) -> Result<Vec<StepRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("trace line {}: {e}", n + 1))))
        .collect()
}

pub fn write_trace(records: &[StepRecord]) -> String {
    records.iter().map(|r| r.to_line() + "\n").collect()
}

fn is_zero<T: Scalar>(v: T, eps: T) -> bool {
    v <= eps
}

/// Initial offers, maximum matching and root queue.
pub fn initialize<T: Scalar>(inst: &Instance<T>, config: &SolverConfig<T>) -> Result<SolverState<T>> {
    let eps = config.eps_eq;
    let mut profile = OfferProfile::zeros(inst.a_count(), inst.b_count());
    for a in 0..inst.a_count() {
        let mut best: Option<T> = None;
        for &(_, k) in inst.neighbors(NodeId::a(a)) {
            let v = inst.pareto(k, Side::A, T::zero())?;
            best = Some(best.map_or(v, |cur| cur.max(v)));
        }
        profile.a[a] = best.unwrap_or_else(T::zero);
    }
    let eq = build_equality_subgraph(&inst.full(), &profile, eps)?;
    let mut matching = maximum_matching(&eq);

    // Free every positive-offer A node that can take over a zero-offer
    // node's place in the matching.
    loop {
        let mut moved = false;
        for a in 0..inst.a_count() {
            if matching.mate_of_a(a).is_some() || is_zero(profile.a[a], eps) {
                continue;
            }
            if let Some(path) = find_alternating_path_to(&eq, &matching, a, |i| is_zero(profile.a[i], eps)) {
                matching = augment_along(&matching, &path)?;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    let roots: VecDeque<usize> = (0..inst.a_count())
        .filter(|&a| matching.mate_of_a(a).is_none() && !is_zero(profile.a[a], eps))
        .collect();
    let tree = roots.front().map(|&r| grow_alternating_tree(&eq, &matching, r)).transpose()?;
    Ok(SolverState {
        t: 0,
        profile,
        eq,
        matching,
        roots,
        tree,
    })
}

/// One iteration on the front root. Requires a non-empty root queue.
pub fn step<T: Scalar>(state: &mut SolverState<T>, inst: &Instance<T>, config: &SolverConfig<T>) -> Result<StepRecord> {
    let root = *state
        .roots
        .front()
        .ok_or_else(|| Error::InvalidArgument("step called with an empty root queue".into()))?;
    let cap = config.iteration_cap(inst);
    if state.t >= cap {
        return Err(Error::IterationCapExceeded { cap });
    }
    let eps = config.eps_eq;
    #[cfg(debug_assertions)]
    let before = (state.profile.clone(), state.matching.clone());

    let event = if state.matching.mate_of_a(root).is_some() || is_zero(state.profile.a[root], eps) {
        StepEvent::Skip
    } else if let Some(path) = find_augmenting_path(&state.eq, &state.matching, root) {
        state.matching = augment_along(&state.matching, &path)?;
        StepEvent::Augment
    } else if let Some(path) =
        find_alternating_path_to(&state.eq, &state.matching, root, |i| is_zero(state.profile.a[i], eps))
    {
        state.matching = augment_along(&state.matching, &path)?;
        StepEvent::Reroute
    } else {
        lower_tree(state, inst, config, root)?
    };

    if state.matching.mate_of_a(root).is_some() || is_zero(state.profile.a[root], eps) {
        state.roots.pop_front();
    }
    state.t += 1;
    state.tree = state
        .roots
        .front()
        .map(|&r| grow_alternating_tree(&state.eq, &state.matching, r))
        .transpose()?;

    #[cfg(debug_assertions)]
    {
        use crate::matching::max_instability;
        let (old_profile, old_matching) = before;
        let strict = T::lit(10.0) * eps;
        debug_assert!(
            max_instability(&inst.full(), &state.profile)? <= strict,
            "step {} lost stability",
            state.t
        );
        for n in inst.nodes() {
            let (old, new) = (old_profile[n], state.profile[n]);
            let ok = if n.is_a() { new <= old + band(strict, old) } else { new >= old - band(strict, old) };
            debug_assert!(ok, "offer on {n} moved the wrong way: {old} -> {new}");
            if !n.is_a() && old_matching.is_matched(n) {
                debug_assert!(state.matching.is_matched(n), "{n} lost its mate");
            }
            if !n.is_a() && state.profile[n] > eps {
                debug_assert!(state.matching.is_matched(n), "{n} has a positive offer but no mate");
            }
        }
    }
    Ok(StepRecord::snapshot(state, event, Some(root)))
}

/// Lowers the offers on the root's tree and repairs the matching.
fn lower_tree<T: Scalar>(
    state: &mut SolverState<T>,
    inst: &Instance<T>,
    config: &SolverConfig<T>,
    root: usize,
) -> Result<StepEvent> {
    let eps = config.eps_eq;
    let full = inst.full();
    let tree = grow_alternating_tree(&state.eq, &state.matching, root)?;
    let tree_nodes: NodeSet = tree.nodes().clone();

    // Every tree A node is a candidate: its floor is the best payoff it can
    // get outside the tree, and never below zero.
    let mut candidates = std::collections::BTreeMap::new();
    for a in tree_nodes.a_indices() {
        let mut eo = T::zero();
        for &(b, k) in inst.neighbors(NodeId::a(a)) {
            if !tree_nodes.contains(NodeId::b(b)) {
                eo = eo.max(inst.pareto_saturating(k, Side::A, state.profile.b[b])?);
            }
        }
        candidates.insert(a, eo);
    }

    let mut engine = SpanningEngine::new(inst, eps, config.enumeration_cap);
    let (chosen, inner) = engine.select_dominant_expander(&tree_nodes, &candidates)?;
    state.profile.overwrite_from(&inner.profile, &tree_nodes);
    state.eq = build_equality_subgraph(&full, &state.profile, eps)?;

    let tree_eq = build_equality_subgraph(&inst.restrict(tree_nodes.clone()), &state.profile, eps)?;
    let inside = reroot(&tree_eq, &inner.near_perfect_matching, chosen, root)?;
    let outside = state
        .matching
        .filtered(|a, b| !tree_nodes.contains(NodeId::a(a)) && !tree_nodes.contains(NodeId::b(b)));
    state.matching = outside.merged(&inside)?;

    if let Some(path) = find_augmenting_path(&state.eq, &state.matching, root) {
        state.matching = augment_along(&state.matching, &path)?;
        return Ok(StepEvent::Augment);
    }
    let profile = &state.profile;
    if let Some(path) = find_alternating_path_to(&state.eq, &state.matching, root, |i| is_zero(profile.a[i], eps)) {
        state.matching = augment_along(&state.matching, &path)?;
        return Ok(StepEvent::Reroute);
    }
    if is_zero(state.profile.a[root], eps) {
        return Ok(StepEvent::ZeroOffer);
    }
    Ok(StepEvent::Grow)
}

/// Splits `u^{-1}(O)` on matched edges and zero elsewhere, after checking
/// that every matched pair shares its edge weight within `eps_feas`.
pub fn reconstruct_splits<T: Scalar>(
    inst: &Instance<T>,
    matching: &Matching,
    profile: &OfferProfile<T>,
    eps_feas: T,
) -> Result<NodeMap<T>> {
    let mut splits = NodeMap::zeros(inst.a_count(), inst.b_count());
    for (a, b) in matching.pairs() {
        let k = inst
            .edge_index(a, b)
            .ok_or_else(|| Error::FeasibilityViolation(format!("matched pair (a{}, b{}) is not an edge", a + 1, b + 1)))?;
        let e = inst.edge(k);
        let sa = e.payoff_a.invert(profile.a[a])?;
        let sb = e.payoff_b.invert(profile.b[b])?;
        let label = e.label();
        if sa < -eps_feas || sb < -eps_feas {
            return Err(Error::FeasibilityViolation(format!("negative split on {label}: {sa}, {sb}")));
        }
        if (sa + sb - e.weight).abs() > band(eps_feas, e.weight) {
            return Err(Error::FeasibilityViolation(format!(
                "splits on {label} sum to {} instead of {}",
                sa + sb,
                e.weight
            )));
        }
        splits.a[a] = sa;
        splits.b[b] = sb;
    }
    for n in inst.nodes() {
        if !matching.is_matched(n) && profile[n].abs() > eps_feas {
            return Err(Error::FeasibilityViolation(format!("unmatched {n} has offer {}", profile[n])));
        }
    }
    Ok(splits)
}

/// Runs the iteration to completion, returning the solution and, if
/// `config.trace` is set, one record per state (the initial one included).
pub fn solve_traced<T: Scalar>(
    inst: &Instance<T>,
    config: &SolverConfig<T>,
) -> Result<(StableWeightedMatching<T>, Vec<StepRecord>)> {
    let mut trace = Vec::new();
    let sol = solve_recording(inst, config, &mut trace)?;
    Ok((sol, trace))
}

/// [`solve_traced`] that appends records to `trace` as it goes, so the
/// steps taken before a failure (an exceeded iteration cap, say) survive.
pub fn solve_recording<T: Scalar>(
    inst: &Instance<T>,
    config: &SolverConfig<T>,
    trace: &mut Vec<StepRecord>,
) -> Result<StableWeightedMatching<T>> {
    config.validate()?;
    let report = inst.validate();
    if !report.is_ok() {
        return Err(Error::InvalidInstance(report.issues));
    }
    let mut state = initialize(inst, config)?;
    if config.trace {
        trace.push(StepRecord::snapshot(&state, StepEvent::Init, None));
    }
    while !state.is_done() {
        let rec = step(&mut state, inst, config)?;
        if config.trace {
            trace.push(rec);
        }
    }
    let eps = config.eps_eq;
    let mut profile = state.profile;
    // Unmatched nodes end within the zero band; report them at exactly zero.
    for n in inst.nodes() {
        if !state.matching.is_matched(n) && profile[n].abs() <= eps {
            profile[n] = T::zero();
        }
    }
    let splits = reconstruct_splits(inst, &state.matching, &profile, config.eps_feas)?;
    Ok(StableWeightedMatching {
        matching: state.matching,
        splits,
        profile,
        iterations: state.t,
    })
}

pub fn solve<T: Scalar>(inst: &Instance<T>, config: &SolverConfig<T>) -> Result<StableWeightedMatching<T>> {
    solve_recording(inst, config, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Edge;
    use crate::payoff::PayoffFn;
    use approx::assert_abs_diff_eq;

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

    #[test]
    fn worked_initialization() {
        let inst = worked();
        let s = initialize(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(s.profile.a, vec![5.0, 4.0]);
        assert_eq!(s.profile.b, vec![0.0, 0.0]);
        assert_eq!(s.eq.edges(), &[(0, 0), (1, 0)]);
        assert_eq!(s.matching.len(), 1);
        assert_eq!(s.roots, VecDeque::from([1]));
        assert_eq!(s.tree.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn worked_single_step() {
        let inst = worked();
        let cfg = SolverConfig::default();
        let mut s = initialize(&inst, &cfg).unwrap();
        let rec = step(&mut s, &inst, &cfg).unwrap();
        assert_eq!(rec.event, StepEvent::Augment);
        assert_eq!(rec.root.as_deref(), Some("a2"));
        for (got, want) in s.profile.a.iter().chain(&s.profile.b).zip([3.0, 2.0, 2.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(s.matching.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert!(s.is_done());
        assert!(step(&mut s, &inst, &cfg).is_err());
    }

    #[test]
    fn worked_solve() {
        let inst = worked();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(sol.matching.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(sol.total_weight(&inst), 7.0);
        assert!(sol.iterations <= 3);
        for (got, want) in sol.splits.a.iter().chain(&sol.splits.b).zip([3.0, 2.0, 2.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_edges() {
        let lin = Instance::new(1, 1, vec![Edge::linear(0, 0, 1.0)]).unwrap();
        let s = initialize(&lin, &SolverConfig::default()).unwrap();
        assert!(s.roots.is_empty() && s.matching.len() == 1);
        let sol = solve(&lin, &SolverConfig::default()).unwrap();
        assert_eq!((sol.profile.a[0], sol.profile.b[0]), (1.0, 0.0));
        assert_eq!((sol.splits.a[0], sol.splits.b[0]), (1.0, 0.0));

        let mut e = Edge::linear(0, 0, 1.0);
        e.payoff_b = PayoffFn::power(0.5, 1.0);
        let sqrt = Instance::new(1, 1, vec![e]).unwrap();
        let sol = solve(&sqrt, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(sol.profile.a[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.profile.b[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.splits.a[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_weight_edge_leaves_nothing_to_do() {
        let inst = Instance::new(1, 1, vec![Edge::linear(0, 0, 0.0)]).unwrap();
        let s = initialize(&inst, &SolverConfig::default()).unwrap();
        assert!(s.roots.is_empty());
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        assert_eq!((sol.profile.a[0], sol.profile.b[0]), (0.0, 0.0));
        assert_eq!((sol.splits.a[0], sol.splits.b[0]), (0.0, 0.0));
    }

    #[test]
    fn root_driven_to_zero_is_dropped_unmatched() {
        // a1 and a2 compete for b1 of weight 1; a2 also sees a zero-weight
        // b2. After one step a1 keeps b1 and a2 falls to zero.
        let inst = Instance::new(
            2,
            2,
            vec![Edge::linear(0, 0, 1.0), Edge::linear(1, 0, 1.0), Edge::linear(1, 1, 0.0)],
        )
        .unwrap();
        let cfg = SolverConfig { trace: true, ..SolverConfig::default() };
        let (sol, trace) = solve_traced(&inst, &cfg).unwrap();
        assert_eq!(trace[0].event, StepEvent::Init);
        assert!(sol.profile.a.iter().all(|&v: &f64| v.abs() <= 1e-12 || (v - 1.0).abs() <= 1e-12));
        assert_abs_diff_eq!(sol.profile.a[0] + sol.profile.b[0], 1.0, epsilon = 1e-12);
        assert_eq!(sol.matching.len(), 2);
        assert!(crate::matching::max_instability(&inst.full(), &sol.profile).unwrap() <= 1e-8);
    }

    #[test]
    fn reconstruct_rejects_infeasible_profiles() {
        let inst = worked();
        let m = Matching::from_pairs(2, 2, [(0, 1), (1, 0)]).unwrap();
        let good = NodeMap { a: vec![3.0, 2.0], b: vec![2.0, 0.0] };
        let s = reconstruct_splits(&inst, &m, &good, 1e-6).unwrap();
        assert_eq!(s, good);
        let bad_sum = NodeMap { a: vec![3.0, 2.0], b: vec![2.0, 0.5] };
        assert!(matches!(reconstruct_splits(&inst, &m, &bad_sum, 1e-6), Err(Error::FeasibilityViolation(_))));
        let negative = NodeMap { a: vec![3.5, 2.0], b: vec![2.0, -0.5] };
        assert!(matches!(reconstruct_splits(&inst, &m, &negative, 1e-6), Err(Error::FeasibilityViolation(_))));
        let half = Matching::from_pairs(2, 2, [(1, 0)]).unwrap();
        assert!(matches!(reconstruct_splits(&inst, &half, &good, 1e-6), Err(Error::FeasibilityViolation(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::<f64>::default().validate().is_ok());
        assert!(SolverConfig::<f32>::default().validate().is_ok());
        let tight = SolverConfig { eps_eq: 1e-9, ..SolverConfig::<f64>::default() };
        assert!(tight.validate().is_err());
        let zero = SolverConfig { eps_feas: 0.0, ..SolverConfig::<f64>::default() };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let inst = worked();
        let cfg = SolverConfig { max_iterations: Some(1), ..SolverConfig::default() };
        assert!(solve(&inst, &cfg).is_ok());
        let mut s = initialize(&inst, &cfg).unwrap();
        s.t = 1;
        assert!(matches!(step(&mut s, &inst, &cfg), Err(Error::IterationCapExceeded { cap: 1 })));
    }

    #[test]
    fn cap_overrun_keeps_partial_trace() {
        let (inst, steps) = (0..50)
            .map(|seed| crate::generate::generate_instance(seed, 3, 3, 1.0, crate::generate::PayoffFamily::Linear).unwrap())
            .map(|inst| {
                let n = solve(&inst, &SolverConfig::default()).unwrap().iterations;
                (inst, n)
            })
            .find(|&(_, n)| n >= 2)
            .expect("some instance needs two steps");
        let cfg = SolverConfig { max_iterations: Some(steps - 1), trace: true, ..SolverConfig::default() };
        let mut trace = Vec::new();
        let err = solve_recording(&inst, &cfg, &mut trace).unwrap_err();
        assert_eq!(err, Error::IterationCapExceeded { cap: steps - 1 });
        assert_eq!(trace.len(), steps);
        assert_eq!(trace[0].event, StepEvent::Init);
    }

    #[test]
    fn f32_worked() {
        let inst: Instance<f32> = worked().cast();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(sol.matching.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        for (got, want) in sol.profile.a.iter().chain(&sol.profile.b).zip([3.0f32, 2.0, 2.0, 0.0]) {
            let (got, want): (f32, f32) = (*got, want);
            assert!((got - want).abs() <= 1e-4);
        }
    }

    #[test]
    fn trace_roundtrip() {
        let inst = worked();
        let cfg = SolverConfig { trace: true, ..SolverConfig::default() };
        let (_, trace) = solve_traced(&inst, &cfg).unwrap();
        let text = write_trace(&trace);
        assert_eq!(parse_trace(&text).unwrap(), trace);
        assert_eq!(text.lines().count(), 2);
        assert!(parse_trace("{").is_err());
    }
}
