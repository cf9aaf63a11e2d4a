//! Brute-force checks of a claimed solution, independent of the solver.
//!
//! [`verify`] audits the offer-form conditions edge by edge and node by
//! node, [`blocking_pair_search`] scans explicit splits on every edge, and
//! [`linear_core_oracle`] enumerates every matching of an all-identity
//! instance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId, Side};
use crate::profile::{NodeMap, StableWeightedMatching};
use crate::scalar::Scalar;

/// Default number of grid intervals per edge for [`blocking_pair_search`].
pub const DEFAULT_GRID: usize = 1000;

/// Largest side the linear oracle will enumerate.
pub const CORE_ORACLE_CAP: usize = 10;

/// An edge whose stability inequality fails in both orientations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `(a, b)`, zero-based.
    pub edge: (usize, usize),
    /// `min(v_b(a, O_a) - O_b, v_a(b, O_b) - O_a)`; NaN if a payoff could
    /// not be evaluated.
    pub magnitude: f64,
}

/// A split on an edge that gives both endpoints strictly more than their
/// current offers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockingPair {
    pub edge: (usize, usize),
    pub split_a: f64,
    pub split_b: f64,
    pub gain_a: f64,
    pub gain_b: f64,
}

impl BlockingPair {
    /// Re-evaluates the witness through the pareto payoff: holding `a` at
    /// `u_a(split_a)` must leave `b` more than its offer, and vice versa.
    pub fn recheck<T: Scalar>(&self, inst: &Instance<T>, offers: &NodeMap<T>) -> Result<bool> {
        let (a, b) = self.edge;
        let k = inst
            .edge_index(a, b)
            .ok_or_else(|| Error::InvalidArgument(format!("no edge ({a}, {b})")))?;
        let e = inst.edge(k);
        let ua = e.payoff_a.eval(T::lit(self.split_a));
        let ub = e.payoff_b.eval(T::lit(self.split_b));
        let b_gets = inst.pareto_payoff((a, b), NodeId::b(b), ua)?;
        let a_gets = inst.pareto_payoff((a, b), NodeId::a(a), ub)?;
        Ok(ua > offers.a[a] && ub > offers.b[b] && b_gets > offers.b[b] && a_gets > offers.a[a])
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerificationReport {
    pub stable: bool,
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub feasibility_issues: Vec<String>,
    pub blocking_pairs: Vec<BlockingPair>,
}

impl VerificationReport {
    /// 0 pass, 2 stability violation, 3 feasibility violation, 4 blocking
    /// pair; the first failing check wins.
    pub fn exit_code(&self) -> i32 {
        if !self.stable {
            2
        } else if !self.feasible {
            3
        } else if !self.blocking_pairs.is_empty() {
            4
        } else {
            0
        }
    }

    pub fn passed(&self) -> bool {
        self.exit_code() == 0
    }
}

fn tol<T: Scalar>(eps: T, v: T) -> T {
    eps * v.abs().max(T::one())
}

/// Audits `sol` against `inst`.
///
/// Stability: every edge must satisfy `O_b >= v_b(a, O_a)` or equivalently
/// `O_a >= v_a(b, O_b)`, each within `eps * max(1, |offer|)`; an edge is a
/// violation only when both orientations fail.
///
/// Feasibility: matched splits sum to the weight, no split or offer is
/// negative beyond `eps`, each matched node's offer is its payoff for its
/// split, and unmatched nodes have offer and split zero.
pub fn verify<T: Scalar>(inst: &Instance<T>, sol: &StableWeightedMatching<T>, eps: T) -> VerificationReport {
    let offers = &sol.profile;
    let mut violations = Vec::new();
    for (k, e) in inst.edges().iter().enumerate() {
        let (oa, ob) = (offers.a[e.a], offers.b[e.b]);
        let gap_b = inst.pareto_saturating(k, Side::B, oa).map(|v| v - ob);
        let gap_a = inst.pareto_saturating(k, Side::A, ob).map(|v| v - oa);
        match (gap_b, gap_a) {
            (Ok(gb), Ok(ga)) => {
                let holds = !(gb > tol(eps, ob)) || !(ga > tol(eps, oa));
                if !holds || gb.is_nan() || ga.is_nan() {
                    violations.push(Violation {
                        edge: (e.a, e.b),
                        magnitude: gb.min(ga).as_f64(),
                    });
                }
            }
            _ => violations.push(Violation {
                edge: (e.a, e.b),
                magnitude: f64::NAN,
            }),
        }
    }

    let mut issues = Vec::new();
    for (a, b) in sol.matching.pairs() {
        let Some(k) = inst.edge_index(a, b) else {
            issues.push(format!("matched pair (a{}, b{}) is not an edge", a + 1, b + 1));
            continue;
        };
        let e = inst.edge(k);
        let (sa, sb) = (sol.splits.a[a], sol.splits.b[b]);
        if !((sa + sb - e.weight).abs() <= tol(eps, e.weight)) {
            issues.push(format!("splits on {} sum to {} instead of {}", e.label(), sa + sb, e.weight));
        }
        for (node, s, u) in [(NodeId::a(a), sa, &e.payoff_a), (NodeId::b(b), sb, &e.payoff_b)] {
            let o = offers[node];
            if !(s >= -eps) {
                issues.push(format!("{node} has negative split {s}"));
            }
            let paid = u.eval(s);
            if !((paid - o).abs() <= tol(eps, o)) {
                issues.push(format!("{node} offers {o} but its split {s} pays {paid}"));
            }
        }
    }
    for n in inst.nodes() {
        if !(offers[n] >= -eps) {
            issues.push(format!("{n} has negative offer {}", offers[n]));
        }
        if !sol.matching.is_matched(n) {
            if !(offers[n].abs() <= eps) {
                issues.push(format!("unmatched {n} has offer {}", offers[n]));
            }
            if !(sol.splits[n].abs() <= eps) {
                issues.push(format!("unmatched {n} has split {}", sol.splits[n]));
            }
        }
    }

    VerificationReport {
        stable: violations.is_empty(),
        feasible: issues.is_empty(),
        violations,
        feasibility_issues: issues,
        blocking_pairs: Vec::new(),
    }
}

/// Scans splits `s_a = k * w / grid` for `k = 0..=grid` on every edge and
/// reports those where both endpoints gain more than `eps * max(1, |offer|)`
/// over their current offers.
pub fn blocking_pair_search<T: Scalar>(
    inst: &Instance<T>,
    offers: &NodeMap<T>,
    grid: usize,
    eps: T,
) -> Result<Vec<BlockingPair>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {grid}")));
    }
    let g = T::from_usize(grid).expect("grid size representable");
    let mut found = Vec::new();
    for e in inst.edges() {
        let (oa, ob) = (offers.a[e.a], offers.b[e.b]);
        for k in 0..=grid {
            let sa = e.weight * T::from_usize(k).expect("grid index representable") / g;
            let sb = e.weight - sa;
            let gain_a = e.payoff_a.eval(sa) - oa;
            let gain_b = e.payoff_b.eval(sb) - ob;
            if gain_a > tol(eps, oa) && gain_b > tol(eps, ob) {
                found.push(BlockingPair {
                    edge: (e.a, e.b),
                    split_a: sa.as_f64(),
                    split_b: sb.as_f64(),
                    gain_a: gain_a.as_f64(),
                    gain_b: gain_b.as_f64(),
                });
            }
        }
    }
    Ok(found)
}

/// Maximum-weight matching of an all-identity instance, found by
/// enumerating every matching.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCore {
    pub max_weight: f64,
    /// The first maximum found, `(a, b)` pairs in ascending A order.
    pub best: Vec<(usize, usize)>,
    /// Number of matchings enumerated, the empty one included.
    pub matchings: usize,
}

pub fn linear_core_oracle<T: Scalar>(inst: &Instance<T>) -> Result<LinearCore> {
    if !inst.is_all_linear_identity() {
        return Err(Error::NotLinear);
    }
    let largest = inst.a_count().max(inst.b_count());
    if largest > CORE_ORACLE_CAP {
        return Err(Error::InstanceTooLarge {
            nodes: largest,
            cap: CORE_ORACLE_CAP,
        });
    }
    let mut weights = vec![vec![None; inst.b_count()]; inst.a_count()];
    for e in inst.edges() {
        weights[e.a][e.b] = Some(e.weight.as_f64());
    }
    let mut core = LinearCore {
        max_weight: f64::NEG_INFINITY,
        best: Vec::new(),
        matchings: 0,
    };
    let mut used = vec![false; inst.b_count()];
    let mut chosen = Vec::new();
    enumerate(&weights, 0, &mut used, &mut chosen, &mut core);
    Ok(core)
}

fn enumerate(
    weights: &[Vec<Option<f64>>],
    a: usize,
    used: &mut [bool],
    chosen: &mut Vec<(usize, usize)>,
    core: &mut LinearCore,
) {
    if a == weights.len() {
        core.matchings += 1;
        // Summed in ascending A order, as the solver reports it.
        let total = chosen.iter().fold(0.0, |s, &(i, j)| s + weights[i][j].unwrap());
        if total > core.max_weight {
            core.max_weight = total;
            core.best = chosen.clone();
        }
        return;
    }
    enumerate(weights, a + 1, used, chosen, core);
    for b in 0..used.len() {
        if used[b] || weights[a][b].is_none() {
            continue;
        }
        used[b] = true;
        chosen.push((a, b));
        enumerate(weights, a + 1, used, chosen, core);
        chosen.pop();
        used[b] = false;
    }
}

impl LinearCore {
    /// Checks that `matching` has maximum weight (within `1e-9` relative)
    /// and that `offers` are nonnegative, cover every edge
    /// (`O_a + O_b >= w - tol`), split every matched edge exactly
    /// (`|O_a + O_b - w| <= tol`) and vanish on unmatched nodes.
    /// Returns the list of failures, empty on success.
    pub fn check<T: Scalar>(
        &self,
        inst: &Instance<T>,
        matching: &[(usize, usize)],
        offers: &NodeMap<T>,
        tol: f64,
    ) -> Vec<String> {
        let mut issues = Vec::new();
        let o = |n: NodeId| offers[n].as_f64();
        let mut total = 0.0;
        let mut matched_a = vec![false; inst.a_count()];
        let mut matched_b = vec![false; inst.b_count()];
        for &(a, b) in matching {
            match inst.edge_index(a, b) {
                Some(k) => {
                    let w = inst.edge(k).weight.as_f64();
                    total += w;
                    let sum = o(NodeId::a(a)) + o(NodeId::b(b));
                    if (sum - w).abs() > tol {
                        issues.push(format!("matched (a{}, b{}): offers sum to {sum}, weight {w}", a + 1, b + 1));
                    }
                }
                None => issues.push(format!("matched pair (a{}, b{}) is not an edge", a + 1, b + 1)),
            }
            if std::mem::replace(&mut matched_a[a], true) || std::mem::replace(&mut matched_b[b], true) {
                issues.push(format!("node matched twice at (a{}, b{})", a + 1, b + 1));
            }
        }
        if (total - self.max_weight).abs() > 1e-9 * self.max_weight.abs().max(1.0) {
            issues.push(format!("matching weight {total} is not the maximum {}", self.max_weight));
        }
        for e in inst.edges() {
            let sum = o(NodeId::a(e.a)) + o(NodeId::b(e.b));
            let w = e.weight.as_f64();
            if sum < w - tol {
                issues.push(format!("{}: offers sum to {sum} below weight {w}", e.label()));
            }
        }
        for n in inst.nodes() {
            if o(n) < -tol {
                issues.push(format!("{n} has negative offer {}", o(n)));
            }
            let matched = if n.is_a() { matched_a[n.index] } else { matched_b[n.index] };
            if !matched && o(n).abs() > tol {
                issues.push(format!("unmatched {n} has offer {}", o(n)));
            }
        }
        issues
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Edge;
    use crate::matching::Matching;
    use crate::payoff::PayoffFn;

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

    fn map(a: &[f64], b: &[f64]) -> NodeMap<f64> {
        let mut m = NodeMap::zeros(a.len(), b.len());
        m.a.copy_from_slice(a);
        m.b.copy_from_slice(b);
        m
    }

    fn worked_solution() -> StableWeightedMatching<f64> {
        StableWeightedMatching {
            matching: Matching::from_pairs(2, 2, [(0, 1), (1, 0)]).unwrap(),
            splits: map(&[3.0, 2.0], &[2.0, 0.0]),
            profile: map(&[3.0, 2.0], &[2.0, 0.0]),
            iterations: 1,
        }
    }

    #[test]
    fn worked_solution_passes() {
        let inst = worked();
        let sol = worked_solution();
        let report = verify(&inst, &sol, 1e-6);
        assert!(report.stable && report.feasible, "{report:?}");
        assert!(blocking_pair_search(&inst, &sol.profile, 1000, 1e-6).unwrap().is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn lowered_offer_is_a_violation() {
        let inst = worked();
        let mut sol = worked_solution();
        sol.profile.a[1] = 1.9;
        let report = verify(&inst, &sol, 1e-6);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].edge, (1, 0));
        approx::assert_abs_diff_eq!(report.violations[0].magnitude, 0.1, epsilon = 1e-12);
        assert!(!report.stable);
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn zero_weight_instance_with_empty_matching() {
        let inst = Instance::new(2, 1, vec![Edge::linear(0, 0, 0.0), Edge::linear(1, 0, 0.0)]).unwrap();
        let sol = StableWeightedMatching {
            matching: Matching::new(2, 1),
            splits: NodeMap::zeros(2, 1),
            profile: NodeMap::zeros(2, 1),
            iterations: 0,
        };
        let report = verify(&inst, &sol, 1e-6);
        assert!(report.stable && report.feasible);
        assert!(blocking_pair_search(&inst, &sol.profile, 1000, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn mis_split_edge_has_witness() {
        // The stable outcome gives the whole edge to the side with the
        // unmatched rival; a 60/40 split leaves a1 room to undercut.
        let inst = Instance::new(2, 1, vec![Edge::linear(0, 0, 1.0), Edge::linear(1, 0, 1.0)]).unwrap();
        let bad = map(&[0.6, 0.0], &[0.4]);
        let found = blocking_pair_search(&inst, &bad, 1000, 1e-6).unwrap();
        assert!(found.iter().any(|w| w.edge == (1, 0)));
        for w in &found {
            assert!(w.recheck(&inst, &bad).unwrap());
        }
        let stable = map(&[0.0, 0.0], &[1.0]);
        assert!(blocking_pair_search(&inst, &stable, 1000, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn zero_weight_edge_never_blocks() {
        let mut e = Edge::linear(0, 0, 0.0);
        e.payoff_a = PayoffFn::power(2.0, 1.5);
        e.payoff_b = PayoffFn::log1p(0.7);
        let inst = Instance::new(1, 1, vec![e]).unwrap();
        for o in [0.0, 1e-12, 1.0] {
            let offers = map(&[o], &[o]);
            assert!(blocking_pair_search(&inst, &offers, 1000, 1e-9).unwrap().is_empty());
        }
    }

    #[test]
    fn grid_needs_two_points() {
        let inst = worked();
        assert!(blocking_pair_search(&inst, &NodeMap::zeros(2, 2), 1, 1e-6).is_err());
    }

    #[test]
    fn unequal_splits_are_infeasible() {
        let inst = worked();
        let mut sol = worked_solution();
        sol.splits.a[0] = 2.5;
        let report = verify(&inst, &sol, 1e-6);
        assert!(report.stable);
        assert!(!report.feasible);
        assert_eq!(report.exit_code(), 3);
    }

    #[test]
    fn core_oracle_on_worked() {
        let inst = worked();
        let core = linear_core_oracle(&inst).unwrap();
        assert_eq!(core.max_weight, 7.0);
        assert_eq!(core.best, vec![(0, 1), (1, 0)]);
        // empty, four singletons, two perfect matchings
        assert_eq!(core.matchings, 7);
        let m = [(0, 1), (1, 0)];
        assert!(core.check(&inst, &m, &map(&[3.0, 2.0], &[2.0, 0.0]), 1e-6).is_empty());
        let issues = core.check(&inst, &m, &map(&[3.0, 2.0], &[2.0, 0.5]), 1e-6);
        assert_eq!(issues.len(), 1, "{issues:?}");
        assert!(issues[0].contains("a1, b2"));
        assert!(!core.check(&inst, &[(0, 0), (1, 1)], &map(&[3.0, 2.0], &[2.0, 0.0]), 1e-6).is_empty());
    }

    #[test]
    fn core_oracle_single_edge() {
        let inst = Instance::new(1, 1, vec![Edge::linear(0, 0, 1.0)]).unwrap();
        let core = linear_core_oracle(&inst).unwrap();
        assert_eq!(core.max_weight, 1.0);
        assert!(core.check(&inst, &[(0, 0)], &map(&[1.0], &[0.0]), 1e-6).is_empty());
    }

    #[test]
    fn core_oracle_preconditions() {
        let mut e = Edge::linear(0, 0, 1.0);
        e.payoff_a = PayoffFn::power(2.0, 1.0);
        let inst = Instance::new(1, 1, vec![e]).unwrap();
        assert_eq!(linear_core_oracle(&inst), Err(Error::NotLinear));
        let big = Instance::new(11, 1, vec![Edge::linear(0, 0, 1.0)]).unwrap();
        assert_eq!(
            linear_core_oracle(&big),
            Err(Error::InstanceTooLarge { nodes: 11, cap: 10 })
        );
    }
}
