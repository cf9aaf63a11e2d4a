use proptest::prelude::*;
use swm_core::generate::{generate_instance, PayoffFamily};
use swm_core::verify::{blocking_pair_search, linear_core_oracle, verify};
use swm_core::{solve, Instance, SolverConfig};

fn family() -> impl Strategy<Value = PayoffFamily> {
    prop::sample::select(PayoffFamily::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_solve_matches_exhaustive_maximum(seed in 0u64..1_000_000, na in 1usize..=5, nb in 1usize..=5) {
        let inst = generate_instance(seed, na, nb, 0.7, PayoffFamily::Linear).unwrap();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let core = linear_core_oracle(&inst).unwrap();
        prop_assert_eq!(sol.total_weight(&inst), core.max_weight);
        let pairs: Vec<_> = sol.matching.pairs().collect();
        let issues = core.check(&inst, &pairs, &sol.profile, 1e-6);
        prop_assert!(issues.is_empty(), "{:?}", issues);
    }

    #[test]
    fn audited_outcomes_have_no_blocking_split(seed in 0u64..1_000_000, na in 1usize..=4, nb in 1usize..=4, fam in family()) {
        let inst = generate_instance(seed, na, nb, 0.6, fam).unwrap();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let report = verify(&inst, &sol, 1e-6);
        prop_assert!(report.stable && report.feasible, "{:?}", report);
        prop_assert!(blocking_pair_search(&inst, &sol.profile, 10_000, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn witnesses_survive_recheck(
        seed in 0u64..1_000_000,
        fam in family(),
        node in 0usize..8,
        cut in 0.05f64..0.9,
    ) {
        let inst = generate_instance(seed, 3, 3, 0.8, fam).unwrap();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let mut offers = sol.profile.clone();
        let n = inst.nodes().nth(node % inst.node_count()).unwrap();
        offers[n] -= cut * offers[n].abs().max(1.0);
        for w in blocking_pair_search(&inst, &offers, 1000, 1e-6).unwrap() {
            prop_assert!(w.recheck(&inst, &offers).unwrap(), "{:?}", w);
        }
    }

    #[test]
    fn f32_solutions_pass_at_f32_tolerance(seed in 0u64..1_000_000, na in 1usize..=4, nb in 1usize..=4) {
        let inst: Instance<f32> = generate_instance(seed, na, nb, 0.7, PayoffFamily::Linear).unwrap().cast();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let report = verify(&inst, &sol, 1e-3);
        prop_assert!(report.stable && report.feasible, "{:?}", report);
    }
}

#[test]
fn lowering_a_matched_offer_is_caught_by_both_checks() {
    let mut hits = 0;
    for seed in 0..40 {
        let inst = generate_instance(seed, 3, 3, 1.0, PayoffFamily::Linear).unwrap();
        let sol = solve(&inst, &SolverConfig::default()).unwrap();
        let Some((a, _)) = sol.matching.pairs().find(|&(a, _)| sol.profile.a[a] > 0.5) else {
            continue;
        };
        let mut bad = sol.clone();
        bad.profile.a[a] -= 0.25;
        bad.splits.a[a] -= 0.25;
        let report = verify(&inst, &bad, 1e-6);
        // The matched edge was tight, so its partner now gains 0.25.
        assert!(!report.feasible, "seed {seed}");
        assert!(!report.stable, "seed {seed}");
        let witnesses = blocking_pair_search(&inst, &bad.profile, 1000, 1e-6).unwrap();
        assert!(!witnesses.is_empty(), "seed {seed}");
        hits += 1;
    }
    assert!(hits > 10);
}
