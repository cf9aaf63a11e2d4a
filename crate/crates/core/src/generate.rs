//! Seeded random instances.
//!
//! All randomness comes from one `ChaCha8Rng` seeded from the caller's seed,
//! with draws made in a fixed order, so output is identical across runs and
//! platforms.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};
use crate::payoff::PayoffFn;

const MAX_RETRIES: usize = 100;
const MAX_WEIGHT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffFamily {
    /// Identity payoffs on both endpoints.
    Linear,
    Power,
    Log1p,
    Piecewise,
    /// Each endpoint independently draws power, log1p or piecewise.
    Mixed,
}

impl PayoffFamily {
    pub const ALL: [PayoffFamily; 5] = [
        PayoffFamily::Linear,
        PayoffFamily::Power,
        PayoffFamily::Log1p,
        PayoffFamily::Piecewise,
        PayoffFamily::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PayoffFamily::Linear => "linear",
            PayoffFamily::Power => "power",
            PayoffFamily::Log1p => "log1p",
            PayoffFamily::Piecewise => "piecewise",
            PayoffFamily::Mixed => "mixed",
        }
    }
}

impl fmt::Display for PayoffFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayoffFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PayoffFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown payoff family '{s}'")))
    }
}

fn draw_payoff(rng: &mut ChaCha8Rng, family: PayoffFamily) -> PayoffFn<f64> {
    match family {
        PayoffFamily::Linear => PayoffFn::identity(),
        PayoffFamily::Power => {
            // open interval (0.3, 3.0)
            let mut exponent = rng.gen_range(0.3..3.0);
            if exponent == 0.3 {
                exponent = 1.0;
            }
            PayoffFn::power(exponent, rng.gen_range(0.5..2.0))
        }
        PayoffFamily::Log1p => PayoffFn::log1p(rng.gen_range(0.5..2.0)),
        PayoffFamily::Piecewise => {
            let n = rng.gen_range(1..=3);
            let mut breakpoints: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..MAX_WEIGHT)).collect();
            breakpoints.sort_by(f64::total_cmp);
            breakpoints.dedup();
            let slopes = (0..=breakpoints.len()).map(|_| rng.gen_range(0.2..3.0)).collect();
            PayoffFn::piecewise(breakpoints, slopes).expect("sorted breakpoints and positive slopes")
        }
        PayoffFamily::Mixed => {
            let pick = [PayoffFamily::Power, PayoffFamily::Log1p, PayoffFamily::Piecewise][rng.gen_range(0..3)];
            draw_payoff(rng, pick)
        }
    }
}

fn draw_edge(rng: &mut ChaCha8Rng, a: usize, b: usize, family: PayoffFamily) -> Edge<f64> {
    let mut e = Edge::linear(a, b, rng.gen_range(0.0..=MAX_WEIGHT));
    e.payoff_a = draw_payoff(rng, family);
    e.payoff_b = draw_payoff(rng, family);
    e
}

/// Random connected instance: each of the `na * nb` possible edges is kept
/// with probability `density`, re-drawn until the graph is connected.
pub fn generate_instance(seed: u64, na: usize, nb: usize, density: f64, family: PayoffFamily) -> Result<Instance<f64>> {
    if na == 0 || nb == 0 {
        return Err(Error::InvalidArgument("both sides need at least one node".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!("density {density} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let mut edges = Vec::new();
        for a in 0..na {
            for b in 0..nb {
                if density >= 1.0 || rng.gen_bool(density) {
                    edges.push(draw_edge(&mut rng, a, b, family));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let inst = Instance::new(na, nb, edges)?;
        if inst.is_connected() {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no connected {na}x{nb} graph at density {density} after {MAX_RETRIES} attempts"
    )))
}

/// Random instance with `nb + 1` A nodes and `nb` B nodes that contains a
/// spanning tree in which every B node has degree two (so every B node sits
/// between two A nodes), plus extra edges kept with probability
/// `extra_density`. Node labels are shuffled.
pub fn generate_spanning_instance(seed: u64, nb: usize, extra_density: f64, family: PayoffFamily) -> Result<Instance<f64>> {
    if !(0.0..=1.0).contains(&extra_density) {
        return Err(Error::InvalidArgument(format!("density {extra_density} outside [0, 1]")));
    }
    let na = nb + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a_perm: Vec<usize> = (0..na).collect();
    let mut b_perm: Vec<usize> = (0..nb).collect();
    a_perm.shuffle(&mut rng);
    b_perm.shuffle(&mut rng);

    let mut present = vec![vec![false; nb]; na];
    for b in 0..nb {
        // A nodes 0..=b are already in the tree; b + 1 joins through b.
        let old = rng.gen_range(0..=b);
        present[a_perm[old]][b_perm[b]] = true;
        present[a_perm[b + 1]][b_perm[b]] = true;
    }
    let mut edges = Vec::new();
    for (a, row) in present.iter_mut().enumerate() {
        for (b, p) in row.iter_mut().enumerate() {
            if !*p && extra_density > 0.0 && rng.gen_bool(extra_density) {
                *p = true;
            }
            if *p {
                edges.push(draw_edge(&mut rng, a, b, family));
            }
        }
    }
    Instance::new(na, nb, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_instance;

    #[test]
    fn same_seed_same_instance() {
        for family in PayoffFamily::ALL {
            let a = generate_instance(7, 3, 3, 0.6, family).unwrap();
            let b = generate_instance(7, 3, 3, 0.6, family).unwrap();
            assert_eq!(write_instance(&a), write_instance(&b));
        }
        let c = generate_instance(8, 3, 3, 0.6, PayoffFamily::Mixed).unwrap();
        assert_ne!(
            write_instance(&c),
            write_instance(&generate_instance(7, 3, 3, 0.6, PayoffFamily::Mixed).unwrap())
        );
    }

    #[test]
    fn full_density_is_complete() {
        let inst = generate_instance(1, 4, 3, 1.0, PayoffFamily::Linear).unwrap();
        assert_eq!(inst.edges().len(), 12);
        assert!(inst.is_all_linear_identity());
    }

    #[test]
    fn declared_parameter_ranges() {
        for seed in 0..20 {
            let inst = generate_instance(seed, 3, 4, 0.7, PayoffFamily::Power).unwrap();
            for e in inst.edges() {
                assert!((0.0..=MAX_WEIGHT).contains(&e.weight));
                for p in [&e.payoff_a, &e.payoff_b] {
                    match p {
                        PayoffFn::Power { exponent, .. } => assert!(*exponent > 0.3 && *exponent < 3.0),
                        other => panic!("unexpected payoff {other:?}"),
                    }
                }
            }
            assert!(inst.validate().is_ok());
        }
    }

    #[test]
    fn generated_instances_validate() {
        for family in PayoffFamily::ALL {
            for seed in 0..10 {
                let inst = generate_instance(seed, 4, 3, 0.5, family).unwrap();
                assert!(inst.is_connected());
                let report = inst.validate();
                assert!(report.is_ok(), "{family} seed {seed}: {:?}", report.issues);
            }
        }
    }

    #[test]
    fn spanning_instances_have_degree_two_tree() {
        for seed in 0..30 {
            let inst = generate_spanning_instance(seed, 4, 0.3, PayoffFamily::Mixed).unwrap();
            assert_eq!(inst.a_count(), 5);
            assert!(inst.is_connected());
            for b in 0..4 {
                assert!(inst.neighbors(crate::instance::NodeId::b(b)).len() >= 2);
            }
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(
            generate_instance(1, 0, 3, 0.5, PayoffFamily::Linear),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_instance(1, 2, 2, 0.0, PayoffFamily::Linear),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_instance(1, 6, 6, 0.01, PayoffFamily::Linear),
            Err(Error::GenerationFailed(_))
        ));
        assert!("quadratic".parse::<PayoffFamily>().is_err());
        assert_eq!("log1p".parse::<PayoffFamily>().unwrap(), PayoffFamily::Log1p);
    }
}
