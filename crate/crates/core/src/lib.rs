//! Stable weighted matchings on bipartite graphs whose nodes value their
//! share of an edge through arbitrary strictly increasing payoff functions.
//!
//! The core is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar for the common cases.

pub mod dot;
pub mod error;
pub mod generate;
pub mod instance;
pub mod io;
pub mod matching;
pub mod paths;
pub mod payoff;
pub mod profile;
pub mod scalar;
pub mod solver;
pub mod spanning;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{Edge, Instance, NodeId, NodeSet, Side, SubInstance, ValidationIssue, ValidationReport};
pub use matching::{AlternatingTree, EqualitySubgraph, HungarianForest, Matching};
pub use payoff::{PayoffFn, PiecewiseLinear};
pub use profile::{NodeMap, OfferProfile, StableWeightedMatching};
pub use scalar::Scalar;
pub use solver::{solve, SolverConfig, SolverState, StepEvent, StepRecord};
pub use verify::{blocking_pair_search, linear_core_oracle, verify, BlockingPair, LinearCore, VerificationReport, Violation};

pub type InstanceF64 = Instance<f64>;
pub type InstanceF32 = Instance<f32>;
pub type PayoffFnF64 = PayoffFn<f64>;
pub type PayoffFnF32 = PayoffFn<f32>;
pub type OfferProfileF64 = OfferProfile<f64>;
pub type OfferProfileF32 = OfferProfile<f32>;
pub type SolutionF64 = StableWeightedMatching<f64>;
pub type SolutionF32 = StableWeightedMatching<f32>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolverConfigF32 = SolverConfig<f32>;
