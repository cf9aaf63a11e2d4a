use thiserror::Error;

use crate::instance::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inversion did not converge for target value {value}")]
    NonConvergence { value: f64 },

    #[error("instance has {nodes} nodes, exceeding the enumeration cap of {cap}")]
    InstanceTooLarge { nodes: usize, cap: usize },

    #[error("no stable spanning-tree profile: {0}")]
    NoProfile(String),

    #[error("root {0} is already matched")]
    RootMatched(String),

    #[error("path is not alternating with respect to the matching: {0}")]
    NotAlternating(String),

    #[error("expected |A| - |B| = 1, got |A| = {a}, |B| = {b}")]
    SideSizeMismatch { a: usize, b: usize },

    #[error("iteration cap of {cap} exceeded")]
    IterationCapExceeded { cap: usize },

    #[error("feasibility violation: {0}")]
    FeasibilityViolation(String),

    #[error("instance is not all-linear identity payoffs")]
    NotLinear,

    #[error("invalid instance: {}", format_issues(.0))]
    InvalidInstance(Vec<ValidationIssue>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
