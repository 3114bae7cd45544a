use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants carry enough context to reconstruct the
/// failing call without a backtrace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cycle lengths sum to {total}, expected {n}")]
    InvalidCycleType { n: usize, total: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("enumeration of size {n} exceeds cap {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("{what} = {value} out of range: requires {requirement}")]
    ParameterOutOfRange {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("x = {x} lies below the support start {start}")]
    BelowSupport { x: u64, start: u64 },

    #[error("quantile level {0} outside [0, 1)")]
    InvalidQuantileLevel(f64),

    #[error("mgf diverges at t = {t}: requires {requirement}")]
    MgfDomain { t: f64, requirement: &'static str },

    #[error("series did not meet tolerance {tol} within {terms} terms")]
    SeriesHorizon { terms: usize, tol: f64 },

    #[error("finite law masses must be nonnegative and sum exactly to 1")]
    InvalidMasses,

    #[error("sample is empty")]
    EmptySample,

    #[error("sample value {x} below support start {start}")]
    SampleBelowSupport { x: u64, start: u64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("batch has {actual} values but the threshold was calibrated for {expected}")]
    SampleSizeMismatch { expected: usize, actual: usize },

    #[error("hypotheses must satisfy 1 < theta0 < theta1, got {theta0} and {theta1}")]
    HypothesisOrder { theta0: f64, theta1: f64 },

    #[error("significance level {0} outside (0, 1)")]
    InvalidLevel(f64),
}
