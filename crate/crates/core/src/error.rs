use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("mixing weight {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid statistic: {0}")]
    InvalidStatistic(String),

    #[error("invalid act: {0}")]
    InvalidAct(String),

    #[error("expectation combines +inf and -inf losses")]
    UndefinedExpectation,

    #[error("base measure mass at {index} is not strictly positive ({value})")]
    ZeroBaseMass { index: usize, value: f64 },

    #[error("invalid convex generator: {0}")]
    InvalidGenerator(String),

    #[error("propriety violated: S(P,Q) - S(P,P) = {margin} at P = {p:?}, Q = {q:?}")]
    ProprietyViolation { p: Vec<f64>, q: Vec<f64>, margin: f64 },

    #[error("reference act has an infinite loss at outcome {0}")]
    InfiniteReferenceLoss(usize),

    #[error("constraint set is empty")]
    Infeasible,

    #[error("vertex enumeration over {supports} supports exceeds the configured cap ({reason})")]
    CombinatorialBlowup { supports: u128, reason: String },

    #[error("Newton iteration failed to converge (gradient norm {gradient_norm:e})")]
    NewtonDivergence { gradient_norm: f64 },

    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    MaxIterExceeded { iterations: usize, gap: f64 },

    #[error("simplex method cycled")]
    SimplexCycle,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("operation not supported by loss model '{model}': {what}")]
    Unsupported { model: String, what: String },
}

pub type Result<T> = std::result::Result<T, Error>;
