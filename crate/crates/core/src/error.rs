use thiserror::Error;

/// Errors produced by the iteration library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a convex combination: {0}")]
    NotConvex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain violation in `{label}`: iterate norm {norm} exceeds radius {radius} at power {power}")]
    DomainViolation {
        label: String,
        norm: f64,
        radius: f64,
        power: usize,
    },

    #[error("unknown zoo name `{0}`")]
    UnknownName(String),

    #[error("{role} sequence shorter than run (needed n = {n}, have {len})")]
    SequenceExhausted { role: String, n: usize, len: usize },

    #[error("error-term sequence shorter than run (needed n = {n}, have {len})")]
    ErrorTermExhausted { n: usize, len: usize },

    #[error("condition {label} violated: {message}")]
    ConditionFailed { label: String, message: String },

    #[error("contraction precondition violated at step {n}: bound {bound} >= 1")]
    ContractionPrecondition { n: usize, bound: f64 },

    #[error("inner solver stalled at step {n}: residual {residual} after {iterations} iterations")]
    InnerStalled { n: usize, iterations: usize, residual: f64 },

    #[error("not a valid recurrence instance at index {index}")]
    InvalidRecurrence { index: usize },

    #[error("trace integrity failure at step {n}: {what} differs by {diff}")]
    TraceIntegrity { n: usize, what: String, diff: f64 },

    #[error("empty fixed-point set")]
    EmptyFixedPointSet,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
