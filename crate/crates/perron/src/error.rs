use thiserror::Error;

use crate::io::ParseError;

/// Errors surfaced by tensor construction, kernels, solvers, and the harness.
#[derive(Debug, Error)]
pub enum PerronError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tensor entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("vector must be strictly positive (component {index} is {value})")]
    NonPositiveVector { index: usize, value: f64 },

    #[error("tensor is identically zero")]
    ZeroTensor,

    #[error("matrix is numerically singular (pivot column {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("entrywise fractional power of negative component {index} ({value})")]
    NegativePower { index: usize, value: f64 },

    /// Power-type iterate hit a zero component; the tensor has a zero slice
    /// or is reducible.
    #[error("degenerate power iterate: component {index} of the contraction is zero")]
    DegenerateIterate { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("report has no rows")]
    EmptyReport,

    #[error("methods disagree on the eigenvalue: {a} vs {b} (relative {rel:.3e})")]
    MethodDisagreement { a: f64, b: f64, rel: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PerronError>;
