use thiserror::Error;

/// Errors raised by the library. Every variant describes an input that was
/// rejected; none of them are recoverable by retrying.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix data has {len} entries, expected {expected} for a {dim}x{dim} matrix")]
    BadShape { len: usize, expected: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("indeterminate X{index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },

    #[error("moment map is missing word {word:?}")]
    IncompleteMoments { word: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
