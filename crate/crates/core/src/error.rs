use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },

    /// No Laurent-polynomial quotient exists.
    #[error("not a Laurent polynomial: {0}")]
    NotLaurent(String),

    #[error("zero polynomial has no {0}")]
    ZeroPolynomial(&'static str),

    #[error("evaluation point has a zero coordinate at index {0}")]
    ZeroCoordinate(usize),

    /// Singular orbit: a division by zero at iterate `step`.
    #[error("division by zero at step {step}")]
    ZeroDivision { step: i64 },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid exchange matrix: {0}")]
    InvalidMatrix(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finder did not converge (degree {degree}, worst residual {residual:e})")]
    RootFinding { degree: usize, residual: f64 },

    #[error("expected {expected} roots, found {found}")]
    RootCount { expected: usize, found: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("all {0} samples were skipped")]
    AllSamplesSkipped(usize),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
