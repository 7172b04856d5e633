use std::fmt;

use mahler_core::Error;

pub const CONFIG: u8 = 2;
pub const TRUNCATED: u8 = 3;
pub const INTERNAL: u8 = 4;

/// Why a command stopped; each kind has its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unparsable input, unknown names.
    Config(String),
    /// Partial output was written before a numeric limit was hit.
    Truncated(String),
    /// A property the library guarantees did not hold.
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => CONFIG,
            Failure::Truncated(_) => TRUNCATED,
            Failure::Internal(_) => INTERNAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Truncated(m) => write!(f, "truncated: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::InvalidMatrix(_)
            | Error::Parse { .. }
            | Error::UnknownSystem(_)
            | Error::InvalidParameter(_) => Failure::Config(msg),
            Error::ZeroDivision { .. }
            | Error::ZeroCoordinate(_)
            | Error::AllSamplesSkipped(_)
            | Error::InsufficientData(_)
            | Error::Overflow(_)
            | Error::RootFinding { .. }
            | Error::RootCount { .. } => Failure::Truncated(msg),
            Error::NotLaurent(_) | Error::ZeroPolynomial(_) => Failure::Internal(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o: {e}"))
    }
}
