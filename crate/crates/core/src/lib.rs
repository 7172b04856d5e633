//! Dynamics with the Laurent property: exact Laurent-polynomial iterates,
//! cluster mutations, torus-sampled Mahler measures, dilogarithm closed
//! forms, and growth-rate (entropy) estimators.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); polynomial
//! arithmetic is generic over an integer [`Coeff`] ring. The aliases below fix
//! the types used throughout the command-line tool.

pub mod cluster;
pub mod entropy;
pub mod error;
pub mod expr;
pub mod laurent;
pub mod mahler;
pub mod recurrence;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use laurent::{Coeff, DVector, DegreeProfile, Laurent, Ring};
pub use scalar::{ExtComplex, Real};

/// Laurent polynomial with arbitrary-precision integer coefficients.
pub type LaurentPoly = Laurent<num_bigint::BigInt>;
/// Extended-range complex number over `f64`.
pub type ExtC64 = ExtComplex<f64>;
/// Exact rational used by rational orbits and heights.
pub type Rational = num_rational::BigRational;
