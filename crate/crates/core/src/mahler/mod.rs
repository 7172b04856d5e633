//! Logarithmic Mahler measures: Jensen's formula, torus sampling, and the
//! orbit-accumulated estimators for recurrence iterates.

mod jensen;
mod exact;
mod orbit;
mod roots;
mod sampler;

pub use jensen::{jensen_univariate, lawton_check, LawtonPoint};
pub use orbit::{
    markoff_recursion_sequence, orbit_mahler_sequence, orbit_slope_estimate, somos4_recursion_sequence, FrozenParam, MahlerSequence,
};
pub use roots::{polynomial_roots, COMPANION_MAX_DEGREE, RESIDUAL_TOL};
pub use sampler::{lattice_estimate, mc_estimate, MahlerEstimate, SamplerConfig, SamplerMode, SplitSum, GENERATOR};
