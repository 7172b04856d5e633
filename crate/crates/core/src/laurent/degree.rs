use serde::{Deserialize, Serialize};

use super::{Coeff, Laurent};
use crate::error::{Error, Result};

/// Exponent tuple `d` of the denominator monomial in `P / x^d`, where `P` is
/// a polynomial not divisible by any variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DVector(pub Vec<i64>);

impl DVector {
    pub fn max_entry(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// Degree metrics of a nonzero Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile<C> {
    /// Total degree of the reduced rational function: the larger of the
    /// numerator and denominator degrees.
    pub rational_degree: u64,
    /// Sum over variables of the per-variable degree of the numerator `P`.
    pub sdeg: u64,
    /// Sum of absolute coefficient values.
    pub length: C,
}

impl<C: Coeff> Laurent<C> {
    pub fn dvector(&self) -> Result<DVector> {
        let m = self.min_exponents().ok_or(Error::ZeroPolynomial("d-vector"))?;
        Ok(DVector(m.into_iter().map(|e| -(e as i64)).collect()))
    }

    /// Degree metrics of `P / x^d`.
    ///
    /// Entries of `d` may be negative (e.g. `x_1` itself has `d = (-1, 0)`);
    /// the negative part moves to the numerator, so the reduced fraction is
    /// `P x^{[-d]_+} / x^{[d]_+}`.
    pub fn degree_profile(&self) -> Result<DegreeProfile<C>> {
        let d = self.dvector()?;
        let mut num_deg = 0i64;
        let mut max_per_var = vec![0i64; self.nvars()];
        for (e, _) in self.terms() {
            let mut deg = 0i64;
            for (j, &k) in e.iter().enumerate() {
                let shifted = k as i64 + d.0[j];
                deg += shifted;
                max_per_var[j] = max_per_var[j].max(shifted);
            }
            num_deg = num_deg.max(deg);
        }
        let moved: i64 = d.0.iter().map(|&x| (-x).max(0)).sum();
        let den: i64 = d.0.iter().map(|&x| x.max(0)).sum();
        Ok(DegreeProfile {
            rational_degree: (num_deg + moved).max(den) as u64,
            sdeg: max_per_var.iter().sum::<i64>() as u64,
            length: self.length(),
        })
    }
}
