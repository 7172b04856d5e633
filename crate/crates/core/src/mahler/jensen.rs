use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::roots::polynomial_roots;
use crate::error::{Error, Result};
use crate::scalar::ldexp;
use crate::LaurentPoly;

/// Largest univariate degree accepted by [`jensen_univariate`].
pub const MAX_JENSEN_DEGREE: i64 = 10_000;

/// Coefficients wider than this many bits are rescaled before conversion.
const MAX_COEFF_BITS: u64 = 1000;

/// `m(p)` of a univariate Laurent polynomial from its roots:
/// `log|a_d| + sum max(log|alpha|, 0)`.
pub fn jensen_univariate(p: &LaurentPoly) -> Result<f64> {
    if p.nvars() != 1 {
        return Err(Error::DimensionMismatch { left: 1, right: p.nvars() });
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("Mahler measure"));
    }
    let lo = p.min_exponents().expect("nonzero")[0] as i64;
    let hi = p.max_exponents().expect("nonzero")[0] as i64;
    let degree = hi - lo;
    if degree > MAX_JENSEN_DEGREE {
        return Err(Error::InvalidParameter(format!("degree {degree} exceeds {MAX_JENSEN_DEGREE}")));
    }
    let bits = p.terms().map(|(_, c)| c.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(MAX_COEFF_BITS);
    let mut a = vec![Complex64::new(0.0, 0.0); degree as usize + 1];
    for (e, c) in p.terms() {
        let v = scaled_f64(c, shift);
        a[(e[0] as i64 - lo) as usize] = Complex64::new(if c.is_negative() { -v } else { v }, 0.0);
    }
    let lead = a[degree as usize].norm().ln() + shift as f64 * std::f64::consts::LN_2;
    if degree == 0 {
        return Ok(lead);
    }
    let roots = polynomial_roots(&a)?;
    Ok(lead + roots.iter().map(|z| z.norm().ln().max(0.0)).sum::<f64>())
}

/// `|c| * 2^-shift` rounded to `f64`.
fn scaled_f64(c: &BigInt, shift: u64) -> f64 {
    let mag = c.abs();
    let drop = mag.bits().saturating_sub(60);
    let top = (mag >> drop).to_f64().expect("60-bit value");
    ldexp(top, drop as i64 - shift as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawtonPoint {
    pub exponents: Vec<i64>,
    pub value: f64,
}

/// Jensen values of `p(x^{k_1}, ..., x^{k_N})` for each exponent tuple.
pub fn lawton_check(p: &LaurentPoly, exponents: &[Vec<i64>]) -> Result<Vec<LawtonPoint>> {
    exponents
        .iter()
        .map(|ks| {
            if ks.len() != p.nvars() {
                return Err(Error::DimensionMismatch { left: p.nvars(), right: ks.len() });
            }
            let mut terms = Vec::with_capacity(p.num_terms());
            for (e, c) in p.terms() {
                let d: i64 = e.iter().zip(ks).map(|(&a, &k)| a as i64 * k).sum();
                let d = i32::try_from(d)
                    .ok()
                    .filter(|d| d.unsigned_abs() as i64 <= MAX_JENSEN_DEGREE)
                    .ok_or_else(|| Error::InvalidParameter(format!("collapsed degree {d} exceeds {MAX_JENSEN_DEGREE}")))?;
                terms.push((vec![d], c.clone()));
            }
            let q = LaurentPoly::from_terms(1, terms);
            if q.is_zero() {
                return Err(Error::ZeroPolynomial("Mahler measure after collapsing"));
            }
            Ok(LawtonPoint { exponents: ks.clone(), value: jensen_univariate(&q)? })
        })
        .collect()
}
