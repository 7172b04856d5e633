//! High-precision evaluation of `log|p|` at rational points of the unit
//! torus, used when floating-point evaluation loses every significant digit
//! to cancellation between huge coefficients.
//!
//! Fixed-point arithmetic with a proven error bound is tried first, at
//! increasing precision; exact rational arithmetic settles the rest, which
//! in practice are exact zeros.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use crate::entropy::ln_bigint;
use crate::LaurentPoly;

/// Bits used to quantize `tan(theta/2)`.
const QUANT_BITS: u32 = 40;

type Gauss = Complex<BigInt>;

/// `z = w / d` with `|w| = d`, close to `e^{i theta}`: the stereographic
/// point of `t = round(tan(phi/2) 2^40) / 2^40`, with `phi = theta` or
/// `theta - pi` (then `w` is negated) so that `|t| <= 1`.
fn circle_point(theta: f64) -> (Gauss, BigInt) {
    let flip = theta.abs() > std::f64::consts::FRAC_PI_2;
    let phi = if flip { theta - std::f64::consts::PI.copysign(theta) } else { theta };
    let a = BigInt::from(((phi / 2.0).tan() * (1u64 << QUANT_BITS) as f64).round() as i64);
    let s = BigInt::one() << QUANT_BITS;
    let (a2, s2) = (&a * &a, &s * &s);
    let w = Complex::new(&s2 - &a2, BigInt::from(2) * a * s);
    (if flip { -w } else { w }, s2 + a2)
}

/// `p` shifted to nonnegative exponents, which leaves `|p|` unchanged on
/// the torus.
pub(crate) struct ExactTorus {
    terms: Vec<(Vec<usize>, BigInt)>,
    degrees: Vec<usize>,
    /// `sum |c|`.
    mass: BigInt,
}

/// Fixed-point attempts before exact arithmetic.
const FIXED_TRIES: u32 = 3;

impl ExactTorus {
    pub(crate) fn new(p: &LaurentPoly) -> Self {
        let lo = p.min_exponents().unwrap_or_default();
        let hi = p.max_exponents().unwrap_or_default();
        let terms = p
            .terms()
            .map(|(e, c)| (e.iter().zip(&lo).map(|(&k, &l)| (k - l) as usize).collect(), c.clone()))
            .collect();
        let mass = p.terms().map(|(_, c)| c.abs()).sum();
        Self { terms, degrees: hi.iter().zip(&lo).map(|(&h, &l)| (h - l) as usize).collect(), mass }
    }

    /// `log|p(z)|` at the rational point nearest each angle, or `None` at a
    /// zero of `p`.
    pub(crate) fn log_abs(&self, angles: &[f64]) -> Option<f64> {
        let points: Vec<(Gauss, BigInt)> = angles.iter().map(|&t| circle_point(t)).collect();
        let mut bits = self.mass.bits() + 64;
        for _ in 0..FIXED_TRIES {
            if let Some(v) = self.fixed_log_abs(&points, bits) {
                return Some(v);
            }
            bits *= 2;
        }
        self.exact_log_abs(&points)
    }

    /// Fixed point with `bits` fractional bits. Each power `z^k` is off by
    /// at most `k + 1` units per component and each monomial by at most
    /// `deg + nvars + 1`, so the sum is within `2 mass ops` units in modulus;
    /// the value is returned only when it clears that bound by `2^20`.
    fn fixed_log_abs(&self, points: &[(Gauss, BigInt)], bits: u64) -> Option<f64> {
        let one = BigInt::one() << bits;
        let mut tables: Vec<Vec<Gauss>> = Vec::with_capacity(points.len());
        for ((w, d), &deg) in points.iter().zip(&self.degrees) {
            let z = Complex::new((&w.re << bits) / d, (&w.im << bits) / d);
            let mut row = vec![Complex::new(one.clone(), BigInt::zero())];
            for k in 1..=deg {
                let next = &row[k - 1] * &z;
                row.push(Complex::new(next.re >> bits, next.im >> bits));
            }
            tables.push(row);
        }
        let mut sum = Complex::new(BigInt::zero(), BigInt::zero());
        for (e, c) in &self.terms {
            let mut t: Option<Gauss> = None;
            for (row, &k) in tables.iter().zip(e) {
                t = Some(match t {
                    None => row[k].clone(),
                    Some(t) => {
                        let m = &t * &row[k];
                        Complex::new(m.re >> bits, m.im >> bits)
                    }
                });
            }
            let t = t.unwrap_or_else(|| Complex::new(one.clone(), BigInt::zero()));
            sum += Complex::new(&t.re * c, &t.im * c);
        }
        let ops = self.degrees.iter().sum::<usize>() + self.degrees.len() + 2;
        let bound = (&self.mass * BigInt::from(2 * ops)) << 20u32;
        let norm2 = &sum.re * &sum.re + &sum.im * &sum.im;
        if norm2 <= &bound * &bound {
            return None;
        }
        Some(0.5 * ln_bigint(&norm2) - bits as f64 * std::f64::consts::LN_2)
    }

    fn exact_log_abs(&self, points: &[(Gauss, BigInt)]) -> Option<f64> {
        // tables[j][k] = w_j^k d_j^(deg_j - k), so every term shares the
        // denominator prod d_j^deg_j
        let mut log_den = 0.0;
        let mut tables: Vec<Vec<Gauss>> = Vec::with_capacity(points.len());
        for ((w, d), &deg) in points.iter().zip(&self.degrees) {
            log_den += deg as f64 * ln_bigint(d);
            let mut d_pows = vec![BigInt::one()];
            for k in 1..=deg {
                d_pows.push(&d_pows[k - 1] * d);
            }
            let mut w_pow = Complex::new(BigInt::one(), BigInt::zero());
            let mut row = Vec::with_capacity(deg + 1);
            for k in 0..=deg {
                if k > 0 {
                    w_pow = &w_pow * w;
                }
                row.push(Complex::new(&w_pow.re * &d_pows[deg - k], &w_pow.im * &d_pows[deg - k]));
            }
            tables.push(row);
        }
        let mut sum = Complex::new(BigInt::zero(), BigInt::zero());
        for (e, c) in &self.terms {
            let mut t = Complex::new(c.clone(), BigInt::zero());
            for (row, &k) in tables.iter().zip(e) {
                t = &t * &row[k];
            }
            sum += t;
        }
        let norm2 = &sum.re * &sum.re + &sum.im * &sum.im;
        if norm2.is_zero() {
            return None;
        }
        Some(0.5 * ln_bigint(&norm2) - log_den)
    }
}
