//! Dilogarithms and the closed-form Mahler measures built from them.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const PI2_6: f64 = PI * PI / 6.0;

/// Bernoulli numbers `B_0..=B_60` with `B_1 = -1/2`.
fn bernoulli() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        const N: usize = 60;
        let mut b: Vec<BigRational> = Vec::with_capacity(N + 1);
        b.push(BigRational::one());
        for m in 1..=N {
            // sum_{k<=m} C(m+1, k) B_k = 0
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b.iter().map(|q| q.to_f64().expect("finite")).collect()
    })
}

/// `B_n / (n+1)!` for the series `Li2(z) = sum c_n u^{n+1}`, `u = -log(1-z)`.
fn li2_coefficients() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut fact = 1.0;
        bernoulli()
            .iter()
            .enumerate()
            .map(|(n, b)| {
                fact *= (n + 1) as f64;
                b / fact
            })
            .collect()
    })
}

/// Bernoulli series; accurate for `|z| <= 1`, `Re z <= 1/2`.
fn li2_core(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let c = li2_coefficients();
    let mut sum = u * c[0] + u2 * c[1];
    let mut p = u2 * u;
    for n in (2..c.len()).step_by(2) {
        let t = p * c[n];
        sum += t;
        if t.norm() <= 1e-17 * sum.norm() {
            break;
        }
        p *= u2;
    }
    sum
}

/// Principal branch of the dilogarithm.
pub fn li2(z: Complex64) -> Complex64 {
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(PI2_6, 0.0);
    }
    if z.norm() > 1.0 {
        // inversion
        let l = (-z).ln();
        return Complex64::new(-PI2_6, 0.0) - 0.5 * l * l - li2(z.inv());
    }
    if z.re > 0.5 {
        // reflection
        let w = Complex64::new(1.0, 0.0) - z;
        return Complex64::new(PI2_6, 0.0) - z.ln() * w.ln() - li2_core(w);
    }
    li2_core(z)
}

/// Bloch-Wigner dilogarithm `D(z) = Im Li2(z) + log|z| arg(1-z)`; zero at
/// `0`, `1` and on the real line.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if z.im == 0.0 || !z.is_finite() {
        return 0.0;
    }
    // D(1/z) = -D(z), D(1-z) = -D(z)
    if z.norm_sqr() > 1.0 {
        return -bloch_wigner(z.inv());
    }
    if z.re > 0.5 {
        return -bloch_wigner(Complex64::new(1.0 - z.re, -z.im));
    }
    li2_core(z).im + z.norm().ln() * (Complex64::new(1.0, 0.0) - z).arg()
}

/// Angle reduced to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct CircleAngle(f64);

impl CircleAngle {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t > PI {
            t -= TAU;
        }
        Self(t)
    }

    pub fn theta(self) -> f64 {
        self.0
    }
}

/// `Cl2(phi) = sum sin(n phi)/n^2` from its Bernoulli expansion about 0.
pub fn clausen(phi: f64) -> f64 {
    let p = CircleAngle::new(phi).theta();
    if p == 0.0 || p == PI {
        return 0.0;
    }
    let b = bernoulli();
    let p2 = p * p;
    let mut pow = p * p2;
    let mut fact = 6.0; // (2k+1)!
    let mut sum = p - p * p.abs().ln();
    for k in 1..=30 {
        let t = b[2 * k].abs() / (2 * k) as f64 / fact * pow;
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() {
            break;
        }
        pow *= p2;
        fact *= ((2 * k + 2) * (2 * k + 3)) as f64;
    }
    sum
}

/// `D(e^{2 i theta}) = sum sin(2 n theta)/n^2`.
pub fn circle_dilog(theta: CircleAngle) -> f64 {
    clausen(2.0 * theta.theta())
}

/// `m(1 + x + y) = D(e^{i pi/3}) / pi`.
pub fn smyth_constant() -> f64 {
    clausen(PI / 3.0) / PI
}

/// `m(x_4) = r D(e^{i pi/3}) / pi` for `x_{n+2} x_n = x_{n+1}^r + 1`.
pub fn mx4_closed(r: u32) -> f64 {
    r as f64 * smyth_constant()
}

/// `2 D(e^{i pi/3}) / pi`.
pub fn markoff_x5_closed() -> f64 {
    2.0 * smyth_constant()
}

pub fn somos_x6_closed() -> f64 {
    smyth_constant()
}

/// Chebyshev polynomial of the first kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevPoly {
    pub r: u32,
    /// Ascending coefficients.
    pub coefficients: Vec<BigInt>,
}

impl ChebyshevPoly {
    pub fn new(r: u32) -> Self {
        let mut prev = vec![BigInt::one()];
        let mut cur = vec![BigInt::zero(), BigInt::one()];
        if r == 0 {
            return Self { r, coefficients: prev };
        }
        for _ in 1..r {
            // T_{k+1} = 2x T_k - T_{k-1}
            let mut next = vec![BigInt::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c * 2;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Self { r, coefficients: cur }
    }

    /// Three-term recurrence evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        chebyshev_t(self.r, x)
    }
}

pub fn chebyshev_t(r: u32, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if r == 0 {
        return a;
    }
    for _ in 1..r {
        (a, b) = (b, 2.0 * x * b - a);
    }
    b
}

/// `P_r(X) = (1 - T_r(X))^r / (2^{1-r} (1 - X)) - 1`.
pub fn p_r(r: u32, x: f64) -> f64 {
    (1.0 - chebyshev_t(r, x)).powi(r as i32) * 2f64.powi(r as i32 - 1) / (1.0 - x) - 1.0
}

fn pr_equation(r: u32, t: f64) -> f64 {
    2f64.powi(r as i32 - 1) * (r as f64 * t / 2.0).sin().abs().powi(r as i32) - (t / 2.0).sin()
}

/// The `r` solutions `0 < t_1 < ... < t_r < pi` of
/// `2^{r-1} |sin(rt/2)|^r = sin(t/2)`.
pub fn pr_roots(r: u32) -> Result<Vec<CircleAngle>> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("r = {r} must be at least 2")));
    }
    let f = |t: f64| pr_equation(r, t);
    let grid = 200 * r as usize;
    let h = PI / grid as f64;
    let mut roots = Vec::new();
    let mut a = h * 1e-3;
    let mut fa = f(a);
    for i in 1..=grid {
        let b = if i == grid { PI * (1.0 - 1e-15) } else { i as f64 * h };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    if roots.len() != r as usize {
        return Err(Error::RootCount { expected: r as usize, found: roots.len() });
    }
    Ok(roots.into_iter().map(CircleAngle::new).collect())
}

/// `m(x_5) = (r/pi) sum_j (-1)^{j+1} (D(e^{i r t_j}) - D(e^{i t_j}))`.
pub fn mx5_closed(r: u32) -> Result<f64> {
    if r < 2 {
        return Ok(0.0);
    }
    let roots = pr_roots(r)?;
    let d = |t: f64| bloch_wigner(Complex64::from_polar(1.0, t));
    let sum: f64 = roots
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * (d(r as f64 * t.theta()) - d(t.theta()))
        })
        .sum();
    Ok(r as f64 / PI * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mx5Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    /// Set when the sign of `log|rho|` on some subinterval contradicts the
    /// expected alternation.
    pub mismatch: bool,
}

/// `(r/pi) * integral of log|rho(e^{it})|` over `{t in (0, pi): |rho| > 1}`,
/// `rho(z) = (1-z)/(1-z^r)^r`, by double-exponential quadrature on the
/// subintervals `[t_0, t_1], [t_2, t_3], ...` with `t_0 = 0` and
/// `t_{r+1} = pi` for even `r`, each further cut at the logarithmic
/// singularities of the integrand.
pub fn mx5_quadrature(r: u32) -> Result<Mx5Quadrature> {
    if r < 2 {
        return Ok(Mx5Quadrature { value: 0.0, error_estimate: 0.0, mismatch: false });
    }
    let rf = r as f64;
    let g = move |t: f64| (2.0 * (t / 2.0).sin()).abs().ln() - rf * (2.0 * (rf * t / 2.0).sin()).abs().ln();
    let mut ends = vec![0.0];
    ends.extend(pr_roots(r)?.iter().map(|t| t.theta()));
    if r.is_multiple_of(2) {
        ends.push(PI);
    }
    let mut value = 0.0;
    let mut err = 0.0;
    let mut mismatch = false;
    for (k, w) in ends.windows(2).enumerate() {
        let mid = g(0.5 * (w[0] + w[1]));
        if k % 2 == 0 {
            mismatch |= mid <= 0.0;
            // split at the interior zeros 2 pi k / r of sin(rt/2)
            let mut cuts = vec![w[0]];
            cuts.extend((1..r).map(|k| TAU * k as f64 / rf).filter(|&c| c > w[0] && c < w[1]));
            cuts.push(w[1]);
            for c in cuts.windows(2) {
                let out = quadrature::double_exponential::integrate(g, c[0], c[1], 1e-13);
                value += out.integral;
                err += out.error_estimate;
            }
        } else {
            mismatch |= mid >= 0.0;
        }
    }
    Ok(Mx5Quadrature { value: rf / PI * value, error_estimate: rf / PI * err, mismatch })
}

/// Lattice average over the `M x M` grid of roots of unity of
/// `|log|(K + sqrt(K^2 - 4))/2||` with `K = x1/x2 + x2/x1 + 1/(x1 x2)`.
pub fn cstar_constant(m: usize) -> Result<f64> {
    if m < 25 {
        return Err(Error::InvalidParameter(format!("lattice size {m} is below 25")));
    }
    let cos: Vec<f64> = (0..m).map(|k| (TAU * k as f64 / m as f64).cos()).collect();
    let inv: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / m as f64)).collect();
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut s = 0.0;
            for b in 0..m {
                // x1/x2 + x2/x1 = 2 cos(angle difference)
                let k = inv[(a + b) % m] + 2.0 * cos[(a + m - b) % m];
                let root = (k * k - 4.0).sqrt();
                let w = (k + root).norm().max((k - root).norm()) / 2.0;
                s += w.ln();
            }
            s
        })
        .collect();
    Ok(rows.iter().sum::<f64>() / (m * m) as f64)
}
