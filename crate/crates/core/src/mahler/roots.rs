//! Roots of univariate polynomials: companion-matrix eigenvalues for
//! moderate degree, Aberth-Ehrlich iteration beyond, with simultaneous
//! polishing and a relative residual check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest degree sent to the dense eigenvalue solver.
pub const COMPANION_MAX_DEGREE: usize = 500;
/// Acceptance threshold on `|p(z)| / sum |a_k| |z|^k`; raised to the
/// Horner rounding floor `2 d eps` for degrees above about 450.
pub const RESIDUAL_TOL: f64 = 1e-13;

fn residual_tol(d: usize) -> f64 {
    RESIDUAL_TOL.max(2.0 * d as f64 * f64::EPSILON)
}

/// Horner evaluation of `p` and `p'`, switching to the reversed polynomial
/// outside the unit disc. Returns the Newton ratio `p/p'` and the relative
/// residual.
fn newton_ratio(a: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let d = a.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = a[d];
        let mut dp = Complex64::new(0.0, 0.0);
        let mut scale = a[d].norm();
        let r = z.norm();
        for k in (0..d).rev() {
            dp = dp * z + p;
            p = p * z + a[k];
            scale = scale * r + a[k].norm();
        }
        (p / dp, p.norm() / scale)
    } else {
        // p(z) = z^d q(w), w = 1/z, q(w) = sum a_{d-k} w^k
        let w = z.inv();
        let mut q = a[0];
        let mut dq = Complex64::new(0.0, 0.0);
        let mut scale = a[0].norm();
        let r = w.norm();
        for k in 1..=d {
            dq = dq * w + q;
            q = q * w + a[k];
            scale = scale * r + a[k].norm();
        }
        // p'/p = w (d - w q'/q)
        let log_deriv = w * (d as f64 - w * dq / q);
        (log_deriv.inv(), q.norm() / scale)
    }
}

fn residual(a: &[Complex64], z: Complex64) -> f64 {
    newton_ratio(a, z).1
}

/// Simultaneous Aberth-Ehrlich refinement in Gauss-Seidel order. Returns the
/// number of sweeps used.
fn aberth(a: &[Complex64], z: &mut [Complex64], max_sweeps: usize) -> usize {
    let n = z.len();
    let mut done = vec![false; n];
    for sweep in 1..=max_sweeps {
        let mut active = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, res) = newton_ratio(a, z[i]);
            if res == 0.0 || !ratio.is_finite() {
                done[i] = true;
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    s += (z[i] - zj).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !step.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                active = true;
            }
        }
        if !active {
            return sweep;
        }
    }
    max_sweeps
}

fn initial_guesses(a: &[Complex64]) -> Vec<Complex64> {
    let d = a.len() - 1;
    // geometric mean of root moduli
    let radius = (a[0].norm() / a[d].norm()).powf(1.0 / d as f64);
    (0..d)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect()
}

fn companion_eigenvalues(a: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = a.len() - 1;
    if a.iter().any(|c| c.im != 0.0) {
        return None;
    }
    let lead = a[d].re;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -a[i].re / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100 * d)?;
    let ev = schur.complex_eigenvalues();
    let out: Vec<Complex64> = ev.iter().copied().collect();
    out.iter().all(|z| z.is_finite()).then_some(out)
}

/// All roots of `sum a_k z^k` (ascending coefficients, `a_0` and `a_d`
/// nonzero), each with relative residual at most [`RESIDUAL_TOL`].
pub fn polynomial_roots(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = a.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    if a[d].norm() == 0.0 || a[0].norm() == 0.0 {
        return Err(Error::InvalidParameter("leading and trailing coefficients must be nonzero".into()));
    }
    if d == 1 {
        return Ok(vec![-a[0] / a[1]]);
    }
    let mut z = if d <= COMPANION_MAX_DEGREE {
        companion_eigenvalues(a).unwrap_or_else(|| initial_guesses(a))
    } else {
        initial_guesses(a)
    };
    aberth(a, &mut z, 500);
    let worst = z.iter().map(|&r| residual(a, r)).fold(0.0, f64::max);
    if worst > residual_tol(d) || z.iter().any(|r| !r.is_finite()) {
        // restart from the circle if the eigenvalue start stalled
        let mut fresh = initial_guesses(a);
        aberth(a, &mut fresh, 2000);
        let worst2 = fresh.iter().map(|&r| residual(a, r)).fold(0.0, f64::max);
        if worst2 <= residual_tol(d) && fresh.iter().all(|r| r.is_finite()) {
            return Ok(fresh);
        }
        return Err(Error::RootFinding { degree: d, residual: worst.min(worst2) });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(cs: &[f64]) -> Vec<Complex64> {
        cs.iter().map(|&c| Complex64::new(c, 0.0)).collect()
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn quadratic_roots() {
        // 2x^2 - 5x + 2 = (2x - 1)(x - 2)
        let r = sorted_re(polynomial_roots(&real(&[2.0, -5.0, 2.0])).unwrap());
        assert!((r[0] - 0.5).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn roots_of_unity_high_degree() {
        for d in [7usize, 64, 600, 1500] {
            let mut a = vec![Complex64::new(0.0, 0.0); d + 1];
            a[0] = Complex64::new(-1.0, 0.0);
            a[d] = Complex64::new(1.0, 0.0);
            let r = polynomial_roots(&a).unwrap();
            assert_eq!(r.len(), d);
            for z in r {
                assert!((z.norm() - 1.0).abs() < 1e-12, "degree {d}: {z}");
            }
        }
    }

    #[test]
    fn clustered_and_repeated_roots() {
        // (x - 1)^2 (x + 3)
        let r = polynomial_roots(&real(&[3.0, -5.0, 1.0, 1.0])).unwrap();
        let mut near_one = 0;
        for z in &r {
            if (z - Complex64::new(1.0, 0.0)).norm() < 1e-6 {
                near_one += 1;
            }
        }
        assert_eq!(near_one, 2);
    }

    #[test]
    fn wide_dynamic_range() {
        // roots 1e-6, 1, 1e6
        let a = real(&[-1.0, 1e6 + 1.0 + 1e-6, -(1e6 + 1.0 + 1e-6), 1.0]);
        let r = sorted_re(polynomial_roots(&a).unwrap());
        assert!((r[0] / 1e-6 - 1.0).abs() < 1e-8);
        assert!((r[2] / 1e6 - 1.0).abs() < 1e-10);
    }
}
