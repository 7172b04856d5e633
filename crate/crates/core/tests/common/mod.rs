//! Property checks shared by `properties.rs` (proptest harness) and the
//! acceptance runner.
#![allow(dead_code)]

use mahler_core::cluster::{ExchangeMatrix, Seed};
use mahler_core::entropy::tropical_dvectors;
use mahler_core::mahler::{jensen_univariate, lattice_estimate, mc_estimate, SamplerConfig};
use mahler_core::recurrence::{conserved_quantity, iterate_numeric, iterate_symbolic, ConservedQuantity, RecurrenceDef, SymbolicBudget, System};
use mahler_core::special::{bloch_wigner, circle_dilog, clausen, CircleAngle};
use mahler_core::{ExtC64, LaurentPoly};
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = std::result::Result<(), TestCaseError>;

fn fail(msg: String) -> Check {
    Err(TestCaseError::fail(msg))
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

pub fn five_term(x: Complex64, y: Complex64) -> Check {
    let one = Complex64::new(1.0, 0.0);
    let xy = one - x * y;
    prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3 && xy.norm() > 1e-3);
    prop_assume!((one - x).norm() > 1e-3 && (one - y).norm() > 1e-3);
    let s = bloch_wigner(x) + bloch_wigner(y) + bloch_wigner((one - x) / xy) + bloch_wigner(xy) + bloch_wigner((one - y) / xy);
    if s.abs() > 1e-10 {
        return fail(format!("five-term sum {s:e} at x={x}, y={y}"));
    }
    Ok(())
}

pub fn d_antisymmetry(z: Complex64) -> Check {
    prop_assume!(z.norm() > 1e-3 && (Complex64::new(1.0, 0.0) - z).norm() > 1e-3);
    let d = bloch_wigner(z);
    for (name, w) in [("conj", z.conj()), ("inverse", 1.0 / z), ("1-z", 1.0 - z)] {
        let e = bloch_wigner(w) + d;
        if e.abs() > 1e-12 {
            return fail(format!("D({name}) + D(z) = {e:e} at z={z}"));
        }
    }
    Ok(())
}

pub fn clausen_vs_bw(theta: f64) -> Check {
    let a = bloch_wigner(Complex64::from_polar(1.0, theta));
    let b = clausen(theta);
    let c = circle_dilog(CircleAngle::new(theta));
    if (a - b).abs() > 1e-11 || (c - clausen(2.0 * theta)).abs() > 1e-11 {
        return fail(format!("theta={theta}: D={a}, Cl2={b}, circle_dilog={c}"));
    }
    Ok(())
}

/// `(r, n)` with iterates small enough to expand exactly.
pub fn rank2_case() -> impl Strategy<Value = (u32, usize)> {
    (1u32..=4).prop_flat_map(|r| {
        let top = match r {
            1 | 2 => 12,
            3 => 7,
            _ => 6,
        };
        (Just(r), 3usize..=top)
    })
}

/// Tropical d-vectors of `x_{n+2} x_n = x_{n+1}^r + 1` against exact iterates.
pub fn tropical_vs_symbolic(r: u32, n: usize) -> Check {
    let trop = tropical_dvectors(r, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let orbit = iterate_symbolic(&RecurrenceDef::builtin(System::Rank2(r)), n, SymbolicBudget::default())
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assume!(!orbit.truncated);
    for (i, (t, p)) in trop.iter().zip(&orbit.values).enumerate() {
        let d = p.dvector().unwrap();
        if *t != d {
            return fail(format!("r={r}, n={}: tropical {:?} vs exact {:?}", i + 1, t.0, d.0));
        }
    }
    Ok(())
}

/// Two-variable polynomial with coefficients in `[-5, 5]` and at most six terms.
pub fn skew_matrix() -> impl Strategy<Value = ExchangeMatrix> {
    skew_matrix_entries(2)
}

pub fn small_poly() -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec(((-2i32..=2, -2i32..=2), -5i64..=5), 1..=6).prop_filter_map("zero", |terms| {
        let p = LaurentPoly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], BigInt::from(c))));
        (!p.is_zero()).then_some(p)
    })
}

/// Monte Carlo (10^4 samples) and lattice (`M = 1000`) estimates agree
/// within three standard errors.
pub fn estimator_agreement(p: &LaurentPoly, seed: u64) -> Check {
    let mc = mc_estimate::<f64>(p, &SamplerConfig::monte_carlo(10_000, seed)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let lat = lattice_estimate::<f64>(p, &SamplerConfig::lattice(1000)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    // a monomial has zero spread and both estimates are exact
    if (mc.value - lat.value).abs() > (3.0 * mc.stderr).max(1e-12) {
        return fail(format!("{p}: mc {} +- {}, lattice {}", mc.value, mc.stderr, lat.value));
    }
    Ok(())
}

/// Jensen's formula against Monte Carlo for a univariate polynomial.
pub fn jensen_vs_mc(coeffs: &[i64], seed: u64) -> Check {
    let p = LaurentPoly::from_terms(1, coeffs.iter().enumerate().map(|(i, &c)| (vec![i as i32], BigInt::from(c))));
    prop_assume!(!p.is_zero());
    let exact = jensen_univariate(&p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mc = mc_estimate::<f64>(&p, &SamplerConfig::monte_carlo(10_000, seed)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    if (mc.value - exact).abs() > (3.0 * mc.stderr).max(1e-9) {
        return fail(format!("{p}: jensen {exact}, mc {} +- {}", mc.value, mc.stderr));
    }
    Ok(())
}

/// Skew-symmetric matrix of size at most 4 with entries in `[-max, max]`.
pub fn skew_matrix_entries(max: i64) -> impl Strategy<Value = ExchangeMatrix> {
    (2usize..=4).prop_flat_map(move |n| {
        proptest::collection::vec(-max..=max, n * (n - 1) / 2).prop_map(move |upper| {
            let mut rows = vec![vec![0i64; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = it.next().unwrap();
                    rows[i][j] = v;
                    rows[j][i] = -v;
                }
            }
            ExchangeMatrix::new(rows).unwrap()
        })
    })
}

/// `mu_k mu_j ... ` followed by `mu_k` twice returns the seed exactly.
pub fn mutation_involution(b: &ExchangeMatrix, path: &[usize], k: usize) -> Check {
    let n = b.n();
    let mut seed = Seed::initial(b.clone());
    for &j in path {
        seed = seed.mutate(j % n + 1).unwrap();
    }
    let k = k % n + 1;
    let back = seed.mutate(k).unwrap().mutate(k).unwrap();
    if back != seed {
        return fail(format!("mu_{k} twice is not the identity on {:?}", b.rows()));
    }
    if b.mutate(k).unwrap().mutate(k).unwrap() != *b {
        return fail(format!("matrix mutation mu_{k} is not an involution"));
    }
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `K` is constant along the `x_{n+2} x_n = x_{n+1}^2 + 1` and Markoff
/// orbits over 30 steps, and the rank-2 orbit satisfies
/// `x_{n+2} + x_n = K x_{n+1}`.
pub fn k_invariance(x1: f64, x2: f64, x3: f64) -> Check {
    let x = |v: f64| ExtC64::from_real(v);
    let k = |which, w: &[ExtC64]| conserved_quantity(which, w).unwrap().to_complex().re;
    let rank2 = RecurrenceDef::builtin(System::Rank2(2));
    let xs = iterate_numeric(&rank2, &[x(x1), x(x2)], &[], 32).unwrap().into_result().unwrap();
    let k0 = k(ConservedQuantity::Rank2K, &xs[0..2]);
    let re: Vec<f64> = xs.iter().map(|v| v.to_complex().re).collect();
    for n in 0..xs.len() - 2 {
        let kn = k(ConservedQuantity::Rank2K, &xs[n..n + 2]);
        if rel(kn, k0) > 1e-9 {
            return fail(format!("rank-2 K drifts at n={}: {kn} vs {k0}", n + 1));
        }
        if rel(re[n + 2] + re[n], k0 * re[n + 1]) > 1e-9 {
            return fail(format!("linear relation fails at n={}", n + 1));
        }
    }
    let markoff = RecurrenceDef::builtin(System::Markoff);
    let ys = iterate_numeric(&markoff, &[x(x1), x(x2), x(x3)], &[], 33).unwrap().into_result().unwrap();
    let m0 = k(ConservedQuantity::MarkoffK, &ys[0..3]);
    for n in 0..ys.len() - 3 {
        let kn = k(ConservedQuantity::MarkoffK, &ys[n..n + 3]);
        if rel(kn, m0) > 1e-9 {
            return fail(format!("Markoff K drifts at n={}: {kn} vs {m0}", n + 1));
        }
    }
    Ok(())
}
