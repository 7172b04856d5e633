use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::ExactTorus;
use crate::entropy::ln_bigint;
use crate::error::{Error, Result};
use crate::scalar::{cis, ExtComplex, Real};
use crate::LaurentPoly;

/// Name of the sample generator, recorded in run metadata.
pub const GENERATOR: &str = "ChaCha8Rng (stream = chunk index)";

/// Samples per work unit. Chunk `c` draws from stream `c` of the seeded
/// generator, so results do not depend on the number of threads.
pub const CHUNK: usize = 1024;

/// Cap on lattice size `M^k`.
const MAX_LATTICE_POINTS: u64 = 1 << 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    MonteCarlo,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: SamplerMode,
    /// Number of random points (Monte Carlo).
    pub sample_count: usize,
    /// Lattice of `M`-th roots of unity in each coordinate.
    pub lattice_m: usize,
    pub rng_seed: u64,
    /// Torus dimension; inferred from the integrand when `None`.
    pub torus_dim: Option<usize>,
    /// Samples with `|value|` below this are zero hits.
    pub zero_threshold: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            mode: SamplerMode::MonteCarlo,
            sample_count: 10_000,
            lattice_m: 500,
            rng_seed: 0x6d61_686c_6572,
            torus_dim: None,
            zero_threshold: 1e-300,
        }
    }
}

impl SamplerConfig {
    pub fn monte_carlo(sample_count: usize, rng_seed: u64) -> Self {
        Self { mode: SamplerMode::MonteCarlo, sample_count, rng_seed, ..Self::default() }
    }

    pub fn lattice(m: usize) -> Self {
        Self { mode: SamplerMode::Lattice, lattice_m: m, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
        }
        if self.lattice_m < 2 {
            return Err(Error::InvalidParameter("lattice_m must be at least 2".into()));
        }
        if !(self.zero_threshold > 0.0) {
            return Err(Error::InvalidParameter("zero_threshold must be positive".into()));
        }
        Ok(())
    }

    /// Resolves the torus dimension against what the integrand needs.
    pub(crate) fn dim(&self, needed: usize) -> Result<usize> {
        match self.torus_dim {
            Some(k) if k != needed => Err(Error::DimensionMismatch { left: needed, right: k }),
            _ => Ok(needed),
        }
    }

    pub(crate) fn total_points(&self, dim: usize) -> Result<usize> {
        match self.mode {
            SamplerMode::MonteCarlo => Ok(self.sample_count),
            SamplerMode::Lattice => {
                let total = (self.lattice_m as u64)
                    .checked_pow(dim as u32)
                    .filter(|&t| t <= MAX_LATTICE_POINTS)
                    .ok_or_else(|| Error::InvalidParameter(format!("lattice {}^{dim} is too large", self.lattice_m)))?;
                Ok(total as usize)
            }
        }
    }
}

/// Exact bookkeeping for `sum log|v_i|` written as
/// `ln 2 * exp_sum + mant_sum`, with the binary exponents summed as integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSum<T> {
    pub exp_sum: i128,
    pub mant_sum: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MahlerEstimate<T = f64> {
    /// Mean of `log|p|` in nats.
    pub value: T,
    /// Sample standard deviation over `sqrt(samples_used)`; zero for lattices.
    pub stderr: T,
    pub skipped: usize,
    pub samples_used: usize,
    #[serde(skip)]
    pub split: Option<SplitSum<T>>,
}

impl<T: Real> MahlerEstimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, stderr: T::zero(), skipped: 0, samples_used: 1, split: None }
    }

    /// `max(3 * stderr, floor)`.
    pub fn tolerance(&self, floor: T) -> T {
        (T::lit(3.0) * self.stderr).max(floor)
    }
}

/// Streaming mean/variance plus the exact split sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Acc<T> {
    n: usize,
    mean: T,
    m2: T,
    skipped: usize,
    exp_sum: Option<i128>,
    mant_sum: T,
}

impl<T: Real> Acc<T> {
    pub(crate) fn new() -> Self {
        Self { n: 0, mean: T::zero(), m2: T::zero(), skipped: 0, exp_sum: Some(0), mant_sum: T::zero() }
    }

    pub(crate) fn push(&mut self, (e, m): (i128, T)) {
        let x = T::from_i128(e).unwrap_or_else(T::nan) * T::LN_2() + m;
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::from_usize(self.n).expect("count");
        self.m2 = self.m2 + delta * (x - self.mean);
        self.exp_sum = self.exp_sum.and_then(|s| s.checked_add(e));
        self.mant_sum = self.mant_sum + m;
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn merge(&mut self, o: &Self) {
        if o.n > 0 {
            let n = self.n + o.n;
            let (na, nb) = (T::from_usize(self.n).expect("count"), T::from_usize(o.n).expect("count"));
            let nt = na + nb;
            let delta = o.mean - self.mean;
            self.mean = self.mean + delta * nb / nt;
            self.m2 = self.m2 + o.m2 + delta * delta * na * nb / nt;
            self.n = n;
        }
        self.skipped += o.skipped;
        self.exp_sum = match (self.exp_sum, o.exp_sum) {
            (Some(a), Some(b)) => a.checked_add(b),
            _ => None,
        };
        self.mant_sum = self.mant_sum + o.mant_sum;
    }

    pub(crate) fn samples(&self) -> usize {
        self.n
    }

    pub(crate) fn skipped(&self) -> usize {
        self.skipped
    }

    pub(crate) fn finish(&self, with_stderr: bool) -> MahlerEstimate<T> {
        let stderr = if with_stderr && self.n > 1 {
            let var = self.m2 / T::from_usize(self.n - 1).expect("count");
            (var.max(T::zero()) / T::from_usize(self.n).expect("count")).sqrt()
        } else {
            T::zero()
        };
        MahlerEstimate {
            value: if self.n > 0 { self.mean } else { T::nan() },
            stderr,
            skipped: self.skipped,
            samples_used: self.n,
            split: self.exp_sum.map(|exp_sum| SplitSum { exp_sum, mant_sum: self.mant_sum, count: self.n }),
        }
    }
}

/// `log|v|` split as `(binary exponent, log of mantissa modulus)`, or `None`
/// for a zero hit.
pub(crate) fn log_split<T: Real>(v: &ExtComplex<T>, ln_threshold: T) -> Option<(i128, T)> {
    if v.is_zero() || v.is_nan() {
        return None;
    }
    let (e, m) = v.ln_abs_split();
    let total = T::from_i128(e)? * T::LN_2() + m;
    (total >= ln_threshold && m.is_finite()).then_some((e, m))
}

/// Runs `f` on every sample point and accumulates `outputs` statistics.
///
/// `f` receives the angles of one point and fills one slot per output with
/// the split logarithm of the integrand, or `None` to skip.
pub(crate) fn run<T, F>(cfg: &SamplerConfig, dim: usize, outputs: usize, f: F) -> Result<Vec<Acc<T>>>
where
    T: Real,
    F: Fn(&[T], &mut [Option<(i128, T)>]) + Sync,
{
    cfg.validate()?;
    let total = cfg.total_points(dim)?;
    let chunks = total.div_ceil(CHUNK);
    let pi = T::PI();
    let tau = T::lit(std::f64::consts::TAU);
    let m = cfg.lattice_m;
    let parts: Vec<Vec<Acc<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(c as u64);
            let mut accs = vec![Acc::new(); outputs];
            let mut angles = vec![T::zero(); dim];
            let mut slots = vec![None; outputs];
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                match cfg.mode {
                    SamplerMode::MonteCarlo => {
                        for a in angles.iter_mut() {
                            // uniform on (-pi, pi]
                            let u: f64 = rng.random();
                            *a = pi - tau * T::lit(u);
                        }
                    }
                    SamplerMode::Lattice => {
                        let mut rest = idx;
                        for a in angles.iter_mut() {
                            let j = rest % m;
                            rest /= m;
                            let t = tau * T::from_usize(j).expect("index") / T::from_usize(m).expect("index");
                            *a = if t > pi { t - tau } else { t };
                        }
                    }
                }
                slots.iter_mut().for_each(|s| *s = None);
                f(&angles, &mut slots);
                for (acc, s) in accs.iter_mut().zip(&slots) {
                    match s {
                        Some(v) => acc.push(*v),
                        None => acc.skip(),
                    }
                }
            }
            accs
        })
        .collect();
    let mut out = vec![Acc::new(); outputs];
    for part in &parts {
        for (o, p) in out.iter_mut().zip(part) {
            o.merge(p);
        }
    }
    Ok(out)
}

/// Precomputed torus evaluator; works in native floats when the
/// coefficient mass is representable and falls back to extended range.
/// Values too small to trust against the rounding error of the sum are
/// recomputed exactly.
pub(crate) struct TorusEvaluator<'a, T> {
    poly: &'a LaurentPoly,
    native: Option<Vec<(Vec<i32>, T)>>,
    /// Below this `ln|v|` the floating sum has no reliable digits.
    ln_guard: f64,
    exact: OnceLock<ExactTorus>,
}

impl<'a, T: Real> TorusEvaluator<'a, T> {
    pub(crate) fn new(poly: &'a LaurentPoly) -> Self {
        let mass: f64 = poly.terms().map(|(_, c)| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum();
        let limit = T::max_value().to_f64().unwrap_or(f64::MAX) * 1e-6;
        let native = (mass.is_finite() && mass < limit)
            .then(|| poly.terms().map(|(e, c)| (e.clone(), T::lit(c.to_f64().expect("finite")))).collect());
        let abs_sum: BigInt = poly.terms().map(|(_, c)| c.abs()).sum();
        let deg: i64 = match (poly.min_exponents(), poly.max_exponents()) {
            (Some(lo), Some(hi)) => hi.iter().zip(&lo).map(|(&h, &l)| i64::from(h - l)).sum(),
            _ => 0,
        };
        let ops = (poly.num_terms() as i64 + deg + 4) as f64;
        let eps = T::epsilon().to_f64().unwrap_or(f64::EPSILON);
        let ln_guard = ln_bigint(&abs_sum) + (1e8 * ops * eps).ln();
        Self { poly, native, ln_guard, exact: OnceLock::new() }
    }

    pub(crate) fn eval(&self, angles: &[T]) -> ExtComplex<T> {
        match &self.native {
            Some(terms) => {
                let z: Vec<Complex<T>> = angles.iter().map(|&t| cis(t)).collect();
                let mut acc = Complex::new(T::zero(), T::zero());
                for (e, c) in terms {
                    let mut t = Complex::new(*c, T::zero());
                    for (zi, &k) in z.iter().zip(e) {
                        if k != 0 {
                            t = t * zi.powi(k);
                        }
                    }
                    acc = acc + t;
                }
                ExtComplex::from_complex(acc)
            }
            None => self.poly.eval_on_torus(angles),
        }
    }

    /// Split `log|p|` at `angles`, or `None` for a zero hit.
    pub(crate) fn log_abs(&self, angles: &[T], ln_threshold: T) -> Option<(i128, T)> {
        let v = self.eval(angles);
        if let Some((e, m)) = log_split(&v, T::lit(f64::MIN)) {
            let ln = e as f64 * std::f64::consts::LN_2 + m.to_f64().unwrap_or(f64::NAN);
            if ln >= self.ln_guard {
                return (T::from_i128(e)? * T::LN_2() + m >= ln_threshold).then_some((e, m));
            }
        }
        let exact = self.exact.get_or_init(|| ExactTorus::new(self.poly));
        let angles: Vec<f64> = angles.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect();
        let ln = T::lit(exact.log_abs(&angles)?);
        (ln >= ln_threshold).then_some((0, ln))
    }
}

fn estimate<T: Real>(p: &LaurentPoly, cfg: &SamplerConfig) -> Result<MahlerEstimate<T>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("Mahler measure"));
    }
    let dim = cfg.dim(p.nvars())?;
    let ev = TorusEvaluator::<T>::new(p);
    let ln_thr = T::lit(cfg.zero_threshold.ln());
    let accs = run(cfg, dim, 1, |angles, out| {
        out[0] = ev.log_abs(angles, ln_thr);
    })?;
    let acc = &accs[0];
    if acc.samples() == 0 {
        return Err(Error::AllSamplesSkipped(cfg.total_points(dim)?));
    }
    Ok(acc.finish(cfg.mode == SamplerMode::MonteCarlo))
}

/// Monte Carlo mean of `log|p|` over `cfg.sample_count` uniform torus points.
pub fn mc_estimate<T: Real>(p: &LaurentPoly, cfg: &SamplerConfig) -> Result<MahlerEstimate<T>> {
    estimate(p, &SamplerConfig { mode: SamplerMode::MonteCarlo, ..cfg.clone() })
}

/// Mean of `log|p|` over the `M^k` grid of `M`-th roots of unity.
pub fn lattice_estimate<T: Real>(p: &LaurentPoly, cfg: &SamplerConfig) -> Result<MahlerEstimate<T>> {
    estimate(p, &SamplerConfig { mode: SamplerMode::Lattice, ..cfg.clone() })
}
