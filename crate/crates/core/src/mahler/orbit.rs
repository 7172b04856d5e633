use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::sampler::{log_split, run, Acc, MahlerEstimate, SamplerConfig, SamplerMode};
use crate::error::{Error, Result};
use crate::recurrence::{RecurrenceDef, ReducedKind, ReducedMap};
use crate::scalar::{ExtComplex, Real};

/// Samples stop once a binary exponent passes this bound, well inside `i128`.
const EXP_LIMIT: i128 = 1 << 110;

/// How a frozen parameter of a recurrence is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrozenParam {
    /// An extra torus coordinate.
    Torus,
    Fixed(i64),
}

/// Estimates `S_1, S_2, ...` of `m(x_n)`.
#[derive(Debug, Clone, Serialize)]
pub struct MahlerSequence<T = f64> {
    pub system: String,
    pub estimates: Vec<MahlerEstimate<T>>,
    /// Reason for stopping before `n_max`.
    pub truncated: Option<String>,
    pub config: SamplerConfig,
    pub torus_dim: usize,
    pub params: Vec<FrozenParam>,
}

impl<T: Real> MahlerSequence<T> {
    /// `S_n` for 1-based `n`.
    pub fn get(&self, n: usize) -> Option<&MahlerEstimate<T>> {
        n.checked_sub(1).and_then(|i| self.estimates.get(i))
    }

    pub fn values(&self) -> Vec<T> {
        self.estimates.iter().map(|e| e.value).collect()
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }
}

fn finish<T: Real>(
    system: String,
    accs: Vec<Acc<T>>,
    overflow_at: usize,
    cfg: &SamplerConfig,
    torus_dim: usize,
    params: Vec<FrozenParam>,
) -> MahlerSequence<T> {
    let with_stderr = cfg.mode == SamplerMode::MonteCarlo;
    let mut estimates = Vec::new();
    let mut truncated = None;
    for (i, acc) in accs.iter().enumerate() {
        let n = i + 1;
        if n >= overflow_at {
            truncated = Some(format!("extended-range overflow at n={n}"));
            break;
        }
        if acc.samples() == 0 {
            truncated = Some(format!("all samples invalid at n={n}"));
            break;
        }
        estimates.push(acc.finish(with_stderr));
    }
    MahlerSequence { system, estimates, truncated, config: cfg.clone(), torus_dim, params }
}

fn too_big<T: Real>(v: &ExtComplex<T>) -> bool {
    v.exponent().abs() > EXP_LIMIT
}

/// Orbit-accumulated estimator: every sampled initial point is iterated
/// once, and `S_n` is the sample mean of `log|x_n|`.
///
/// `params` gives one entry per recurrence parameter; torus parameters add
/// a coordinate each.
pub fn orbit_mahler_sequence<T: Real>(
    def: &RecurrenceDef,
    n_max: usize,
    cfg: &SamplerConfig,
    params: &[FrozenParam],
) -> Result<MahlerSequence<T>> {
    Ok(orbit_run(def, n_max, cfg, params, None)?.0)
}

/// Least-squares slope of `log|x_n|` against `n` over the inclusive
/// `window`, computed per sample. The mean equals the linear-fit slope of
/// `S_n` when no sample is skipped, and the standard error is that of the
/// per-sample slopes. Samples whose orbit stops inside the window are skipped.
pub fn orbit_slope_estimate<T: Real>(
    def: &RecurrenceDef,
    window: (usize, usize),
    cfg: &SamplerConfig,
    params: &[FrozenParam],
) -> Result<MahlerEstimate<T>> {
    let (lo, hi) = window;
    if lo == 0 || lo >= hi {
        return Err(Error::InvalidParameter(format!("window [{lo}, {hi}] is empty")));
    }
    let (seq, slope) = orbit_run(def, hi, cfg, params, Some(window))?;
    if seq.len() < hi {
        return Err(Error::InsufficientData(format!(
            "orbit stops at n={}: {}",
            seq.len(),
            seq.truncated.as_deref().unwrap_or("no samples")
        )));
    }
    let slope = slope.expect("window requested");
    if slope.samples() == 0 {
        return Err(Error::AllSamplesSkipped(slope.skipped()));
    }
    Ok(slope.finish(cfg.mode == SamplerMode::MonteCarlo))
}

#[allow(clippy::type_complexity)]
fn orbit_run<T: Real>(
    def: &RecurrenceDef,
    n_max: usize,
    cfg: &SamplerConfig,
    params: &[FrozenParam],
    window: Option<(usize, usize)>,
) -> Result<(MahlerSequence<T>, Option<Acc<T>>)> {
    if params.len() != def.params().len() {
        return Err(Error::InvalidParameter(format!(
            "{} parameter(s) declared, {} given",
            def.params().len(),
            params.len()
        )));
    }
    let order = def.order();
    let dim = cfg.dim(order + params.iter().filter(|p| **p == FrozenParam::Torus).count())?;
    let terms: Vec<(Vec<i32>, ExtComplex<T>)> =
        def.rhs().terms().map(|(e, c)| (e.clone(), ExtComplex::from_bigint(c))).collect();
    let divisor = def.divisor();
    let ln_thr = T::lit(cfg.zero_threshold.ln());
    let overflow_at = AtomicUsize::new(usize::MAX);

    let outputs = n_max + usize::from(window.is_some());
    let mut accs = run(cfg, dim, outputs, |angles, out| {
        let mut point: Vec<ExtComplex<T>> = angles[..order].iter().map(|&t| ExtComplex::unit(t)).collect();
        let mut extra = angles[order..].iter();
        for p in params {
            point.push(match p {
                FrozenParam::Torus => ExtComplex::unit(*extra.next().expect("dimension checked")),
                FrozenParam::Fixed(v) => ExtComplex::from_bigint(&BigInt::from(*v)),
            });
        }
        let mut xs: Vec<ExtComplex<T>> = point[..order].to_vec();
        let fixed = &point[order..];
        for n in 0..n_max {
            if n >= order {
                let w = &xs[n - order..n];
                let mut den = ExtComplex::one();
                for (x, &k) in w.iter().zip(divisor) {
                    if k != 0 {
                        den = den * x.powi(k as i64);
                    }
                }
                if den.is_zero() {
                    return;
                }
                let mut num = ExtComplex::zero();
                for (e, c) in &terms {
                    let mut t = *c;
                    for (j, &k) in e.iter().enumerate() {
                        if k != 0 {
                            let base = if j < order { w[j] } else { fixed[j - order] };
                            t = t * base.powi(k as i64);
                        }
                    }
                    num = num + t;
                }
                let x = num / den;
                if too_big(&x) {
                    overflow_at.fetch_min(n + 1, Ordering::Relaxed);
                    return;
                }
                xs.push(x);
            }
            match log_split(&xs[n], ln_thr) {
                Some(s) => out[n] = Some(s),
                None => return,
            }
        }
        if let Some((lo, hi)) = window {
            out[n_max] = window_slope(&out[lo - 1..hi]).map(|v| (0, v));
        }
    })?;
    let slope = window.map(|_| accs.pop().expect("slope output"));
    Ok((finish(def.to_string(), accs, overflow_at.into_inner(), cfg, dim, params.to_vec()), slope))
}

/// Least-squares slope of consecutive split logs against their index.
fn window_slope<T: Real>(logs: &[Option<(i128, T)>]) -> Option<T> {
    let k = T::from_usize(logs.len())?;
    let mid = (k - T::one()) / T::lit(2.0);
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (i, l) in logs.iter().enumerate() {
        let (e, m) = (*l)?;
        let x = T::from_usize(i)? - mid;
        sxy = sxy + x * (T::from_i128(e)? * T::LN_2() + m);
        sxx = sxx + x * x;
    }
    Some(sxy / sxx)
}

/// Split sum `a*L + b*M + (e, m)` of two split logarithms.
fn combine<T: Real>(a: i128, l: (i128, T), b: i128, m: (i128, T), y: (i128, T)) -> (i128, T) {
    let f = |k: i128| T::from_i128(k).expect("small coefficient");
    (a * l.0 + b * m.0 + y.0, f(a) * l.1 + f(b) * m.1 + y.1)
}

fn reduced_sequence<T: Real>(kind: ReducedKind, n_max: usize, cfg: &SamplerConfig) -> Result<MahlerSequence<T>> {
    let dim = cfg.dim(2)?;
    let ln_thr = T::lit(cfg.zero_threshold.ln());
    let overflow_at = AtomicUsize::new(usize::MAX);
    let zero = (0i128, T::zero());
    let accs = run(cfg, dim, n_max, |angles, out| {
        let mut map = ReducedMap::new(kind, ExtComplex::unit(angles[0]), ExtComplex::unit(angles[1]));
        // ys[k] = y_{k+1}
        let mut ys = vec![map.window[0], map.window[1]];
        let mut ls: Vec<(i128, T)> = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let l = match kind {
                ReducedKind::MarkoffY if n == 1 => zero,
                // L_n = L_{n-1} + log|y_{n-1}|
                ReducedKind::MarkoffY => {
                    let Some(y) = log_split(&ys[n - 2], ln_thr) else { return };
                    combine(1, ls[n - 2], 0, zero, y)
                }
                ReducedKind::Somos4Y if n <= 2 => zero,
                // L_n = 2 L_{n-1} - L_{n-2} + log|y_{n-2}|
                ReducedKind::Somos4Y => {
                    let Some(y) = log_split(&ys[n - 3], ln_thr) else { return };
                    combine(2, ls[n - 2], -1, ls[n - 3], y)
                }
            };
            ls.push(l);
            out[n - 1] = Some(l);
            if ys.len() < n + 1 {
                map = match map.step() {
                    Ok(m) => m,
                    Err(_) => return,
                };
                if too_big(&map.window[1]) {
                    overflow_at.fetch_min(n + 1, Ordering::Relaxed);
                    return;
                }
                ys.push(map.window[1]);
            }
        }
    })?;
    let name = match kind {
        ReducedKind::MarkoffY => "markoff (reduced recursion)",
        ReducedKind::Somos4Y => "somos4 (reduced recursion)",
    };
    Ok(finish(name.to_string(), accs, overflow_at.into_inner(), cfg, dim, Vec::new()))
}

/// `m(x_{n+1}) = m(x_n) + m(y_n)` with `y` sampled on the 2-torus.
pub fn markoff_recursion_sequence<T: Real>(n_max: usize, cfg: &SamplerConfig) -> Result<MahlerSequence<T>> {
    reduced_sequence(ReducedKind::MarkoffY, n_max, cfg)
}

/// `m(x_{n+2}) = 2 m(x_{n+1}) - m(x_n) + m(y_n)` with `y` sampled on the 2-torus.
pub fn somos4_recursion_sequence<T: Real>(n_max: usize, cfg: &SamplerConfig) -> Result<MahlerSequence<T>> {
    reduced_sequence(ReducedKind::Somos4Y, n_max, cfg)
}
