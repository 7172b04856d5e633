//! Algebraic, Diophantine and Mahler entropy estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::DVector;
use crate::mahler::{
    markoff_recursion_sequence, orbit_mahler_sequence, somos4_recursion_sequence, FrozenParam, MahlerSequence,
    SamplerConfig,
};
use crate::recurrence::{iterate_rational, iterate_symbolic, RecurrenceDef, SymbolicBudget, System};
use crate::scalar::Real;

/// `d_{n+2} + d_n = max(r d_{n+1}, 0)` componentwise from
/// `d_1 = (-1, 0)`, `d_2 = (0, -1)`; returns `d_1..d_{n_max}`.
pub fn tropical_dvectors(r: u32, n_max: usize) -> Result<Vec<DVector>> {
    let mut out = vec![DVector(vec![-1, 0]), DVector(vec![0, -1])];
    out.truncate(n_max);
    while out.len() < n_max {
        let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
        let next = a
            .0
            .iter()
            .zip(&b.0)
            .map(|(&x, &y)| (r as i64).checked_mul(y).map(|v| v.max(0)).and_then(|v| v.checked_sub(x)))
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Error::Overflow(format!("d-vector at n={}", out.len() + 1)))?;
        out.push(DVector(next));
    }
    Ok(out)
}

/// Max-plus shadow of a subtraction-free recurrence: for the weight `w`,
/// `t_n = max over monomials of x_n of <w, e>`, exact because no
/// cancellation can occur.
pub fn tropical_weight_degrees(def: &RecurrenceDef, w: &[i64], n_max: usize) -> Result<Vec<i64>> {
    let order = def.order();
    if !def.params().is_empty() || !def.rhs().has_positive_coefficients() {
        return Err(Error::InvalidParameter("tropical degrees need a parameter-free, subtraction-free recurrence".into()));
    }
    if w.len() != order {
        return Err(Error::DimensionMismatch { left: order, right: w.len() });
    }
    let overflow = |n: usize| Error::Overflow(format!("tropical degree at n={n}"));
    let dot = |e: &[i32], t: &[i64], n: usize| -> Result<i64> {
        e.iter()
            .zip(t)
            .try_fold(0i64, |acc, (&k, &v)| acc.checked_add((k as i64).checked_mul(v)?))
            .ok_or_else(|| overflow(n))
    };
    let mut t: Vec<i64> = w.iter().take(n_max).copied().collect();
    let divisor: Vec<i32> = def.divisor().to_vec();
    for n in order..n_max {
        let window = &t[n - order..n];
        let mut best: Option<i64> = None;
        for (e, _) in def.rhs().terms() {
            let v = dot(e, window, n + 1)?;
            best = Some(best.map_or(v, |b| b.max(v)));
        }
        let den = dot(&divisor, window, n + 1)?;
        let v = best.unwrap_or(0).checked_sub(den).ok_or_else(|| overflow(n + 1))?;
        t.push(v);
    }
    Ok(t)
}

/// Degree data for one iterate, from either source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterateDegree {
    pub n: usize,
    pub dvector: DVector,
    /// Larger of the numerator and denominator total degrees.
    pub degree: u64,
    /// Sum of the per-variable numerator degrees.
    pub sdeg: u64,
}

/// Degrees of `x_1..x_{n_max}` from tropical recursions with the weights
/// `(1, ..., 1)` and `-e_j`, `+e_j` for each variable.
pub fn tropical_degree_profile(def: &RecurrenceDef, n_max: usize) -> Result<Vec<IterateDegree>> {
    let order = def.order();
    let ones = tropical_weight_degrees(def, &vec![1; order], n_max)?;
    let mut neg = Vec::with_capacity(order);
    let mut pos = Vec::with_capacity(order);
    for j in 0..order {
        let mut w = vec![0; order];
        w[j] = -1;
        neg.push(tropical_weight_degrees(def, &w, n_max)?);
        w[j] = 1;
        pos.push(tropical_weight_degrees(def, &w, n_max)?);
    }
    Ok((0..ones.len())
        .map(|i| {
            // d_j = -min e_j = max of -e_j
            let d: Vec<i64> = neg.iter().map(|t| t[i]).collect();
            let total_d: i64 = d.iter().sum();
            let num = ones[i] + total_d;
            let moved: i64 = d.iter().map(|&x| (-x).max(0)).sum();
            let den: i64 = d.iter().map(|&x| x.max(0)).sum();
            let sdeg: i64 = pos.iter().zip(&d).map(|(t, dj)| t[i] + dj).sum();
            IterateDegree { n: i + 1, dvector: DVector(d), degree: (num + moved).max(den) as u64, sdeg: sdeg as u64 }
        })
        .collect())
}

/// Same data from exact symbolic iterates.
pub fn symbolic_degree_profile(def: &RecurrenceDef, n_max: usize, budget: SymbolicBudget) -> Result<(Vec<IterateDegree>, bool)> {
    let orbit = iterate_symbolic(def, n_max, budget)?;
    let out = orbit
        .values
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let prof = p.degree_profile()?;
            Ok(IterateDegree { n: i + 1, dvector: p.dvector()?, degree: prof.rational_degree, sdeg: prof.sdeg })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, orbit.truncated))
}

/// 0 for `r <= 2`, `log((r + sqrt(r^2 - 4))/2)` beyond.
pub fn rank2_entropy_exact(r: u32) -> f64 {
    if r <= 2 {
        return 0.0;
    }
    let r = r as f64;
    ((r + (r * r - 4.0).sqrt()) / 2.0).ln()
}

/// Known entropy of a built-in system.
pub fn exact_entropy(system: System) -> Option<f64> {
    match system {
        System::Rank2(r) => Some(rank2_entropy_exact(r)),
        System::Lyness | System::Somos4 => Some(0.0),
        System::Markoff => Some(((1.0 + 5f64.sqrt()) / 2.0).ln()),
        System::Hv => None,
    }
}

/// Natural log of `|n|`, for integers beyond the `f64` range too.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (n.abs() >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Height `max(|p|, |q|)` of `p/q` in lowest terms, `H(0) = 1`.
pub fn height(q: &BigRational) -> BigInt {
    let (p, d) = (q.numer().abs(), q.denom().abs());
    if p.bits() == 0 {
        return BigInt::from(1);
    }
    p.max(d)
}

/// `log H(q)`.
pub fn log_height(q: &BigRational) -> f64 {
    ln_bigint(&height(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `S_n` against `n`.
    Linear,
    /// `log S_n` against `n`.
    Exponential,
    /// `S_n` against `n^2`.
    Quadratic,
    /// `log S_n` against `log n`.
    LogLog,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    /// Inclusive `[n_lo, n_hi]`.
    pub window: (usize, usize),
    pub residual_rms: f64,
    /// Same growth rate from the two window endpoints alone.
    pub two_point: Option<f64>,
    pub points: usize,
    /// Points dropped because the transform needs `S_n > 0`.
    pub excluded: usize,
}

impl SlopeFit {
    /// Model value at `n`.
    pub fn predict(&self, n: f64) -> f64 {
        match self.kind {
            FitKind::Linear => self.intercept + self.slope * n,
            FitKind::Exponential => (self.intercept + self.slope * n).exp(),
            FitKind::Quadratic => self.intercept + self.slope * n * n,
            FitKind::LogLog => (self.intercept + self.slope * n.ln()).exp(),
        }
    }
}

fn transform(kind: FitKind, n: f64, y: f64) -> Option<(f64, f64)> {
    match kind {
        FitKind::Linear => Some((n, y)),
        FitKind::Quadratic => Some((n * n, y)),
        FitKind::Exponential => (y > 0.0).then(|| (n, y.ln())),
        FitKind::LogLog => (y > 0.0).then(|| (n.ln(), y.ln())),
    }
}

/// Least-squares fit over `points = [(n, S_n)]` restricted to `window`
/// (default: the trailing half).
pub fn fit_sequence(points: &[(usize, f64)], kind: FitKind, window: Option<(usize, usize)>) -> Result<SlopeFit> {
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let last = points.iter().map(|p| p.0).max().ok_or_else(|| Error::InsufficientData("empty sequence".into()))?;
            (last.div_ceil(2).max(1), last)
        }
    };
    if lo >= hi {
        return Err(Error::InvalidParameter(format!("window [{lo}, {hi}] is empty")));
    }
    let inside: Vec<(usize, f64)> = points.iter().copied().filter(|&(n, _)| n >= lo && n <= hi).collect();
    if !inside.iter().any(|p| p.0 == hi) || !inside.iter().any(|p| p.0 == lo) {
        return Err(Error::InsufficientData(format!("window [{lo}, {hi}] is outside the data")));
    }
    let xy: Vec<(f64, f64)> = inside.iter().filter_map(|&(n, y)| transform(kind, n as f64, y)).collect();
    let excluded = inside.len() - xy.len();
    if xy.len() < 5 {
        return Err(Error::InsufficientData(format!("{} usable points in [{lo}, {hi}]", xy.len())));
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    let at = |n: usize| inside.iter().find(|p| p.0 == n).and_then(|&(n, y)| transform(kind, n as f64, y));
    let two_point = match (at(lo), at(hi)) {
        (Some(a), Some(b)) => Some((b.1 - a.1) / (b.0 - a.0)),
        _ => None,
    };
    Ok(SlopeFit { kind, slope, intercept, window: (lo, hi), residual_rms, two_point, points: xy.len(), excluded })
}

/// Fits every kind in `kinds` and keeps the one with the smallest RMS
/// relative error in `S_n` space.
pub fn best_growth_fit(points: &[(usize, f64)], kinds: &[FitKind], window: Option<(usize, usize)>) -> Result<SlopeFit> {
    let mut best: Option<(f64, SlopeFit)> = None;
    let mut last_err = None;
    for &kind in kinds {
        match fit_sequence(points, kind, window) {
            Ok(fit) => {
                let (lo, hi) = fit.window;
                let rel: Vec<f64> = points
                    .iter()
                    .filter(|p| p.0 >= lo && p.0 <= hi && p.1 != 0.0)
                    .map(|&(n, y)| ((fit.predict(n as f64) - y) / y).powi(2))
                    .collect();
                let score = (rel.iter().sum::<f64>() / rel.len().max(1) as f64).sqrt();
                if best.as_ref().is_none_or(|(s, _)| score < *s) {
                    best = Some((score, fit));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.map(|b| b.1).ok_or_else(|| last_err.unwrap_or(Error::InsufficientData("no fit kinds".into())))
}

fn indexed(values: impl IntoIterator<Item = f64>) -> Vec<(usize, f64)> {
    values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
}

/// Exponential fit of `log deg x_n`; bounded sequences (no growth past the
/// first half) report slope 0.
pub fn algebraic_entropy_fit(degrees: &[u64], window: Option<(usize, usize)>) -> Result<SlopeFit> {
    if degrees.len() < 5 {
        return Err(Error::InsufficientData(format!("{} degrees", degrees.len())));
    }
    let pts = indexed(degrees.iter().map(|&d| d as f64));
    let mut fit = fit_sequence(&pts, FitKind::Exponential, window)?;
    let half = degrees.len() / 2;
    let early = degrees[..half].iter().max().copied().unwrap_or(0);
    let late = degrees[half..].iter().max().copied().unwrap_or(0);
    if late <= early {
        fit.slope = 0.0;
        fit.two_point = Some(0.0);
    }
    Ok(fit)
}

/// Log heights `log H(x_n)` along the exact orbit.
pub fn log_heights(def: &RecurrenceDef, init: &[BigRational], params: &[BigRational], n_max: usize) -> Result<Vec<f64>> {
    Ok(iterate_rational(def, init, params, n_max)?.iter().map(log_height).collect())
}

/// Exponential fit of `log h(x_n)`, `h = log H`.
pub fn diophantine_entropy_fit(
    def: &RecurrenceDef,
    init: &[BigRational],
    n_max: usize,
    window: Option<(usize, usize)>,
) -> Result<SlopeFit> {
    let hs = log_heights(def, init, &[], n_max)?;
    fit_sequence(&indexed(hs), FitKind::Exponential, window)
}

/// Fit of `S_n` from a Mahler sequence.
pub fn mahler_entropy_fit<T: Real>(
    seq: &MahlerSequence<T>,
    kind: FitKind,
    window: Option<(usize, usize)>,
) -> Result<SlopeFit> {
    let pts = indexed(seq.values().iter().map(|v| v.to_f64().unwrap_or(f64::NAN)));
    fit_sequence(&pts, kind, window)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TropicalResiduals {
    /// `S_{n+2} + S_n - r S_{n+1}` for `n = 1, 2, ...`.
    pub residuals: Vec<f64>,
    /// Largest residual in the second half is at most twice the largest in
    /// the first half (plus three combined standard errors).
    pub bounded: bool,
}

/// `S_{n+2} + S_n - r S_{n+1}`, from the exact split sums when all three
/// terms share the same sample count.
pub fn tropical_mahler_residuals<T: Real>(seq: &MahlerSequence<T>, r: u32) -> TropicalResiduals {
    let rr = r as i128;
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let est = &seq.estimates;
    let mut residuals = Vec::new();
    let mut noise: f64 = 0.0;
    for w in est.windows(3) {
        let split = match (&w[0].split, &w[1].split, &w[2].split) {
            (Some(a), Some(b), Some(c)) if a.count == b.count && b.count == c.count && a.count > 0 => {
                let e = a.exp_sum + c.exp_sum - rr * b.exp_sum;
                let m = f(a.mant_sum) + f(c.mant_sum) - r as f64 * f(b.mant_sum);
                Some((e as f64 * std::f64::consts::LN_2 + m) / a.count as f64)
            }
            _ => None,
        };
        residuals.push(split.unwrap_or_else(|| f(w[2].value) + f(w[0].value) - r as f64 * f(w[1].value)));
        noise = noise.max(3.0 * f(w[0].stderr).hypot(f(w[2].stderr)));
    }
    let half = residuals.len() / 2;
    let peak = |s: &[f64]| s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bounded = residuals.iter().all(|v| v.is_finite())
        && (residuals.len() < 4 || peak(&residuals[half..]) <= 2.0 * peak(&residuals[..half]) + noise);
    TropicalResiduals { residuals, bounded }
}

/// Resource settings for [`compare_entropies`].
#[derive(Debug, Clone, Serialize)]
pub struct EntropyBudgets {
    pub degree_n: usize,
    pub height_n: usize,
    /// Stop the height orbit once a height exceeds this many bits.
    pub height_bits: u64,
    pub mahler_n: usize,
    pub sampler: SamplerConfig,
    pub mahler_window: Option<(usize, usize)>,
    #[serde(skip)]
    pub symbolic: SymbolicBudget,
}

impl Default for EntropyBudgets {
    fn default() -> Self {
        Self {
            degree_n: 30,
            height_n: 30,
            height_bits: 4_000_000,
            mahler_n: 60,
            sampler: SamplerConfig::default(),
            mahler_window: None,
            symbolic: SymbolicBudget { max_terms: 200_000, max_pairs: 50_000_000 },
        }
    }
}

impl EntropyBudgets {
    /// Settings matching the published runs for a built-in system.
    pub fn for_system(system: System) -> Self {
        let base = Self::default();
        match system {
            System::Rank2(r) if r >= 3 => {
                let (n, w) = match r {
                    3 => (49, (25, 49)),
                    4 => (36, (16, 36)),
                    _ => (31, (16, 31)),
                };
                Self { mahler_n: n, mahler_window: Some(w), ..base }
            }
            System::Rank2(_) => Self { mahler_n: 100, mahler_window: Some((50, 100)), ..base },
            System::Markoff => Self { mahler_n: 97, mahler_window: Some((50, 97)), ..base },
            System::Somos4 => Self { height_n: 60, mahler_n: 100, mahler_window: Some((50, 100)), ..base },
            _ => base,
        }
    }
}

/// One estimator's outcome; failures are recorded rather than fatal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitField {
    pub fit: Option<SlopeFit>,
    /// Growth model chosen for zero-entropy systems, with its fit.
    pub growth: Option<SlopeFit>,
    pub error: Option<String>,
}

impl FitField {
    fn from(exp: Result<SlopeFit>, growth: Option<SlopeFit>) -> Self {
        match exp {
            Ok(fit) => Self { fit: Some(fit), growth, error: None },
            Err(e) => Self { fit: None, growth, error: Some(e.to_string()) },
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.slope)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub schema_version: u32,
    pub system: String,
    pub algebraic: FitField,
    pub diophantine: FitField,
    pub mahler: FitField,
    pub exact_reference: Option<f64>,
    /// Mahler slope at most the Diophantine slope plus 5e-3.
    pub ordering_holds: Option<bool>,
    pub assumptions: Vec<String>,
}

const GROWTH_KINDS: [FitKind; 3] = [FitKind::Linear, FitKind::Quadratic, FitKind::Exponential];

fn growth_if_flat(pts: &[(usize, f64)], fit: &Result<SlopeFit>, window: Option<(usize, usize)>) -> Option<SlopeFit> {
    match fit {
        Ok(f) if f.slope.abs() < 0.1 => best_growth_fit(pts, &GROWTH_KINDS, window).ok(),
        _ => None,
    }
}

/// All three entropy estimates for one system.
pub fn compare_entropies(system: System, budgets: &EntropyBudgets) -> EntropyReport {
    let def = RecurrenceDef::builtin(system);
    let order = def.order();
    let mut assumptions = Vec::new();

    // degrees: symbolic while affordable, tropical otherwise
    let degrees: Result<Vec<u64>> = (|| {
        let (sym, truncated) = symbolic_degree_profile(&def, budgets.degree_n, budgets.symbolic)?;
        if !truncated && sym.len() >= budgets.degree_n {
            return Ok(sym.iter().map(|d| d.degree).collect());
        }
        let trop = tropical_degree_profile(&def, budgets.degree_n)?;
        assumptions.push(format!(
            "degrees for n > {} from the max-plus recursion (exact for subtraction-free recurrences)",
            sym.len()
        ));
        Ok(trop.iter().map(|d| d.degree).collect())
    })();
    let algebraic = match degrees {
        Ok(ds) => {
            let pts = indexed(ds.iter().map(|&d| d as f64));
            let fit = algebraic_entropy_fit(&ds, None);
            let growth = growth_if_flat(&pts, &fit, None);
            FitField::from(fit, growth)
        }
        Err(e) => FitField::from(Err(e), None),
    };

    // heights from the all-ones orbit, cut off at the bit budget
    let ones = vec![BigRational::from_integer(1.into()); order];
    let diophantine = match iterate_rational(&def, &ones, &[], budgets.height_n.min(order + 1)).and_then(|_| {
        let mut xs: Vec<BigRational> = ones.clone();
        while xs.len() < budgets.height_n {
            let next = def.step(&xs[xs.len() - order..], &[])?;
            if height(&next).bits() > budgets.height_bits {
                break;
            }
            xs.push(next);
        }
        Ok(xs)
    }) {
        Ok(xs) => {
            if xs.len() < budgets.height_n {
                assumptions.push(format!("heights stop at n = {} (bit budget)", xs.len()));
            }
            let pts = indexed(xs.iter().map(log_height));
            let fit = fit_sequence(&pts, FitKind::Exponential, None);
            let growth = growth_if_flat(&pts, &fit, None);
            FitField::from(fit, growth)
        }
        Err(e) => FitField::from(Err(e), None),
    };

    let seq: Result<MahlerSequence<f64>> = match system {
        System::Markoff => markoff_recursion_sequence(budgets.mahler_n, &budgets.sampler),
        System::Somos4 => somos4_recursion_sequence(budgets.mahler_n, &budgets.sampler),
        _ => {
            let params = vec![FrozenParam::Torus; def.params().len()];
            orbit_mahler_sequence(&def, budgets.mahler_n, &budgets.sampler, &params)
        }
    };
    let mahler = match seq {
        Ok(s) => {
            if let Some(reason) = &s.truncated {
                assumptions.push(format!("Mahler sequence truncated: {reason}"));
            }
            let pts = indexed(s.values());
            let window = budgets.mahler_window.filter(|w| w.1 <= s.len());
            let fit = fit_sequence(&pts, FitKind::Exponential, window);
            let growth = growth_if_flat(&pts, &fit, window);
            FitField::from(fit, growth)
        }
        Err(e) => FitField::from(Err(e), None),
    };

    let ordering_holds = match (mahler.slope(), diophantine.slope()) {
        (Some(m), Some(h)) => Some(m <= h + 5e-3),
        _ => None,
    };
    EntropyReport {
        schema_version: 1,
        system: system.to_string(),
        algebraic,
        diophantine,
        mahler,
        exact_reference: exact_entropy(system),
        ordering_holds,
        assumptions,
    }
}
