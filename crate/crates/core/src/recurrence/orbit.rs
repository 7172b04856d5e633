use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::RecurrenceDef;
use crate::error::{Error, Result};
use crate::laurent::Ring;
use crate::scalar::{ExtComplex, Real};
use crate::LaurentPoly;

/// Orbit `x_1, x_2, ...` computed until `n_max` or the first singular step.
#[derive(Debug, Clone)]
pub struct Orbit<R> {
    pub values: Vec<R>,
    /// Set when iteration stopped early, e.g. `ZeroDivision { step }`.
    pub halted: Option<Error>,
}

impl<R> Orbit<R> {
    pub fn into_result(self) -> Result<Vec<R>> {
        match self.halted {
            Some(e) => Err(e),
            None => Ok(self.values),
        }
    }
}

impl RecurrenceDef {
    /// Next term from the window `x_n..x_{n+N-1}`.
    pub fn step<R: Ring>(&self, window: &[R], params: &[R]) -> Result<R> {
        if window.len() != self.order() {
            return Err(Error::DimensionMismatch { left: self.order(), right: window.len() });
        }
        if params.len() != self.params().len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} parameter value(s), got {}",
                self.params().len(),
                params.len()
            )));
        }
        let point: Vec<R> = window.iter().chain(params).cloned().collect();
        let numer = self.rhs().eval_in(&point)?;
        let mut denom = window[0].lift(&BigInt::one());
        for (x, &k) in window.iter().zip(self.divisor()) {
            for _ in 0..k {
                denom = denom.mul(x)?;
            }
        }
        numer.div(&denom)
    }
}

/// Iterates from `init = (x_1, ..., x_N)`; returns `x_1..x_{n_max}`.
pub fn iterate<R: Ring>(def: &RecurrenceDef, init: &[R], params: &[R], n_max: usize) -> Result<Orbit<R>> {
    let n = def.order();
    if init.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: init.len() });
    }
    let mut values: Vec<R> = init.iter().take(n_max).cloned().collect();
    for k in n..n_max {
        match def.step(&values[k - n..k], params) {
            Ok(v) => values.push(v),
            Err(Error::ZeroDivision { .. }) => {
                return Ok(Orbit { values, halted: Some(Error::ZeroDivision { step: k as i64 + 1 }) })
            }
            Err(e @ (Error::Overflow(_) | Error::NotLaurent(_))) => return Ok(Orbit { values, halted: Some(e) }),
            Err(e) => return Err(e),
        }
    }
    Ok(Orbit { values, halted: None })
}

/// Exact rational orbit. A zero divisor is reported with the index of the
/// term that could not be formed.
pub fn iterate_rational(
    def: &RecurrenceDef,
    init: &[BigRational],
    params: &[BigRational],
    n_max: usize,
) -> Result<Vec<BigRational>> {
    iterate(def, init, params, n_max)?.into_result()
}

/// Extended-range orbit; singular steps end the orbit with `halted` set.
pub fn iterate_numeric<T: Real>(
    def: &RecurrenceDef,
    init: &[ExtComplex<T>],
    params: &[ExtComplex<T>],
    n_max: usize,
) -> Result<Orbit<ExtComplex<T>>> {
    iterate(def, init, params, n_max)
}

/// Runs the orbit backwards: returns `x_0, x_{-1}, ..., x_{1-count}` from
/// `init = (x_1, ..., x_N)`.
pub fn iterate_backward<R: Ring>(def: &RecurrenceDef, init: &[R], params: &[R], count: usize) -> Result<Orbit<R>> {
    let rev = def.reversed()?;
    let start: Vec<R> = init.iter().rev().cloned().collect();
    let mut orbit = iterate(&rev, &start, params, count + init.len())?;
    orbit.values.drain(..init.len().min(orbit.values.len()));
    if let Some(Error::ZeroDivision { step }) = &mut orbit.halted {
        // reversed index m corresponds to n = N + 1 - m
        *step = init.len() as i64 + 1 - *step;
    }
    Ok(orbit)
}

/// Resource limits for symbolic iteration.
#[derive(Debug, Clone, Copy)]
pub struct SymbolicBudget {
    /// Largest number of terms kept in any iterate or intermediate product.
    pub max_terms: usize,
    /// Largest number of term pairs formed by a single product or division.
    pub max_pairs: u64,
}

impl Default for SymbolicBudget {
    fn default() -> Self {
        Self { max_terms: 5_000_000, max_pairs: 2_000_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SymbolicOrbit {
    /// `x_1, x_2, ...` as Laurent polynomials in the initial variables
    /// followed by the parameters.
    pub values: Vec<LaurentPoly>,
    pub truncated: bool,
}

#[derive(Clone)]
struct Guarded<'a> {
    p: LaurentPoly,
    budget: &'a SymbolicBudget,
}

impl Guarded<'_> {
    fn wrap(&self, p: LaurentPoly) -> Result<Self> {
        if p.num_terms() > self.budget.max_terms {
            return Err(Error::Overflow(format!("{} terms exceed the budget", p.num_terms())));
        }
        Ok(Self { p, budget: self.budget })
    }

    fn pairs(&self, a: usize, b: usize) -> Result<()> {
        if a as u64 * b as u64 > self.budget.max_pairs {
            return Err(Error::Overflow(format!("{a} x {b} term pairs exceed the budget")));
        }
        Ok(())
    }
}

impl Ring for Guarded<'_> {
    fn lift(&self, c: &BigInt) -> Self {
        Self { p: self.p.lift(c), budget: self.budget }
    }

    fn add(&self, rhs: &Self) -> Result<Self> {
        self.wrap(self.p.try_add(&rhs.p)?)
    }

    fn mul(&self, rhs: &Self) -> Result<Self> {
        self.pairs(self.p.num_terms(), rhs.p.num_terms())?;
        self.wrap(self.p.try_mul(&rhs.p)?)
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        if !rhs.p.is_monomial() {
            self.pairs(self.p.num_terms(), rhs.p.num_terms())?;
        }
        self.wrap(self.p.div_exact(&rhs.p)?)
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero()
    }
}

/// Laurent-polynomial iterates in the `N` initial variables (parameters are
/// extra variables after them). Stops with `truncated` set once the budget
/// would be exceeded; a failed exact division is an error.
pub fn iterate_symbolic(def: &RecurrenceDef, n_max: usize, budget: SymbolicBudget) -> Result<SymbolicOrbit> {
    let total = def.order() + def.params().len();
    let wrap = |i| Guarded { p: LaurentPoly::var(total, i), budget: &budget };
    let init: Vec<Guarded> = (0..def.order()).map(wrap).collect();
    let params: Vec<Guarded> = (def.order()..total).map(wrap).collect();
    let orbit = iterate(def, &init, &params, n_max)?;
    let values = orbit.values.into_iter().map(|g| g.p).collect();
    match orbit.halted {
        None => Ok(SymbolicOrbit { values, truncated: false }),
        Some(Error::Overflow(_)) => Ok(SymbolicOrbit { values, truncated: true }),
        Some(e) => Err(e),
    }
}
