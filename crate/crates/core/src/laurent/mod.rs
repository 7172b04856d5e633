//! Sparse multivariate Laurent polynomials with exact integer coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration order is
//! lexicographic and two polynomials are equal exactly when their term maps
//! are. Zero coefficients are never stored.

mod degree;
mod eval;
mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{ExtComplex, Real};

pub use degree::{DVector, DegreeProfile};
pub use eval::Ring;

/// Exponent vector of a single term.
pub type Exponents = Vec<i32>;

/// Integer coefficient ring for [`Laurent`].
pub trait Coeff:
    Clone + Ord + Hash + Signed + Integer + FromPrimitive + ToPrimitive + fmt::Display + fmt::Debug + Send + Sync + 'static
{
    fn to_bigint(&self) -> BigInt;

    fn from_bigint(n: &BigInt) -> Option<Self>;

    fn to_ext<T: Real>(&self) -> ExtComplex<T> {
        ExtComplex::from_bigint(&self.to_bigint())
    }
}

impl Coeff for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn from_bigint(n: &BigInt) -> Option<Self> {
        Some(n.clone())
    }
}

impl Coeff for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(n: &BigInt) -> Option<Self> {
        n.to_i64()
    }

    fn to_ext<T: Real>(&self) -> ExtComplex<T> {
        ExtComplex::from_real(T::from_i64(*self).expect("i64 to float"))
    }
}

impl Coeff for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn from_bigint(n: &BigInt) -> Option<Self> {
        n.to_i128()
    }
}

/// Laurent polynomial in `nvars` variables over the integer ring `C`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<C> {
    nvars: usize,
    terms: BTreeMap<Exponents, C>,
}

// Products with more than this many term pairs are split across threads.
const PARALLEL_PRODUCT: usize = 1 << 16;

impl<C: Coeff> Laurent<C> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The variable `x_{index+1}` (zero-based index).
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::monomial(nvars, e, C::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: C) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    /// Collects terms, merging duplicate exponents and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, C)>) -> Self {
        let mut map: BTreeMap<Exponents, C> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            accumulate(&mut map, e, c);
        }
        Self { nvars, terms: map }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[i32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Largest term in lexicographic order.
    pub fn leading_term(&self) -> Option<(&Exponents, &C)> {
        self.terms.iter().next_back()
    }

    /// Returns `true` if every coefficient is positive.
    pub fn has_positive_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let mut m = it.next()?.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        Some(m)
    }

    pub fn max_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let mut m = it.next()?.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).max(*b);
            }
        }
        Some(m)
    }

    /// Converts coefficients to another integer ring.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        Laurent::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Embeds into a ring with more variables; old variable `i` becomes `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Self {
        assert_eq!(positions.len(), self.nvars);
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut ne = vec![0; nvars];
                for (i, &p) in positions.iter().enumerate() {
                    ne[p] += e[i];
                }
                (ne, c.clone())
            }),
        )
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let (mut out, small) =
            if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (e, c) in &small.terms {
            accumulate(&mut out.terms, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    /// Multiplies by `c * x^shift`.
    pub fn mul_monomial(&self, shift: &[i32], c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, k)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), k.clone() * c.clone()))
            .collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if let Some((e, c)) = other.single_term() {
            return Ok(self.mul_monomial(e, c));
        }
        if let Some((e, c)) = self.single_term() {
            return Ok(other.mul_monomial(e, c));
        }
        let (a, b) = if self.terms.len() >= other.terms.len() { (self, other) } else { (other, self) };
        let b_terms: Vec<(&Exponents, &C)> = b.terms.iter().collect();
        let product = |chunk: &[(&Exponents, &C)]| -> HashMap<Exponents, C> {
            // products collide heavily, so the pair count overstates the output size
            let mut acc: HashMap<Exponents, C> = HashMap::with_capacity((chunk.len() * b_terms.len()).min(1 << 16));
            for (ea, ca) in chunk {
                for (eb, cb) in &b_terms {
                    let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                    let c = (*ca).clone() * (*cb).clone();
                    match acc.entry(e) {
                        std::collections::hash_map::Entry::Occupied(mut o) => {
                            *o.get_mut() = o.get().clone() + c;
                        }
                        std::collections::hash_map::Entry::Vacant(v) => {
                            v.insert(c);
                        }
                    }
                }
            }
            acc
        };
        let a_terms: Vec<(&Exponents, &C)> = a.terms.iter().collect();
        let mut terms = BTreeMap::new();
        if a_terms.len() * b_terms.len() < PARALLEL_PRODUCT {
            for (e, c) in product(&a_terms) {
                if !c.is_zero() {
                    terms.insert(e, c);
                }
            }
        } else {
            let chunk = a_terms.len().div_ceil(4 * rayon::current_num_threads()).max(1);
            let parts: Vec<HashMap<Exponents, C>> = a_terms.par_chunks(chunk).map(product).collect();
            for part in parts {
                for (e, c) in part {
                    accumulate(&mut terms, e, c);
                }
            }
        }
        Ok(Self { nvars: self.nvars, terms })
    }

    /// `self^k` for `k >= 0`; negative powers only for monomials with unit coefficient.
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return Self::one(self.nvars).div_exact(&self.pow(-k)?);
        }
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    fn single_term(&self) -> Option<(&Exponents, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    ///
    /// Both sides are written as a monomial times a polynomial with no
    /// monomial factor; the polynomial parts are divided in lexicographic
    /// order and any nonzero remainder is reported as [`Error::NotLaurent`].
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        self.check_dims(divisor)?;
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial("inverse"));
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if let Some((e, c)) = divisor.single_term() {
            let shift: Exponents = e.iter().map(|x| -x).collect();
            let mut terms = BTreeMap::new();
            for (te, tc) in &self.terms {
                let (q, r) = tc.div_rem(c);
                if !r.is_zero() {
                    return Err(Error::NotLaurent(format!("coefficient {tc} not divisible by {c}")));
                }
                terms.insert(te.iter().zip(&shift).map(|(a, b)| a + b).collect(), q);
            }
            return Ok(Self { nvars: self.nvars, terms });
        }
        let a = self.min_exponents().expect("nonzero");
        let b = divisor.min_exponents().expect("nonzero");
        let neg_a: Exponents = a.iter().map(|x| -x).collect();
        let neg_b: Exponents = b.iter().map(|x| -x).collect();
        let mut rem = self.mul_monomial(&neg_a, &C::one()).terms;
        let den = divisor.mul_monomial(&neg_b, &C::one());
        let (lead_e, lead_c) = den.leading_term().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero");
        let den_terms: Vec<(Exponents, C)> = den.terms.into_iter().collect();
        let mut quot = BTreeMap::new();
        while let Some((re, rc)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&lead_e).any(|(x, y)| x < y) {
                return Err(Error::NotLaurent("leading monomial not divisible".into()));
            }
            let (qc, r) = rc.div_rem(&lead_c);
            if !r.is_zero() {
                return Err(Error::NotLaurent("leading coefficient not divisible".into()));
            }
            let qe: Exponents = re.iter().zip(&lead_e).map(|(x, y)| x - y).collect();
            for (de, dc) in &den_terms {
                let e: Exponents = de.iter().zip(&qe).map(|(x, y)| x + y).collect();
                accumulate(&mut rem, e, -(dc.clone() * qc.clone()));
            }
            quot.insert(qe, qc);
        }
        let shift: Exponents = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        Ok(Self { nvars: self.nvars, terms: quot }.mul_monomial(&shift, &C::one()))
    }

    /// Sum of absolute coefficient values.
    pub fn length(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc + c.abs())
    }

    /// Evaluates at an extended-range complex point with no zero coordinate.
    pub fn eval_complex<T: Real>(&self, point: &[ExtComplex<T>]) -> Result<ExtComplex<T>> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch { left: self.nvars, right: point.len() });
        }
        if let Some(i) = point.iter().position(|z| z.is_zero()) {
            return Err(Error::ZeroCoordinate(i));
        }
        let mut cache: Vec<HashMap<i32, ExtComplex<T>>> = vec![HashMap::new(); self.nvars];
        let mut acc = ExtComplex::zero();
        for (e, c) in &self.terms {
            let mut t = c.to_ext::<T>();
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    let p = *cache[i].entry(k).or_insert_with(|| point[i].powi(k as i64));
                    t = t * p;
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluates at a native complex point given as unit-circle angles.
    ///
    /// Faster path used by the torus samplers; the result is returned in
    /// extended range.
    pub fn eval_on_torus<T: Real>(&self, angles: &[T]) -> ExtComplex<T> {
        let point: Vec<ExtComplex<T>> = angles.iter().map(|&t| ExtComplex::unit(t)).collect();
        self.eval_complex(&point).expect("torus points are nonzero")
    }
}

fn accumulate<C: Coeff>(map: &mut BTreeMap<Exponents, C>, e: Exponents, c: C) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().clone() + c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<C: Coeff> std::ops::$tr<&Laurent<C>> for &Laurent<C> {
            type Output = Laurent<C>;
            /// Panics on a variable-count mismatch; use the `try_` form to handle it.
            fn $m(self, rhs: &Laurent<C>) -> Laurent<C> {
                self.$f(rhs).expect("matching variable counts")
            }
        }
        impl<C: Coeff> std::ops::$tr for Laurent<C> {
            type Output = Laurent<C>;
            fn $m(self, rhs: Laurent<C>) -> Laurent<C> {
                (&self).$f(&rhs).expect("matching variable counts")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<C: Coeff> std::ops::Neg for Laurent<C> {
    type Output = Laurent<C>;
    fn neg(self) -> Laurent<C> {
        Laurent::neg(&self)
    }
}
