use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Coeff, Laurent};
use crate::error::{Error, Result};
use crate::scalar::{ExtComplex, Real};

/// Value ring an integer Laurent polynomial can be evaluated in.
///
/// Orbits of a recurrence are computed by evaluating its right-hand side in
/// one of these rings: Laurent polynomials (symbolic), exact rationals, or
/// extended-range complex numbers. Constants are lifted relative to an
/// existing value so rings that need context (the variable count) get it.
pub trait Ring: Clone {
    fn lift(&self, c: &BigInt) -> Self;
    fn add(&self, rhs: &Self) -> Result<Self>;
    fn mul(&self, rhs: &Self) -> Result<Self>;
    /// Exact or checked division; a zero divisor is an error.
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
}

impl<C: Coeff> Ring for Laurent<C> {
    fn lift(&self, c: &BigInt) -> Self {
        Laurent::constant(self.nvars(), C::from_bigint(c).expect("constant fits coefficient ring"))
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        self.try_add(rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        self.try_mul(rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        self.div_exact(rhs)
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
}

impl Ring for BigRational {
    fn lift(&self, c: &BigInt) -> Self {
        BigRational::from_integer(c.clone())
    }
    // integer fast paths: Ratio's operators reduce by a gcd, which is slow
    // on very large integers
    fn add(&self, rhs: &Self) -> Result<Self> {
        if self.is_integer() && rhs.is_integer() {
            return Ok(BigRational::from_integer(self.numer() + rhs.numer()));
        }
        Ok(self + rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.is_integer() && rhs.is_integer() {
            return Ok(BigRational::from_integer(self.numer() * rhs.numer()));
        }
        Ok(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if Zero::is_zero(rhs) {
            return Err(Error::ZeroDivision { step: 0 });
        }
        if self.is_integer() && rhs.is_integer() {
            let (q, r) = num_integer::Integer::div_rem(self.numer(), rhs.numer());
            if r.is_zero() {
                return Ok(BigRational::from_integer(q));
            }
        }
        Ok(self / rhs)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl<T: Real> Ring for ExtComplex<T> {
    fn lift(&self, c: &BigInt) -> Self {
        ExtComplex::from_bigint(c)
    }
    fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(*self + *rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * *rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDivision { step: 0 });
        }
        Ok(*self / *rhs)
    }
    fn is_zero(&self) -> bool {
        ExtComplex::is_zero(self)
    }
}

impl<C: Coeff> Laurent<C> {
    /// Evaluates with each variable replaced by a value from `point`.
    ///
    /// Negative exponents divide, so they fail exactly when the ring division
    /// fails (zero value, or a non-Laurent quotient).
    pub fn eval_in<R: Ring>(&self, point: &[R]) -> Result<R> {
        if point.len() != self.nvars() {
            return Err(Error::DimensionMismatch { left: self.nvars(), right: point.len() });
        }
        let ctx = point.first().ok_or_else(|| Error::InvalidParameter("empty evaluation point".into()))?;
        let one = ctx.lift(&BigInt::one());
        let mut cache: HashMap<(usize, i32), R> = HashMap::new();
        let mut acc = ctx.lift(&BigInt::zero());
        for (e, c) in self.terms() {
            let mut t = ctx.lift(&c.to_bigint());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((i, k)) {
                    let mut p = one.clone();
                    let mut base = point[i].clone();
                    let mut n = k.unsigned_abs();
                    while n > 0 {
                        if n & 1 == 1 {
                            p = p.mul(&base)?;
                        }
                        n >>= 1;
                        if n > 0 {
                            base = base.mul(&base)?;
                        }
                    }
                    if k < 0 {
                        p = one.div(&p)?;
                    }
                    e.insert(p);
                }
                t = t.mul(&cache[&(i, k)])?;
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Replaces variable `i` by `images[i]` (all in a common ring of `m`
    /// variables).
    ///
    /// Negative powers are collected into one denominator and removed with
    /// an exact division, so images need only be invertible where the
    /// polynomial actually has negative exponents.
    pub fn substitute(&self, images: &[Laurent<C>]) -> Result<Laurent<C>> {
        if images.len() != self.nvars() {
            return Err(Error::DimensionMismatch { left: self.nvars(), right: images.len() });
        }
        let m = images.first().map(Laurent::nvars).unwrap_or(0);
        if let Some(bad) = images.iter().find(|q| q.nvars() != m) {
            return Err(Error::DimensionMismatch { left: m, right: bad.nvars() });
        }
        if self.is_zero() {
            return Ok(Laurent::zero(m));
        }
        let lows = self.min_exponents().expect("nonzero");
        let shift: Vec<i32> = lows.iter().map(|&l| (-l).max(0)).collect();
        let numer = self.mul_monomial(&shift, &C::one());
        let mut denom = Laurent::one(m);
        for (img, &s) in images.iter().zip(&shift) {
            if s > 0 {
                denom = denom.try_mul(&img.pow(s as i64)?)?;
            }
        }
        let value = numer.eval_in(images)?;
        value.div_exact(&denom)
    }
}
