//! Scalar abstractions shared by the numeric modules.
//!
//! [`Real`] gathers the `num-traits` bounds used by every floating-point
//! routine in the crate, and [`ExtComplex`] extends a complex mantissa with an
//! integer binary exponent so that orbit values which grow doubly
//! exponentially never overflow.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Default + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Number of mantissa bits, used to decide when an addend is negligible.
    const MANTISSA_DIGITS: u32;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {
    const MANTISSA_DIGITS: u32 = f32::MANTISSA_DIGITS;
}

impl Real for f64 {
    const MANTISSA_DIGITS: u32 = f64::MANTISSA_DIGITS;
}

/// `x * 2^k`, exact as long as the result is representable.
pub fn ldexp<T: Real>(mut x: T, mut k: i64) -> T {
    // chunks small enough for f32
    const STEP: i64 = 100;
    let two = T::lit(2.0);
    while k > STEP {
        x = x * two.powi(STEP as i32);
        k -= STEP;
    }
    while k < -STEP {
        x = x * two.powi(-STEP as i32);
        k += STEP;
    }
    x * two.powi(k as i32)
}

/// `e^{i theta}` with rounding-level components set to zero, so that grid
/// points such as `theta = pi` land exactly on `-1`.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let snap = |x: T| if x.abs() < T::lit(4.0) * T::epsilon() { T::zero() } else { x };
    Complex::new(snap(theta.cos()), snap(theta.sin()))
}

/// `floor(log2 |x|)` for finite nonzero `x`, computed from the bit pattern.
pub fn floor_log2<T: Real>(x: T) -> i64 {
    let (mant, exp, _) = x.integer_decode();
    let bits = 64 - mant.leading_zeros() as i64;
    exp as i64 + bits - 1
}

/// Complex number stored as `mantissa * 2^exponent` with `|mantissa|` in
/// `[1, 2)` (or exactly zero).
///
/// The exponent is an `i128`; orbit magnitudes of order `exp(1e21)` arise in
/// the rank-2 family with `r = 5` around `n = 31`, beyond an `i64` exponent.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtComplex<T> {
    mant: Complex<T>,
    exp: i128,
}

impl<T: Real> ExtComplex<T> {
    pub fn zero() -> Self {
        Self { mant: Complex::new(T::zero(), T::zero()), exp: 0 }
    }

    pub fn one() -> Self {
        Self { mant: Complex::new(T::one(), T::zero()), exp: 0 }
    }

    pub fn nan() -> Self {
        Self { mant: Complex::new(T::nan(), T::nan()), exp: 0 }
    }

    /// Builds a normalized value from `mant * 2^exp`.
    pub fn from_parts(mant: Complex<T>, exp: i128) -> Self {
        let mut v = Self { mant, exp };
        v.normalize();
        v
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::from_parts(z, 0)
    }

    pub fn from_real(x: T) -> Self {
        Self::from_complex(Complex::new(x, T::zero()))
    }

    /// The point `e^{i theta}` on the unit circle.
    pub fn unit(theta: T) -> Self {
        Self::from_complex(cis(theta))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let bits = n.bits();
        let (sign, mag) = n.clone().into_parts();
        let shift = bits.saturating_sub(60);
        let top = (mag >> shift).to_u64().expect("at most 60 bits");
        let mut x = T::from_u64(top).expect("u64 to float");
        if sign == Sign::Minus {
            x = -x;
        }
        Self::from_parts(Complex::new(x, T::zero()), shift as i128)
    }

    pub fn mantissa(&self) -> Complex<T> {
        self.mant
    }

    pub fn exponent(&self) -> i128 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re.is_zero() && self.mant.im.is_zero()
    }

    pub fn is_nan(&self) -> bool {
        !(self.mant.re.is_finite() && self.mant.im.is_finite())
    }

    fn normalize(&mut self) {
        if self.is_nan() {
            *self = Self::nan();
            return;
        }
        if self.is_zero() {
            self.exp = 0;
            self.mant = Complex::new(T::zero(), T::zero());
            return;
        }
        // scale by the larger component first so hypot cannot overflow/underflow
        let big = self.mant.re.abs().max(self.mant.im.abs());
        let k0 = floor_log2(big);
        let mut m = Complex::new(ldexp(self.mant.re, -k0), ldexp(self.mant.im, -k0));
        let mut k = k0;
        let r = m.norm();
        let adj = floor_log2(r);
        if adj != 0 {
            m = Complex::new(ldexp(m.re, -adj), ldexp(m.im, -adj));
            k += adj;
        }
        self.mant = m;
        self.exp += k as i128;
    }

    /// `ln |z|`; `-inf` for zero.
    pub fn ln_abs(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        let (e, l) = self.ln_abs_split();
        T::from_i128(e).expect("exponent to float") * T::LN_2() + l
    }

    /// `(exponent, ln|mantissa|)` so that `ln|z| = exponent * ln 2 + ln|mantissa|`.
    ///
    /// Summing the exponents as integers keeps differences such as
    /// `ln|x_{n+2}| + ln|x_n| - r ln|x_{n+1}|` free of cancellation error.
    pub fn ln_abs_split(&self) -> (i128, T) {
        (self.exp, self.mant.norm().ln())
    }

    /// Closest native complex value (saturates to infinity or zero).
    pub fn to_complex(&self) -> Complex<T> {
        let e = self.exp.clamp(-100_000, 100_000) as i64;
        Complex::new(ldexp(self.mant.re, e), ldexp(self.mant.im, e))
    }

    pub fn conj(&self) -> Self {
        Self { mant: self.mant.conj(), exp: self.exp }
    }

    pub fn recip(&self) -> Self {
        if self.is_zero() {
            return Self::nan();
        }
        Self::from_parts(self.mant.inv(), -self.exp)
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = *self;
        let mut acc = Self::one();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`.
    pub fn rel_diff(&self, other: &Self) -> T {
        let d = (*self - *other).ln_abs();
        let s = self.ln_abs().max(other.ln_abs());
        if d == T::neg_infinity() {
            return T::zero();
        }
        (d - s).exp()
    }
}

impl<T: Real> Default for ExtComplex<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> Mul for ExtComplex<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_parts(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl<T: Real> Div for ExtComplex<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            return Self::nan();
        }
        Self::from_parts(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl<T: Real> Add for ExtComplex<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_nan() || rhs.is_nan() {
            return Self::nan();
        }
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let d = big.exp - small.exp;
        if d > (T::MANTISSA_DIGITS + 2) as i128 {
            return big;
        }
        let d = d as i64;
        let sm = Complex::new(ldexp(small.mant.re, -d), ldexp(small.mant.im, -d));
        Self::from_parts(big.mant + sm, big.exp)
    }
}

impl<T: Real> Neg for ExtComplex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { mant: -self.mant, exp: self.exp }
    }
}

impl<T: Real> Sub for ExtComplex<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> fmt::Debug for ExtComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}+{:?}i)*2^{}", self.mant.re, self.mant.im, self.exp)
    }
}

/// Decimal scientific form `a.bcde±Ni` sharing one power of ten, e.g.
/// `1.5e300+2.25e299i` is printed as `1.500000000000000e300+2.250000000000000e299i`.
impl<T: Real> fmt::Display for ExtComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_nan() {
            return write!(f, "NaN");
        }
        if self.is_zero() {
            return write!(f, "0+0i");
        }
        let re = self.mant.re.to_f64().unwrap_or(f64::NAN);
        let im = self.mant.im.to_f64().unwrap_or(f64::NAN);
        let (k, frac) = decimal_split(self.exp);
        let scale = 10f64.powf(frac);
        let part = |x: f64| -> String {
            let v = x * scale;
            if v == 0.0 {
                return "0".to_string();
            }
            let s = format!("{v:.15e}");
            let (m, e) = s.split_once('e').expect("scientific format");
            let e: i128 = e.parse().expect("exponent");
            format!("{m}e{}", e + k)
        };
        let imag = part(im);
        let sep = if imag.starts_with('-') { "" } else { "+" };
        write!(f, "{}{}{}i", part(re), sep, imag)
    }
}

/// Splits `e log10(2)` into its floor and fractional part.
///
/// `f64` cannot hold the fraction once `e` is large, so the product is formed
/// in fixed point against 40 digits of `log10(2)`.
fn decimal_split(e: i128) -> (i128, f64) {
    use num_integer::Integer;
    const LOG10_2_DIGITS: &str = "3010299956639811952137388947244930267681";
    let one = BigInt::from(10u8).pow(40);
    let l: BigInt = LOG10_2_DIGITS.parse().expect("constant");
    let (q, r) = (BigInt::from(e) * l).div_mod_floor(&one);
    let frac = (r * BigInt::from(1u64 << 53) / one).to_f64().unwrap_or(0.0) / (1u64 << 53) as f64;
    (q.to_i128().expect("exponent range"), frac)
}

/// Construct `Complex<T>` from two `f64` literals.
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}
