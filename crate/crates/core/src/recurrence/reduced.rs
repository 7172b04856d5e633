//! Two-dimensional reduced maps and conserved quantities.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::laurent::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedKind {
    /// `y_{n+2} = y_n (y_{n+1} + 1/y_{n+1})` with `y_n = x_{n+1}/x_n`.
    MarkoffY,
    /// `y_{n+2} = (y_{n+1} + 1) / (y_n y_{n+1}^2)` with
    /// `y_n = x_{n+2} x_n / x_{n+1}^2`.
    Somos4Y,
}

impl FromStr for ReducedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markoff_y" => Ok(Self::MarkoffY),
            "somos4_y" => Ok(Self::Somos4Y),
            _ => Err(Error::UnknownSystem(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMap<R> {
    pub kind: ReducedKind,
    /// `(y_n, y_{n+1})`.
    pub window: [R; 2],
}

impl<R: Ring> ReducedMap<R> {
    pub fn new(kind: ReducedKind, y1: R, y2: R) -> Self {
        Self { kind, window: [y1, y2] }
    }

    fn next_value(&self) -> Result<R> {
        let [a, b] = &self.window;
        let one = a.lift(&BigInt::one());
        match self.kind {
            ReducedKind::MarkoffY => a.mul(&b.add(&one.div(b)?)?),
            ReducedKind::Somos4Y => b.add(&one)?.div(&a.mul(&b.mul(b)?)?),
        }
    }

    /// Advances one step.
    pub fn step(&self) -> Result<Self> {
        let next = self.next_value()?;
        Ok(Self { kind: self.kind, window: [self.window[1].clone(), next] })
    }

    /// `y_1..y_count` starting from the current window.
    pub fn orbit(&self, count: usize) -> Result<Vec<R>> {
        let mut out: Vec<R> = self.window.iter().take(count).cloned().collect();
        let mut m = self.clone();
        while out.len() < count {
            m = m.step().map_err(|e| match e {
                Error::ZeroDivision { .. } => Error::ZeroDivision { step: out.len() as i64 + 1 },
                e => e,
            })?;
            out.push(m.window[1].clone());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservedQuantity {
    /// `x1/x2 + x2/x1 + 1/(x1 x2)` for `x_{n+2} x_n = x_{n+1}^2 + 1`.
    Rank2K,
    /// `(x1^2 + x2^2 + x3^2) / (x1 x2 x3)` for the Markoff recurrence.
    MarkoffK,
}

impl FromStr for ConservedQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank2_K" | "rank2_k" => Ok(Self::Rank2K),
            "markoff_K" | "markoff_k" => Ok(Self::MarkoffK),
            _ => Err(Error::UnknownSystem(s.to_string())),
        }
    }
}

pub fn conserved_quantity<R: Ring>(which: ConservedQuantity, point: &[R]) -> Result<R> {
    let need = match which {
        ConservedQuantity::Rank2K => 2,
        ConservedQuantity::MarkoffK => 3,
    };
    if point.len() != need {
        return Err(Error::DimensionMismatch { left: need, right: point.len() });
    }
    if let Some(i) = point.iter().position(Ring::is_zero) {
        return Err(Error::ZeroCoordinate(i));
    }
    let one = point[0].lift(&BigInt::one());
    match which {
        ConservedQuantity::Rank2K => {
            let (a, b) = (&point[0], &point[1]);
            let num = a.mul(a)?.add(&b.mul(b)?)?.add(&one)?;
            num.div(&a.mul(b)?)
        }
        ConservedQuantity::MarkoffK => {
            let mut num = point[0].lift(&BigInt::from(0));
            let mut den = one;
            for x in point {
                num = num.add(&x.mul(x)?)?;
                den = den.mul(x)?;
            }
            num.div(&den)
        }
    }
}
