//! Recurrences `x_{n+N} * M(x_n, ..., x_{n+N-1}) = F(x_n, ..., x_{n+N-1}; params)`
//! where `M` is a monomial, iterated symbolically, exactly, or numerically.
//!
//! Slot `j` of the window is `x_{n+j}`; frozen parameters occupy the slots
//! after the window in the right-hand side polynomial.

mod orbit;
mod parse;
mod reduced;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::LaurentPoly;

pub use orbit::{iterate, iterate_backward, iterate_numeric, iterate_rational, iterate_symbolic, Orbit, SymbolicBudget, SymbolicOrbit};
pub use reduced::{conserved_quantity, ConservedQuantity, ReducedKind, ReducedMap};

/// Built-in systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    /// `x_{n+2} x_n = x_{n+1} + 1`, period 5.
    Lyness,
    /// `x_{n+2} x_n = x_{n+1}^r + 1`.
    Rank2(u32),
    Markoff,
    Somos4,
    /// Laurentified Hietarinta-Viallet map with frozen parameter `a`.
    Hv,
}

impl FromStr for System {
    type Err = Error;

    /// Accepts `lyness`, `rank2:R` (or `rank2(R)`), `markoff`, `somos4`, `hv`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let rank2_arg = s
            .strip_prefix("rank2:")
            .or_else(|| s.strip_prefix("rank2(").and_then(|t| t.strip_suffix(')')));
        if let Some(arg) = rank2_arg {
            let r: u32 = arg
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("rank2 exponent `{arg}` is not a positive integer")))?;
            if r == 0 {
                return Err(Error::InvalidParameter("rank2 requires r >= 1".into()));
            }
            return Ok(System::Rank2(r));
        }
        match s.as_str() {
            "lyness" => Ok(System::Lyness),
            "markoff" => Ok(System::Markoff),
            "somos4" | "somos-4" => Ok(System::Somos4),
            "hv" => Ok(System::Hv),
            "rank2" => Err(Error::InvalidParameter("rank2 needs an exponent, e.g. rank2:3".into())),
            _ => Err(Error::UnknownSystem(s)),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Lyness => f.write_str("lyness"),
            System::Rank2(r) => write!(f, "rank2:{r}"),
            System::Markoff => f.write_str("markoff"),
            System::Somos4 => f.write_str("somos4"),
            System::Hv => f.write_str("hv"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RecurrenceDef {
    order: usize,
    rhs: LaurentPoly,
    divisor: Vec<i32>,
    params: Vec<String>,
}

impl RecurrenceDef {
    /// `rhs` lives in `order + params.len()` variables; `divisor` holds the
    /// exponents of the lagged monomial multiplying `x_{n+N}`.
    pub fn new(order: usize, rhs: LaurentPoly, divisor: Vec<i32>, params: Vec<String>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("order must be positive".into()));
        }
        if divisor.len() != order {
            return Err(Error::DimensionMismatch { left: order, right: divisor.len() });
        }
        if rhs.nvars() != order + params.len() {
            return Err(Error::DimensionMismatch { left: order + params.len(), right: rhs.nvars() });
        }
        if divisor.iter().any(|&e| e < 0) {
            return Err(Error::InvalidParameter("divisor exponents must be nonnegative".into()));
        }
        if rhs.is_zero() {
            return Err(Error::ZeroPolynomial("recurrence right-hand side"));
        }
        if let Some(lo) = rhs.min_exponents() {
            if lo[..order].iter().any(|&e| e < 0) {
                return Err(Error::InvalidParameter("right-hand side must be polynomial in the lagged terms".into()));
            }
        }
        Ok(Self { order, rhs, divisor, params })
    }

    pub fn builtin(system: System) -> Self {
        let src = match system {
            System::Lyness => "x[n+2]*x[n] = x[n+1] + 1".to_string(),
            System::Rank2(r) => format!("x[n+2]*x[n] = x[n+1]^{r} + 1"),
            System::Markoff => "x[n+3]*x[n] = x[n+2]^2 + x[n+1]^2".to_string(),
            System::Somos4 => "x[n+4]*x[n] = x[n+3]*x[n+1] + x[n+2]^2".to_string(),
            System::Hv => "x[n+5]*x[n+2]^3*x[n+1]^2 = x[n+4]^3*x[n+1]^3 - x[n+4]^2*x[n+3]^3*x[n] + a*x[n+3]^6*x[n+2]^6"
                .to_string(),
        };
        Self::parse(&src).expect("built-in recurrences parse")
    }

    /// Looks up a built-in by name (see [`System`]).
    pub fn named(name: &str) -> Result<Self> {
        Ok(Self::builtin(name.parse()?))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rhs(&self) -> &LaurentPoly {
        &self.rhs
    }

    pub fn divisor(&self) -> &[i32] {
        &self.divisor
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Slot names used by the printer: `x[n]`, `x[n+1]`, ..., then parameters.
    pub fn slot_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            (0..self.order).map(|j| if j == 0 { "x[n]".into() } else { format!("x[n+{j}]") }).collect();
        names.extend(self.params.iter().cloned());
        names
    }

    /// The same relation solved for the lowest-index term, relabeled so that
    /// iterating it runs the original sequence backwards.
    ///
    /// Supported when `x_n` enters either only through the divisor (to the
    /// first power) or affinely in the right-hand side with a `+-` monomial
    /// coefficient and not at all in the divisor.
    pub fn reversed(&self) -> Result<Self> {
        let n = self.order;
        let total = n + self.params.len();
        // slot j <-> slot N - j, with slot N being the new term
        let mirror = |exps: &[i32], top: i32| -> Vec<i32> {
            let mut out = vec![0; total];
            out[0] = top;
            for j in 1..n {
                out[n - j] = exps[j];
            }
            out[n..total].copy_from_slice(&exps[n..total]);
            out
        };
        let in_rhs = self.rhs.terms().any(|(e, _)| e[0] != 0);
        if self.divisor[0] == 1 && !in_rhs {
            // x_n * (x_{n+N} M') = F
            let mut div = vec![0; total];
            div[..n].copy_from_slice(&self.divisor);
            let new_div = mirror(&div, 1);
            let rhs = LaurentPoly::from_terms(total, self.rhs.terms().map(|(e, c)| (mirror(e, 0), c.clone())));
            return Self::new(n, rhs, new_div[..n].to_vec(), self.params.clone());
        }
        if self.divisor[0] == 0 && in_rhs {
            // F = A + c M x_n  =>  x_n M = c (x_{n+N} D - A)
            let mut linear = Vec::new();
            let mut rest = Vec::new();
            for (e, c) in self.rhs.terms() {
                match e[0] {
                    0 => rest.push((e.clone(), c.clone())),
                    1 => linear.push((e.clone(), c.clone())),
                    _ => return Err(Error::InvalidParameter("lowest term enters nonlinearly; not reversible".into())),
                }
            }
            let [(mono, c)] = linear.as_slice() else {
                return Err(Error::InvalidParameter("lowest term has a non-monomial coefficient; not reversible".into()));
            };
            if !c.abs().is_one() || mono[n..].iter().any(|&e| e != 0) {
                return Err(Error::InvalidParameter("lowest term coefficient must be a unit monomial".into()));
            }
            let sign = c.clone();
            let mut m = mono.clone();
            m[0] = 0;
            let mut rhs_terms: Vec<(Vec<i32>, BigInt)> =
                rest.into_iter().map(|(e, k)| (mirror(&e, 0), -(&sign * k))).collect();
            let mut d = vec![0; total];
            d[..n].copy_from_slice(&self.divisor);
            rhs_terms.push((mirror(&d, 1), sign));
            let rhs = LaurentPoly::from_terms(total, rhs_terms);
            let new_div = mirror(&m, 0);
            return Self::new(n, rhs, new_div[..n].to_vec(), self.params.clone());
        }
        Err(Error::InvalidParameter("no reversal for this recurrence".into()))
    }
}

impl fmt::Display for RecurrenceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.slot_names();
        let mut lhs = vec![format!("x[n+{}]", self.order)];
        for j in (0..self.order).rev() {
            match self.divisor[j] {
                0 => {}
                1 => lhs.push(names[j].clone()),
                k => lhs.push(format!("{}^{k}", names[j])),
            }
        }
        write!(f, "{} = {}", lhs.join("*"), self.rhs.display_with(&names))
    }
}

impl fmt::Debug for RecurrenceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RecurrenceDef({self})")
    }
}
