//! Canonical text form: terms in descending lexicographic order,
//! e.g. `3*x1^2*x2^-1 + 1`.

use std::fmt;


use super::{Coeff, Laurent};
use crate::error::{Error, Result};
use crate::expr::{Expr, Parser};

/// Default variable names `x1, ..., xN`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl<C: Coeff> Laurent<C> {
    /// Formats with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.iter().all(|&k| k == 0) {
                factors.push(mag.to_string());
            }
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[j].clone()),
                    _ => factors.push(format!("{}^{}", names[j], k)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses the text form with variables `x1..xN`.
    pub fn parse(src: &str, nvars: usize) -> Result<Self> {
        Self::parse_with_names(src, &default_names(nvars))
    }

    pub fn parse_with_names(src: &str, names: &[String]) -> Result<Self> {
        let mut p = Parser::new(src);
        let e = p.expr()?;
        if !p.at_end() {
            return p.err("trailing input");
        }
        Self::from_expr(&e, names.len(), &mut |name, sub, pos| {
            if sub.is_some() {
                return Err(Error::Parse { pos, msg: format!("unexpected subscript on `{name}`") });
            }
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Parse { pos, msg: format!("unknown variable `{name}`") })
        })
    }

    /// Builds a polynomial from a parsed expression; `resolve` maps variable
    /// atoms to zero-based indices.
    pub fn from_expr(
        e: &Expr,
        nvars: usize,
        resolve: &mut impl FnMut(&str, Option<&str>, usize) -> Result<usize>,
    ) -> Result<Self> {
        Ok(match e {
            Expr::Int(n) => Self::constant(
                nvars,
                C::from_bigint(n).ok_or_else(|| Error::Overflow(format!("coefficient {n}")))?,
            ),
            Expr::Var { name, subscript, pos } => Self::var(nvars, resolve(name, subscript.as_deref(), *pos)?),
            Expr::Sum(ts) => {
                let mut acc = Self::zero(nvars);
                for (neg, t) in ts {
                    let v = Self::from_expr(t, nvars, resolve)?;
                    acc = if *neg { acc.try_sub(&v)? } else { acc.try_add(&v)? };
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = Self::one(nvars);
                for f in fs {
                    acc = acc.try_mul(&Self::from_expr(f, nvars, resolve)?)?;
                }
                acc
            }
            Expr::Pow(b, k) => Self::from_expr(b, nvars, resolve)?.pow(*k)?,
        })
    }
}

impl<C: Coeff> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.nvars())))
    }
}

impl<C: Coeff> fmt::Debug for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent[{}]({})", self.nvars(), self)
    }
}
