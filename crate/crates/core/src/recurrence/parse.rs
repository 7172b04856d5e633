//! Text form `x[n+N]*<monomial> = <polynomial>`.
//!
//! Lagged terms are written `x[n]`, `x[n+1]`, ...; any other bare identifier
//! on the right is a frozen parameter; parameters are numbered alphabetically.

use num_traits::One;

use super::RecurrenceDef;
use crate::error::{Error, Result};
use crate::expr::Parser;
use crate::LaurentPoly;

fn lag(name: &str, subscript: Option<&str>, pos: usize) -> Result<i64> {
    let err = |msg: String| Err(Error::Parse { pos, msg });
    if name != "x" {
        return err(format!("expected a lagged term x[n+k], found `{name}`"));
    }
    let Some(sub) = subscript else {
        return err("`x` needs a subscript such as x[n+1]".into());
    };
    let compact: String = sub.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(rest) = compact.strip_prefix('n') else {
        return err(format!("subscript `{sub}` must start with n"));
    };
    if rest.is_empty() {
        return Ok(0);
    }
    let (neg, digits) = match rest.as_bytes()[0] {
        b'+' => (false, &rest[1..]),
        b'-' => (true, &rest[1..]),
        _ => return err(format!("malformed subscript `{sub}`")),
    };
    match digits.parse::<i64>() {
        Ok(k) if neg => Ok(-k),
        Ok(k) => Ok(k),
        Err(_) => err(format!("malformed subscript `{sub}`")),
    }
}

impl RecurrenceDef {
    /// Parses e.g. `x[n+4]*x[n] = x[n+3]*x[n+1] + x[n+2]^2`.
    ///
    /// The largest lag on the left fixes the order `N`; every lag on the
    /// right must lie in `0..N`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src);
        let lhs = p.expr()?;
        p.expect(b'=')?;
        let rhs = p.expr()?;
        if !p.at_end() {
            return p.err("trailing input");
        }

        let mut lags = Vec::new();
        let mut first_err = None;
        lhs.for_each_var(&mut |name, sub, pos| match lag(name, sub, pos) {
            Ok(k) => lags.push((k, pos)),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        });
        if let Some(e) = first_err {
            return Err(e);
        }
        let order = match lags.iter().map(|&(k, _)| k).max() {
            Some(k) if k >= 1 => k as usize,
            _ => return Err(Error::Parse { pos: 0, msg: "left-hand side must contain x[n+N] with N >= 1".into() }),
        };
        if let Some(&(k, pos)) = lags.iter().find(|&&(k, _)| k < 0) {
            return Err(Error::Parse { pos, msg: format!("lag {k} is below the window") });
        }

        let mut params: Vec<String> = Vec::new();
        let mut first_err = None;
        rhs.for_each_var(&mut |name, sub, pos| {
            if name == "x" {
                match lag(name, sub, pos) {
                    Ok(k) if k < 0 || k >= order as i64 => {
                        first_err.get_or_insert(Error::Parse {
                            pos,
                            msg: format!("lag {k} is outside the window n..n+{}", order - 1),
                        });
                    }
                    Ok(_) => {}
                    Err(e) => {
                        first_err.get_or_insert(e);
                    }
                }
            } else if sub.is_some() || name == "n" {
                first_err.get_or_insert(Error::Parse { pos, msg: format!("`{name}` cannot be a parameter") });
            } else if !params.iter().any(|q| q == name) {
                params.push(name.to_string());
            }
        });
        if let Some(e) = first_err {
            return Err(e);
        }
        params.sort();

        let left = LaurentPoly::from_expr(&lhs, order + 1, &mut |name, sub, pos| Ok(lag(name, sub, pos)? as usize))?;
        let Some((exps, c)) = left.terms().next().filter(|_| left.is_monomial()) else {
            return Err(Error::Parse { pos: 0, msg: "left-hand side must be a single monomial".into() });
        };
        if !c.is_one() || exps[order] != 1 || exps.iter().any(|&e| e < 0) {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("left-hand side must be x[n+{order}] times a monomial in earlier terms"),
            });
        }
        let divisor = exps[..order].to_vec();

        let total = order + params.len();
        let right = LaurentPoly::from_expr(&rhs, total, &mut |name, sub, pos| {
            if name == "x" {
                Ok(lag(name, sub, pos)? as usize)
            } else {
                Ok(order + params.iter().position(|q| q == name).expect("collected above"))
            }
        })?;
        Self::new(order, right, divisor, params)
    }
}
