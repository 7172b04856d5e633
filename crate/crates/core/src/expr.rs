//! Small expression grammar shared by the polynomial text form and the
//! recurrence parser.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power ('*' power)*
//! power  := atom ('^' ['-'] integer)?
//! atom   := integer | ident ['[' subscript ']'] | '(' expr ')'
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    /// Identifier with optional bracketed subscript, e.g. `x[n+2]`.
    Var { name: String, subscript: Option<String>, pos: usize },
    Sum(Vec<(bool, Expr)>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    /// Visits every variable atom.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a str, Option<&'a str>, usize)) {
        match self {
            Expr::Int(_) => {}
            Expr::Var { name, subscript, pos } => f(name, subscript.as_deref(), *pos),
            Expr::Sum(ts) => ts.iter().for_each(|(_, e)| e.for_each_var(f)),
            Expr::Product(fs) => fs.iter().for_each(|e| e.for_each_var(f)),
            Expr::Pow(b, _) => b.for_each_var(f),
        }
    }
}

pub struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src: src.as_bytes(), pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let t = self.term()?;
            terms.push((negative, t));
            if self.eat(b'+') {
                negative = false;
            } else if self.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            return Ok(terms.pop().expect("one term").1);
        }
        Ok(Expr::Sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.power()?];
        while self.eat(b'*') {
            factors.push(self.power()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().expect("one factor"));
        }
        Ok(Expr::Product(factors))
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            self.skip_ws();
            let start = self.pos;
            let n = self.integer()?;
            let mut k: i64 = n.try_into().map_err(|_| Error::Parse { pos: start, msg: "exponent too large".into() })?;
            if neg {
                k = -k;
            }
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
                let subscript = if self.src.get(self.pos) == Some(&b'[') {
                    self.pos += 1;
                    let s0 = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos] != b']' {
                        self.pos += 1;
                    }
                    if self.pos >= self.src.len() {
                        return self.err("unterminated `[`");
                    }
                    let sub = std::str::from_utf8(&self.src[s0..self.pos]).expect("ascii").to_string();
                    self.pos += 1;
                    Some(sub)
                } else {
                    None
                };
                Ok(Expr::Var { name, subscript, pos: start })
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}
