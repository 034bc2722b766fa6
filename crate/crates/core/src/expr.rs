//! Tiny expression language for polynomial input.
//!
//! Grammar: sums and differences of products; factors are rationals (`3`, `1/2`,
//! `0.25`), the imaginary unit `i`, the formal parameter `hbar`, named symbols,
//! parenthesised expressions, and integer powers `x^3`, `x^-1`, `(q*p)^2`.
//! Products are kept in the written order so noncommutative targets see the word.

use thiserror::Error;

use crate::exact::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    ImagUnit,
    Hbar,
    Sym(String),
    Sum(Vec<Expr>),
    Neg(Box<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
}

/// Target algebra an [`Expr`] can be evaluated into.
pub trait ExprAlgebra: Sized {
    type Error: From<ParseError>;
    fn number(&self, r: &Rational) -> Result<Self, Self::Error>;
    fn imaginary_unit(&self) -> Result<Self, Self::Error>;
    fn hbar(&self) -> Result<Self, Self::Error>;
    fn symbol(&self, name: &str) -> Result<Self, Self::Error>;
    fn add(self, rhs: Self) -> Result<Self, Self::Error>;
    fn mul(self, rhs: Self) -> Result<Self, Self::Error>;
    fn neg(self) -> Result<Self, Self::Error>;
    fn powi(self, k: i32) -> Result<Self, Self::Error>;
}

impl Expr {
    /// Evaluates into an algebra; `ctx` is a prototype element carrying the algebra's context.
    pub fn eval<A: ExprAlgebra>(&self, ctx: &A) -> Result<A, A::Error> {
        match self {
            Expr::Num(r) => ctx.number(r),
            Expr::ImagUnit => ctx.imaginary_unit(),
            Expr::Hbar => ctx.hbar(),
            Expr::Sym(s) => ctx.symbol(s),
            Expr::Neg(e) => e.eval(ctx)?.neg(),
            Expr::Sum(items) => {
                let mut it = items.iter();
                let mut acc = it.next().expect("nonempty sum").eval(ctx)?;
                for e in it {
                    acc = acc.add(e.eval(ctx)?)?;
                }
                Ok(acc)
            }
            Expr::Product(items) => {
                let mut it = items.iter();
                let mut acc = it.next().expect("nonempty product").eval(ctx)?;
                for e in it {
                    acc = acc.mul(e.eval(ctx)?)?;
                }
                Ok(acc)
            }
            Expr::Pow(e, k) => e.eval(ctx)?.powi(*k),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut items = Vec::new();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let t = self.product()?;
            items.push(if neg { Expr::Neg(Box::new(t)) } else { t });
        }
        if items.is_empty() {
            return Err(self.err("empty expression"));
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Sum(items) })
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.power()?];
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    items.push(self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let start = self.pos;
                    let d = self.number_literal()?;
                    if d == Rational::from_integer(0.into()) {
                        self.pos = start;
                        return Err(self.err("division by zero"));
                    }
                    items.push(Expr::Num(Rational::from_integer(1.into()) / d));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Product(items) })
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let mut neg = false;
            if self.s.get(self.pos) == Some(&b'-') {
                neg = true;
                self.pos += 1;
            }
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: i32 = std::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| self.err("expected integer exponent"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn number_literal(&mut self) -> Result<Rational, ParseError> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
            self.pos += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        parse_rational(t).ok_or_else(|| ParseError { pos: start, msg: "bad number".into() })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Num(self.number_literal()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                Ok(match name {
                    "i" => Expr::ImagUnit,
                    "hbar" => Expr::Hbar,
                    _ => Expr::Sym(name.to_string()),
                })
            }
            _ => Err(self.err("expected a number, symbol or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn parses_products_and_powers() {
        let e = parse("-i/2*hbar*q^3 + (q*p)^2").unwrap();
        match e {
            Expr::Sum(items) => {
                assert_eq!(items.len(), 2);
                assert_eq!(
                    items[0],
                    Expr::Neg(Box::new(Expr::Product(vec![
                        Expr::ImagUnit,
                        Expr::Num(rat(1, 2)),
                        Expr::Hbar,
                        Expr::Pow(Box::new(Expr::Sym("q".into())), 3)
                    ])))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("x^-1").unwrap(), Expr::Pow(_, -1)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("").is_err());
        assert!(parse("q*").is_err());
        assert!(parse("(q").is_err());
        assert!(parse("q/0").is_err());
        assert!(parse("q ) ").is_err());
    }
}
