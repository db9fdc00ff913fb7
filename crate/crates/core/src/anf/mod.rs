//! Multilinear polynomials over GF(2) and over the integers.
//!
//! Variables are 0-based internally and print as `a1`, `a2`, ... (argument
//! space) or `x1`, `x2`, ... (solution space). Both spaces share one index
//! set.

mod int;
mod monomial;
mod poly;

pub use int::{int_lift, IntPoly};
pub use monomial::Monomial;
pub use poly::AnfPoly;

use num_bigint::BigInt;

use crate::error::{Error, Result};

trait Ring: Sized {
    fn int(n: BigInt) -> Self;
    fn var(i: usize) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for AnfPoly {
    fn int(n: BigInt) -> Self {
        AnfPoly::constant(n.bit(0))
    }
    fn var(i: usize) -> Self {
        AnfPoly::var(i)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg(&self) -> Self {
        self.clone()
    }
}

impl Ring for IntPoly {
    fn int(n: BigInt) -> Self {
        IntPoly::constant(n)
    }
    fn var(i: usize) -> Self {
        IntPoly::from_terms([(Monomial::var(i), BigInt::from(1))])
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg(&self) -> Self {
        self.mul(&IntPoly::constant(BigInt::from(-1)))
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::PolyText(format!("{msg} at offset {}", self.pos)))
    }

    fn expr<R: Ring>(&mut self) -> Result<R> {
        let mut acc = self.signed_term::<R>()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t: R = self.term()?;
            acc = acc.plus(&if op == b'-' { t.neg() } else { t });
        }
        Ok(acc)
    }

    fn signed_term<R: Ring>(&mut self) -> Result<R> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.term::<R>()?.neg());
        }
        self.term()
    }

    fn term<R: Ring>(&mut self) -> Result<R> {
        let mut acc = self.factor::<R>()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.times(&self.factor()?);
                }
                Some(c) if c == b'(' || c == b'a' || c == b'x' || c.is_ascii_digit() => {
                    acc = acc.times(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn number(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .expect("digits parse")
    }

    fn factor<R: Ring>(&mut self) -> Result<R> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(R::int(self.number())),
            Some(b'a') | Some(b'x') => {
                self.pos += 1;
                if !self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return self.err("expected variable index");
                }
                let i = self.number();
                let i: usize = match i.try_into() {
                    Ok(i) if i >= 1 => i,
                    _ => return self.err("variable index must be >= 1"),
                };
                Ok(R::var(i - 1))
            }
            _ => self.err("expected term"),
        }
    }
}

fn parse<R: Ring>(text: &str) -> Result<R> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let r = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(r)
}

impl std::str::FromStr for AnfPoly {
    type Err = Error;

    /// Parses sums of products with parentheses; `*` may be omitted.
    /// Integer constants are taken mod 2 and `-` acts as `+`.
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl std::str::FromStr for IntPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> AnfPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(p("1 + a1 + a1*a2*a3").to_text('a'), "1 + a1 + a1*a2*a3");
        assert_eq!(p("a3 + a1 a2 a3").to_text('x'), "x3 + x1*x2*x3");
        assert_eq!(p("(a1+1)(a1+1)"), p("1 + a1"));
        assert_eq!(p("0"), AnfPoly::zero());
        assert_eq!(p("x2 + a2"), AnfPoly::zero());
        assert!("a0".parse::<AnfPoly>().is_err());
        assert!("a1 +".parse::<AnfPoly>().is_err());
        assert!("(a1".parse::<AnfPoly>().is_err());
    }

    #[test]
    fn int_parse() {
        let q: IntPoly = "2 x1 + 16*x1*x2 + 3".parse().unwrap();
        assert_eq!(
            q.coefficient(&Monomial::from_vars([0, 1])),
            BigInt::from(16)
        );
        assert_eq!(q.to_text('x'), "3 + 2*x1 + 16*x1*x2");
        assert_eq!(q.reduce_mod2(), p("1"));
        let r: IntPoly = "-3*x1 - x2 + 1".parse().unwrap();
        assert_eq!(r.coefficient(&Monomial::var(0)), BigInt::from(-3));
        assert_eq!(r.to_text('x').parse::<IntPoly>().unwrap(), r);
        assert_eq!(p("-x1 - x1"), AnfPoly::zero());
    }

    #[test]
    fn expansion_example() {
        assert_eq!(p("(a1+1)(a2+1)a3 + a3"), p("a1*a2*a3 + a1*a3 + a2*a3"));
    }
}
