//! Parser for scalar literals: integers, `p/q`, decimals, `sqrt(k)`,
//! `root(k,n)` and parenthesized field expressions built from them.

use super::ExactScalar;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub(crate) struct Cursor<'a> {
    pub text: &'a [u8],
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    pub fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
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
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    pub fn err(&self, message: &str) -> Error {
        Error::SyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    /// Unsigned integer literal.
    pub fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    /// Unsigned number literal: integer or decimal like `0.55`.
    pub fn number(&mut self) -> Result<BigRational> {
        let int = self.integer()?;
        if self.pos < self.text.len() && self.text[self.pos] == b'.' {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected digits after decimal point"));
            }
            let digits = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
            let frac: BigInt = digits.parse().unwrap();
            let scale = BigInt::from(10u32).pow(digits.len() as u32);
            return Ok(BigRational::from_integer(int)
                + BigRational::new(frac, scale));
        }
        Ok(BigRational::from_integer(int))
    }
}

pub fn parse_scalar(text: &str) -> Result<ExactScalar> {
    let mut cur = Cursor::new(text);
    let v = expr(&mut cur)?;
    cur.skip_ws();
    if cur.pos != cur.text.len() {
        return Err(cur.err("trailing input"));
    }
    Ok(v)
}

fn expr(cur: &mut Cursor) -> Result<ExactScalar> {
    let mut acc = term(cur)?;
    loop {
        if cur.eat(b'+') {
            acc = acc.add(&term(cur)?);
        } else if cur.eat(b'-') {
            acc = acc.sub(&term(cur)?);
        } else {
            return Ok(acc);
        }
    }
}

fn term(cur: &mut Cursor) -> Result<ExactScalar> {
    let mut acc = factor(cur)?;
    loop {
        if cur.eat(b'*') {
            acc = acc.mul(&factor(cur)?);
        } else if cur.eat(b'/') {
            acc = acc.div(&factor(cur)?)?;
        } else {
            return Ok(acc);
        }
    }
}

fn factor(cur: &mut Cursor) -> Result<ExactScalar> {
    if cur.eat(b'-') {
        return Ok(factor(cur)?.neg());
    }
    let mut base = atom(cur)?;
    while cur.eat(b'^') {
        let neg = cur.eat(b'-');
        let e = cur.integer()?;
        let e: i64 = e
            .try_into()
            .map_err(|_| cur.err("exponent too large"))?;
        base = base.pow_i(if neg { -e } else { e })?;
    }
    Ok(base)
}

fn atom(cur: &mut Cursor) -> Result<ExactScalar> {
    match cur.peek() {
        Some(b'(') => {
            cur.bump();
            let v = expr(cur)?;
            cur.expect(b')')?;
            Ok(v)
        }
        Some(b's') if cur.eat_keyword("sqrt") => {
            cur.expect(b'(')?;
            let v = expr(cur)?;
            cur.expect(b')')?;
            let q = v
                .as_rational()
                .ok_or_else(|| cur.err("sqrt argument must be rational"))?
                .clone();
            ExactScalar::nth_root_of(&q, 2)
        }
        Some(b'r') if cur.eat_keyword("root") => {
            cur.expect(b'(')?;
            let v = expr(cur)?;
            cur.expect(b',')?;
            let n = cur.integer()?;
            cur.expect(b')')?;
            let q = v
                .as_rational()
                .ok_or_else(|| cur.err("root argument must be rational"))?
                .clone();
            let n: u32 = n.try_into().map_err(|_| cur.err("root order too large"))?;
            if n.is_zero() {
                return Err(cur.err("root order must be positive"));
            }
            ExactScalar::nth_root_of(&q, n)
        }
        Some(c) if c.is_ascii_digit() => Ok(ExactScalar::Rational(cur.number()?)),
        _ => Err(cur.err("expected a scalar atom")),
    }
}
