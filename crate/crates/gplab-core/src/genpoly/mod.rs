//! Generalised polynomials: expression trees over variables and exact
//! constants, closed under addition, multiplication, integer powers, floor
//! and fractional part.
//!
//! `Frac(g)` evaluates as `g - Floor(g)`; the two forms are interchangeable
//! under evaluation. No normal form is computed beyond flattening `Add`/`Mul`
//! and folding constant subtrees.

mod expand;
mod indicator;
mod parse;

pub use expand::{expand_in_var, PolyInNExpansion};
pub use indicator::{indicator_ge0, indicator_interval, indicator_zero};
pub use parse::parse;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use num_traits::Signed;

#[derive(Debug, Clone, PartialEq)]
pub enum GenPoly {
    /// Coordinate of the ambient domain; index 0 prints as `n`.
    Var(usize),
    Const(ExactScalar),
    Add(Vec<GenPoly>),
    Mul(Vec<GenPoly>),
    Floor(Box<GenPoly>),
    Frac(Box<GenPoly>),
    IntPow(Box<GenPoly>, u32),
}

impl GenPoly {
    pub fn var(i: usize) -> Self {
        GenPoly::Var(i)
    }

    pub fn n() -> Self {
        GenPoly::Var(0)
    }

    pub fn int(v: i64) -> Self {
        GenPoly::Const(ExactScalar::from_int(v))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        GenPoly::Const(ExactScalar::ratio(p, q))
    }

    pub fn constant(s: ExactScalar) -> Self {
        GenPoly::Const(s)
    }

    pub fn is_const_zero(&self) -> bool {
        matches!(self, GenPoly::Const(c) if c.is_zero())
    }

    pub fn floor_of(g: GenPoly) -> Self {
        GenPoly::Floor(Box::new(g))
    }

    pub fn frac_of(g: GenPoly) -> Self {
        GenPoly::Frac(Box::new(g))
    }

    pub fn pow_of(g: GenPoly, e: u32) -> Self {
        if e == 1 {
            g
        } else {
            GenPoly::IntPow(Box::new(g), e)
        }
    }

    /// Flattening sum; folds constants together and drops zeros.
    pub fn sum(children: Vec<GenPoly>) -> Self {
        let mut flat = Vec::new();
        let mut konst = ExactScalar::zero();
        let mut saw_const = false;
        for c in children {
            match c {
                GenPoly::Add(inner) => {
                    for g in inner {
                        match g {
                            GenPoly::Const(s) => {
                                konst = konst.add(&s);
                                saw_const = true;
                            }
                            other => flat.push(other),
                        }
                    }
                }
                GenPoly::Const(s) => {
                    konst = konst.add(&s);
                    saw_const = true;
                }
                other => flat.push(other),
            }
        }
        if saw_const && !konst.is_zero() {
            flat.push(GenPoly::Const(konst));
        }
        match flat.len() {
            0 => GenPoly::int(0),
            1 => flat.into_iter().next().unwrap(),
            _ => GenPoly::Add(flat),
        }
    }

    /// Flattening product; folds constants and short-circuits on zero.
    pub fn product(children: Vec<GenPoly>) -> Self {
        let mut flat = Vec::new();
        let mut konst = ExactScalar::one();
        for c in children {
            match c {
                GenPoly::Mul(inner) => {
                    for g in inner {
                        match g {
                            GenPoly::Const(s) => konst = konst.mul(&s),
                            other => flat.push(other),
                        }
                    }
                }
                GenPoly::Const(s) => konst = konst.mul(&s),
                other => flat.push(other),
            }
        }
        if konst.is_zero() {
            return GenPoly::int(0);
        }
        if !konst.is_one() {
            flat.insert(0, GenPoly::Const(konst));
        }
        match flat.len() {
            0 => GenPoly::int(1),
            1 => flat.into_iter().next().unwrap(),
            _ => GenPoly::Mul(flat),
        }
    }

    pub fn add2(self, other: GenPoly) -> Self {
        GenPoly::sum(vec![self, other])
    }

    pub fn mul2(self, other: GenPoly) -> Self {
        GenPoly::product(vec![self, other])
    }

    pub fn negate(self) -> Self {
        GenPoly::product(vec![GenPoly::int(-1), self])
    }

    pub fn sub2(self, other: GenPoly) -> Self {
        let neg = other.negate();
        GenPoly::sum(vec![self, neg])
    }

    /// Number of variables: one past the largest index that occurs.
    pub fn arity(&self) -> usize {
        match self {
            GenPoly::Var(i) => i + 1,
            GenPoly::Const(_) => 0,
            GenPoly::Add(ch) | GenPoly::Mul(ch) => {
                ch.iter().map(|g| g.arity()).max().unwrap_or(0)
            }
            GenPoly::Floor(g) | GenPoly::Frac(g) => g.arity(),
            GenPoly::IntPow(g, _) => g.arity(),
        }
    }

    /// Exact evaluation. Floor failures carry the path of child indices to
    /// the offending subexpression.
    pub fn eval(&self, point: &[ExactScalar], max_bits: u32) -> Result<ExactScalar> {
        if point.len() < self.arity() {
            return Err(Error::InvalidInput(format!(
                "point arity {} below expression arity {}",
                point.len(),
                self.arity()
            )));
        }
        self.eval_inner(point, max_bits)
            .map_err(|(e, mut path)| {
                path.reverse();
                let rendered = path
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(".");
                e.with_path(rendered)
            })
    }

    fn eval_inner(
        &self,
        point: &[ExactScalar],
        max_bits: u32,
    ) -> std::result::Result<ExactScalar, (Error, Vec<usize>)> {
        match self {
            GenPoly::Var(i) => Ok(point[*i].clone()),
            GenPoly::Const(c) => Ok(c.clone()),
            GenPoly::Add(ch) => {
                let mut acc = ExactScalar::zero();
                for (i, g) in ch.iter().enumerate() {
                    let v = g.eval_inner(point, max_bits).map_err(push_path(i))?;
                    acc = acc.add(&v);
                }
                Ok(acc)
            }
            GenPoly::Mul(ch) => {
                let mut acc = ExactScalar::one();
                for (i, g) in ch.iter().enumerate() {
                    let v = g.eval_inner(point, max_bits).map_err(push_path(i))?;
                    acc = acc.mul(&v);
                }
                Ok(acc)
            }
            GenPoly::Floor(g) => {
                let v = g.eval_inner(point, max_bits).map_err(push_path(0))?;
                let f = v.floor(max_bits).map_err(|e| (e, vec![0]))?;
                Ok(ExactScalar::from_bigint(f))
            }
            GenPoly::Frac(g) => {
                let v = g.eval_inner(point, max_bits).map_err(push_path(0))?;
                let f = v.frac(max_bits).map_err(|e| (e, vec![0]))?;
                Ok(f)
            }
            GenPoly::IntPow(g, e) => {
                let v = g.eval_inner(point, max_bits).map_err(push_path(0))?;
                v.pow_i(*e as i64).map_err(|e| (e, vec![0]))
            }
        }
    }

    /// Evaluate a univariate expression at an integer argument.
    pub fn eval_at_int(&self, n: i64, max_bits: u32) -> Result<ExactScalar> {
        self.eval(&[ExactScalar::from_int(n)], max_bits)
    }

    /// DSL text whose reparse is structurally equal for parser-produced and
    /// combinator-produced trees.
    pub fn unparse(&self) -> String {
        self.unparse_prec(0)
    }

    // prec: 0 sum position, 1 product position, 2 power/atom position
    fn unparse_prec(&self, prec: u8) -> String {
        match self {
            GenPoly::Var(0) => "n".to_string(),
            GenPoly::Var(i) => format!("x_{}", i + 1),
            GenPoly::Const(c) => {
                let s = c.to_string();
                let atomic = !(s.contains('+')
                    || s.contains('*')
                    || s.contains('/')
                    || s[1..].contains('-'));
                if atomic || s.starts_with('(') {
                    // negative atoms still need guarding inside products
                    if prec >= 1 && s.starts_with('-') {
                        format!("({s})")
                    } else {
                        s
                    }
                } else if prec >= 1 {
                    format!("({s})")
                } else {
                    s
                }
            }
            GenPoly::Add(ch) => {
                let body = ch
                    .iter()
                    .map(|g| g.unparse_prec(1))
                    .collect::<Vec<_>>()
                    .join(" + ");
                if prec >= 1 {
                    format!("({body})")
                } else {
                    body
                }
            }
            GenPoly::Mul(ch) => {
                let body = ch
                    .iter()
                    .map(|g| g.unparse_prec(2))
                    .collect::<Vec<_>>()
                    .join("*");
                if prec >= 2 {
                    format!("({body})")
                } else {
                    body
                }
            }
            GenPoly::Floor(g) => format!("floor({})", g.unparse_prec(0)),
            GenPoly::Frac(g) => format!("frac({})", g.unparse_prec(0)),
            GenPoly::IntPow(g, e) => format!("{}^{}", g.unparse_prec(2), e),
        }
    }
}

fn push_path(i: usize) -> impl Fn((Error, Vec<usize>)) -> (Error, Vec<usize>) {
    move |(e, mut path)| {
        path.push(i);
        (e, path)
    }
}

/// Rational upper bound for |g| over the whole domain, by interval rules with
/// every fractional part bounded by [0,1). Fails on bare variables.
pub fn sup_bound(g: &GenPoly) -> Result<num_rational::BigRational> {
    use num_rational::BigRational;
    use num_traits::One;
    match g {
        GenPoly::Var(_) => Err(Error::UnboundedCoefficient),
        GenPoly::Const(c) => Ok(c.abs_upper_bound().abs()),
        GenPoly::Add(ch) => {
            let mut acc = BigRational::from_integer(0.into());
            for c in ch {
                acc += sup_bound(c)?;
            }
            Ok(acc)
        }
        GenPoly::Mul(ch) => {
            let mut acc = BigRational::one();
            for c in ch {
                acc *= sup_bound(c)?;
            }
            Ok(acc)
        }
        GenPoly::Floor(inner) => Ok(sup_bound(inner)? + BigRational::one()),
        GenPoly::Frac(_) => Ok(BigRational::one()),
        GenPoly::IntPow(inner, e) => {
            let b = sup_bound(inner)?;
            let mut acc = BigRational::one();
            for _ in 0..*e {
                acc *= &b;
            }
            Ok(acc)
        }
    }
}
