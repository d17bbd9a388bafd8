//! Exact scalar tower: rationals plus constructed reals.
//!
//! A constructed real is a quotient of radical sums (rationals closed under
//! field operations and integer roots). Values are immutable; refinement
//! returns a new value. Floor and comparison are decided rigorously:
//! enclosures only ever shrink, and exact zero-testing on the radical normal
//! form resolves boundary cases, so `IndeterminateFloor` can only signal an
//! exhausted bit budget, never a wrong answer.

mod dyadic;
pub(crate) mod parse;
mod radical;

pub use dyadic::{Dyadic, Interval};
pub use parse::parse_scalar;
pub use radical::{nth_root_rational, RadicalMonomial, RadicalSum};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Default per-call precision cap, in bits.
pub const DEFAULT_MAX_BITS: u32 = 4096;

const BASE_BITS: u32 = 64;

/// A constructed (irrational) value: num/den with a cached enclosure.
#[derive(Debug, Clone)]
pub struct Constructed {
    num: RadicalSum,
    /// Canonically 1 whenever the denominator can be cleared; never zero.
    den: RadicalSum,
    enclosure: Interval,
    enclosure_bits: u32,
}

/// Rational or constructed real number.
#[derive(Debug, Clone)]
pub enum ExactScalar {
    Rational(BigRational),
    Constructed(Box<Constructed>),
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        ExactScalar::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        ExactScalar::Rational(BigRational::from_integer(v))
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactScalar::Rational(q)
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        ExactScalar::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Real n-th root of a rational, e.g. `sqrt_rational(2, 2)` for sqrt(2).
    pub fn nth_root_of(q: &BigRational, n: u32) -> Result<Self> {
        let (carry, mono) = nth_root_rational(q, n)?;
        if mono.is_one() {
            return Ok(ExactScalar::Rational(carry));
        }
        Self::make(RadicalSum::from_term(carry, mono), RadicalSum::one())
    }

    pub fn sqrt_int(k: i64) -> Result<Self> {
        Self::nth_root_of(&BigRational::from_integer(BigInt::from(k)), 2)
    }

    /// Canonicalizing constructor for num/den.
    fn make(num: RadicalSum, den: RadicalSum) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = num;
        let mut den = den;
        // Clear square roots from the denominator by conjugation. Each pass
        // removes one sqrt base for good: (A + B)(A - B) = A^2 - B^2 and the
        // B^2 terms carry sqrt(p)*sqrt(p) = p.
        loop {
            if den.terms.len() <= 1 {
                break;
            }
            let bases = den.sqrt_bases();
            let Some(base) = bases.first() else { break };
            let (with, without) = den.split_sqrt(base);
            if with.is_zero() {
                break;
            }
            let conj = without.sub(&with);
            if conj.is_zero() {
                // den = 2*with; a single-term-per-base split cannot give
                // conj = 0 with nonzero den because supports are disjoint.
                break;
            }
            num = num.mul(&conj);
            den = den.mul(&conj);
        }
        // Single-term denominator folds into the numerator exactly.
        if den.terms.len() == 1 {
            let (c, m) = den.terms[0].clone();
            let (carry, minv) = m.inverse();
            let factor = RadicalSum::from_term(carry / c, minv);
            num = num.mul(&factor);
            den = RadicalSum::one();
        }
        if num.is_zero() {
            return Ok(ExactScalar::Rational(BigRational::zero()));
        }
        if den.as_rational() == Some(BigRational::one()) {
            if let Some(q) = num.as_rational() {
                return Ok(ExactScalar::Rational(q));
            }
        }
        let enclosure = Self::quotient_enclosure(&num, &den, BASE_BITS)
            .ok_or(Error::IndeterminateComparison {
                max_bits: BASE_BITS,
            })?;
        Ok(ExactScalar::Constructed(Box::new(Constructed {
            num,
            den,
            enclosure,
            enclosure_bits: BASE_BITS,
        })))
    }

    fn quotient_enclosure(num: &RadicalSum, den: &RadicalSum, bits: u32) -> Option<Interval> {
        if den.as_rational() == Some(BigRational::one()) {
            return Some(num.enclosure(bits));
        }
        // The denominator is nonzero, so some precision separates it from 0.
        let mut b = bits;
        for _ in 0..16 {
            let dv = den.enclosure(b);
            if !dv.contains_zero() {
                let nv = num.enclosure(b);
                return nv.div(&dv, b);
            }
            b = b.saturating_mul(2);
        }
        None
    }

    fn parts(&self) -> (RadicalSum, RadicalSum) {
        match self {
            ExactScalar::Rational(q) => {
                (RadicalSum::from_rational(q.clone()), RadicalSum::one())
            }
            ExactScalar::Constructed(c) => (c.num.clone(), c.den.clone()),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactScalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactScalar::Rational(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ExactScalar::Rational(q) if q.is_one())
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, ExactScalar::Rational(q) if q.is_integer())
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => {
                ExactScalar::Rational(a + b)
            }
            _ => {
                let (n1, d1) = self.parts();
                let (n2, d2) = other.parts();
                let num = n1.mul(&d2).add(&n2.mul(&d1));
                let den = d1.mul(&d2);
                Self::make(num, den).expect("nonzero denominators")
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(-q),
            ExactScalar::Constructed(c) => ExactScalar::Constructed(Box::new(Constructed {
                num: c.num.neg(),
                den: c.den.clone(),
                enclosure: c.enclosure.neg(),
                enclosure_bits: c.enclosure_bits,
            })),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => {
                ExactScalar::Rational(a * b)
            }
            _ => {
                let (n1, d1) = self.parts();
                let (n2, d2) = other.parts();
                Self::make(n1.mul(&n2), d1.mul(&d2)).expect("nonzero denominators")
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => {
                Ok(ExactScalar::Rational(a / b))
            }
            _ => {
                let (n1, d1) = self.parts();
                let (n2, d2) = other.parts();
                Self::make(n1.mul(&d2), d1.mul(&n2))
            }
        }
    }

    pub fn pow_i(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(ExactScalar::one());
        }
        let mut base = if e < 0 {
            ExactScalar::one().div(self)?
        } else {
            self.clone()
        };
        let mut exp = e.unsigned_abs();
        let mut acc = ExactScalar::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// n-th root; exact on rationals, error for constructed inputs.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        match self {
            ExactScalar::Rational(q) => Self::nth_root_of(q, n),
            ExactScalar::Constructed(_) => Err(Error::InvalidInput(
                "n-th root of a constructed value is not supported".into(),
            )),
        }
    }

    /// Enclosure at the requested precision; never wider than the cache.
    pub fn enclosure(&self, bits: u32) -> Interval {
        match self {
            ExactScalar::Rational(q) => Interval::from_rational(q, bits),
            ExactScalar::Constructed(c) => {
                let fresh = Self::quotient_enclosure(&c.num, &c.den, bits)
                    .unwrap_or_else(|| c.enclosure.clone());
                fresh.intersect(&c.enclosure)
            }
        }
    }

    /// New value carrying a cache refined to at least `bits` of precision.
    pub fn refined(&self, bits: u32) -> Self {
        match self {
            ExactScalar::Rational(_) => self.clone(),
            ExactScalar::Constructed(c) => {
                if c.enclosure_bits >= bits {
                    return self.clone();
                }
                let iv = self.enclosure(bits);
                ExactScalar::Constructed(Box::new(Constructed {
                    num: c.num.clone(),
                    den: c.den.clone(),
                    enclosure: iv,
                    enclosure_bits: bits,
                }))
            }
        }
    }

    /// The value as a quotient-free radical sum, when it is one (rationals
    /// always are; constructed values unless a denominator of root order
    /// three or higher survived canonicalization).
    pub fn as_radical_sum(&self) -> Option<RadicalSum> {
        match self {
            ExactScalar::Rational(q) => Some(RadicalSum::from_rational(q.clone())),
            ExactScalar::Constructed(c) => {
                if c.den.as_rational() == Some(BigRational::one()) {
                    Some(c.num.clone())
                } else {
                    None
                }
            }
        }
    }

    /// A rational upper bound for |self|.
    pub fn abs_upper_bound(&self) -> BigRational {
        match self {
            ExactScalar::Rational(q) => q.abs(),
            ExactScalar::Constructed(c) => {
                let lo = c.enclosure.lo.to_rational().abs();
                let hi = c.enclosure.hi.to_rational().abs();
                lo.max(hi)
            }
        }
    }

    /// Floor, decided exactly or failing with `IndeterminateFloor`.
    pub fn floor(&self, max_bits: u32) -> Result<BigInt> {
        match self {
            ExactScalar::Rational(q) => Ok(q.floor().to_integer()),
            ExactScalar::Constructed(_) => {
                let mut bits = BASE_BITS;
                loop {
                    let iv = self.enclosure(bits);
                    let flo = iv.lo.floor_int();
                    let fhi = iv.hi.floor_int();
                    if flo == fhi {
                        return Ok(flo);
                    }
                    // Width below 1: at most one integer candidate can be the
                    // exact value; settle it symbolically.
                    if &fhi - &flo == BigInt::one() {
                        let cand = ExactScalar::from_bigint(fhi.clone());
                        if self.sub(&cand).is_zero() {
                            return Ok(fhi);
                        }
                    }
                    if bits >= max_bits {
                        return Err(Error::IndeterminateFloor {
                            max_bits,
                            path: None,
                        });
                    }
                    bits = (bits * 2).min(max_bits.max(BASE_BITS + 1));
                }
            }
        }
    }

    /// Fractional part in [0,1); rational in, rational out.
    pub fn frac(&self, max_bits: u32) -> Result<Self> {
        let f = self.floor(max_bits)?;
        Ok(self.sub(&ExactScalar::from_bigint(f)))
    }

    /// Trichotomy. EQ is symbolic (exact); LT/GT by enclosure refinement.
    pub fn compare(&self, other: &Self, max_bits: u32) -> Result<Ordering> {
        if let (ExactScalar::Rational(a), ExactScalar::Rational(b)) = (self, other) {
            return Ok(a.cmp(b));
        }
        let diff = self.sub(other);
        match &diff {
            ExactScalar::Rational(q) => Ok(q.cmp(&BigRational::zero())),
            ExactScalar::Constructed(_) => {
                // Nonzero by canonical form; refine until the sign shows.
                let mut bits = BASE_BITS;
                loop {
                    let iv = diff.enclosure(bits);
                    if !iv.contains_zero() {
                        return if iv.lo.m.is_positive() {
                            Ok(Ordering::Greater)
                        } else {
                            Ok(Ordering::Less)
                        };
                    }
                    if bits >= max_bits {
                        return Err(Error::IndeterminateComparison { max_bits });
                    }
                    bits = (bits * 2).min(max_bits.max(BASE_BITS + 1));
                }
            }
        }
    }

    pub fn sign(&self, max_bits: u32) -> Result<Ordering> {
        self.compare(&ExactScalar::zero(), max_bits)
    }

    pub fn is_nonnegative(&self, max_bits: u32) -> Result<bool> {
        Ok(self.sign(max_bits)? != Ordering::Less)
    }

    /// Decimal string with `digits` places, correctly rounded down; inexact
    /// for constructed values and marked by the caller.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = match self {
            ExactScalar::Rational(q) => {
                (q * BigRational::from_integer(scale.clone())).floor().to_integer()
            }
            ExactScalar::Constructed(_) => {
                let iv = self.enclosure(64 + 4 * digits);
                (iv.lo.to_rational() * BigRational::from_integer(scale.clone()))
                    .floor()
                    .to_integer()
            }
        };
        let neg = scaled.is_negative();
        let mag = scaled.magnitude().to_string();
        let mag = if mag.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - mag.len()), mag)
        } else {
            mag
        };
        let split = mag.len() - digits as usize;
        let (int, fracpart) = mag.split_at(split);
        format!("{}{}.{}", if neg { "-" } else { "" }, int, fracpart)
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => a == b,
            _ => self.sub(other).is_zero(),
        }
    }
}

impl Eq for ExactScalar {}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_monomial(m: &RadicalMonomial) -> String {
    m.factors
        .iter()
        .map(|(b, e)| {
            let root = if e.den == 2 {
                format!("sqrt({b})")
            } else {
                format!("root({b},{})", e.den)
            };
            if e.num == 1 {
                root
            } else {
                format!("{root}^{}", e.num)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn fmt_sum(s: &RadicalSum) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, m)) in s.terms.iter().enumerate() {
        let neg = c.is_negative();
        let ca = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&fmt_rational(&ca));
        } else if ca.is_one() {
            out.push_str(&fmt_monomial(m));
        } else {
            out.push_str(&format!("{}*{}", fmt_rational(&ca), fmt_monomial(m)));
        }
    }
    out
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            ExactScalar::Constructed(c) => {
                if c.den.as_rational() == Some(BigRational::one()) {
                    if c.num.terms.len() == 1 {
                        write!(f, "{}", fmt_sum(&c.num))
                    } else {
                        write!(f, "({})", fmt_sum(&c.num))
                    }
                } else {
                    write!(f, "({})/({})", fmt_sum(&c.num), fmt_sum(&c.den))
                }
            }
        }
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Serialize a rational as the textual `p/q` form used across all artifacts.
pub fn rational_to_string(q: &BigRational) -> String {
    fmt_rational(q)
}

pub fn rational_from_string(s: &str) -> Result<BigRational> {
    match parse_scalar(s)? {
        ExactScalar::Rational(q) => Ok(q),
        _ => Err(Error::InvalidInput(format!("`{s}` is not rational"))),
    }
}
