//! Canonical sums of radical monomials over Q.
//!
//! A radical monomial is a product of prime powers p^(a/b) with exponent in
//! (0,1); a radical sum is a Q-linear combination of distinct monomials.
//! Distinct monomials are linearly independent over Q, so a sum is zero
//! exactly when it has no terms. That makes equality of constructed scalars
//! decidable without any precision budget.

use super::dyadic::{root_enclosure, Interval};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Exponent a/b in lowest terms with 0 < a < b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadExp {
    pub num: u32,
    pub den: u32,
}

impl RadExp {
    fn reduced(num: u32, den: u32) -> Self {
        let g = num.gcd(&den);
        RadExp {
            num: num / g,
            den: den / g,
        }
    }
}

/// Product of prime powers with fractional exponents; `1` when empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RadicalMonomial {
    pub factors: Vec<(BigUint, RadExp)>,
}

impl RadicalMonomial {
    pub fn one() -> Self {
        RadicalMonomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiply two monomials; integer exponent carries come back as a
    /// rational factor.
    pub fn mul(&self, other: &RadicalMonomial) -> (BigRational, RadicalMonomial) {
        let mut carry = BigRational::one();
        let mut map: BTreeMap<BigUint, (u64, u64)> = BTreeMap::new();
        for (b, e) in self.factors.iter().chain(other.factors.iter()) {
            let entry = map.entry(b.clone()).or_insert((0, 1));
            // a/b + c/d over u64 stays tiny: exponent denominators are root orders.
            let (a, bd) = *entry;
            let (c, d) = (e.num as u64, e.den as u64);
            let den = bd.lcm(&d);
            let num = a * (den / bd) + c * (den / d);
            *entry = (num, den);
        }
        let mut factors = Vec::new();
        for (base, (num, den)) in map {
            let int_part = num / den;
            let rem = num % den;
            if int_part > 0 {
                let p = BigRational::from_integer(BigInt::from(base.clone()))
                    .pow(int_part as i32);
                carry *= p;
            }
            if rem > 0 {
                let g = rem.gcd(&den);
                factors.push((
                    base,
                    RadExp {
                        num: (rem / g) as u32,
                        den: (den / g) as u32,
                    },
                ));
            }
        }
        (carry, RadicalMonomial { factors })
    }

    /// Inverse as (rational carry, monomial): p^(-a/b) = p^-1 * p^((b-a)/b).
    pub fn inverse(&self) -> (BigRational, RadicalMonomial) {
        let mut carry = BigRational::one();
        let mut factors = Vec::new();
        for (base, e) in &self.factors {
            carry /= BigRational::from_integer(BigInt::from(base.clone()));
            factors.push((base.clone(), RadExp::reduced(e.den - e.num, e.den)));
        }
        factors.sort();
        (carry, RadicalMonomial { factors })
    }

    /// True if some factor has an exponent with denominator 2.
    pub fn has_sqrt_of(&self, base: &BigUint) -> bool {
        self.factors
            .iter()
            .any(|(b, e)| b == base && e.den == 2)
    }

    pub fn enclosure(&self, bits: u32) -> Interval {
        let mut acc = Interval::one();
        for (base, e) in &self.factors {
            let powed = base.pow(e.num);
            let iv = root_enclosure(&powed, e.den, bits + 8);
            acc = acc.mul(&iv, bits + 8);
        }
        acc
    }
}

/// Q-linear combination of radical monomials, sorted by monomial.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RadicalSum {
    pub terms: Vec<(BigRational, RadicalMonomial)>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        RadicalSum::default()
    }

    pub fn one() -> Self {
        RadicalSum::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        if q.is_zero() {
            return RadicalSum::zero();
        }
        RadicalSum {
            terms: vec![(q, RadicalMonomial::one())],
        }
    }

    pub fn from_term(c: BigRational, m: RadicalMonomial) -> Self {
        if c.is_zero() {
            return RadicalSum::zero();
        }
        RadicalSum { terms: vec![(c, m)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(q) when the sum is a plain rational (including zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 if self.terms[0].1.is_one() => Some(self.terms[0].0.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &RadicalSum) -> Self {
        let mut map: BTreeMap<RadicalMonomial, BigRational> = BTreeMap::new();
        for (c, m) in self.terms.iter().chain(other.terms.iter()) {
            let e = map.entry(m.clone()).or_insert_with(BigRational::zero);
            *e += c;
        }
        RadicalSum {
            terms: map
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RadicalSum {
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &RadicalSum) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RadicalSum) -> Self {
        let mut acc = RadicalSum::zero();
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                let (carry, m) = m1.mul(m2);
                acc = acc.add(&RadicalSum::from_term(c1 * c2 * carry, m));
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return RadicalSum::zero();
        }
        RadicalSum {
            terms: self
                .terms
                .iter()
                .map(|(ci, m)| (ci * c, m.clone()))
                .collect(),
        }
    }

    pub fn enclosure(&self, bits: u32) -> Interval {
        let mut acc = Interval::zero();
        for (c, m) in &self.terms {
            let term = m.enclosure(bits).scale_rational(c, bits + 8);
            acc = acc.add(&term, bits + 8);
        }
        acc
    }

    /// Split into (terms containing sqrt(base), the rest).
    pub fn split_sqrt(&self, base: &BigUint) -> (RadicalSum, RadicalSum) {
        let mut with = RadicalSum::zero();
        let mut without = RadicalSum::zero();
        for (c, m) in &self.terms {
            let part = RadicalSum::from_term(c.clone(), m.clone());
            if m.has_sqrt_of(base) {
                with = with.add(&part);
            } else {
                without = without.add(&part);
            }
        }
        (with, without)
    }

    /// All bases that occur with exponent denominator 2.
    pub fn sqrt_bases(&self) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::new();
        for (_, m) in &self.terms {
            for (b, e) in &m.factors {
                if e.den == 2 && !out.contains(b) {
                    out.push(b.clone());
                }
            }
        }
        out
    }

    /// Basis of monomials spanning this sum (used to linearize over Q).
    pub fn monomials(&self) -> Vec<RadicalMonomial> {
        self.terms.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn coeff_of(&self, m: &RadicalMonomial) -> BigRational {
        self.terms
            .iter()
            .find(|(_, mm)| mm == m)
            .map(|(c, _)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }
}

/// Factor n into primes. Trial division, then Miller-Rabin + Pollard rho for
/// any large cofactor.
pub fn factorize(n: &BigUint) -> Result<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    let mut n = n.clone();
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    for p in std::iter::once(2u64).chain((3..1_000_000u64).step_by(2)) {
        let pb = BigUint::from(p);
        if &pb * &pb > n {
            break;
        }
        while (&n % &pb).is_zero() {
            *out.entry(pb.clone()).or_insert(0) += 1;
            n /= &pb;
        }
    }
    if !n.is_one() {
        factor_large(&n, &mut out)?;
    }
    Ok(out)
}

fn factor_large(n: &BigUint, out: &mut BTreeMap<BigUint, u32>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_probable_prime(n) {
        *out.entry(n.clone()).or_insert(0) += 1;
        return Ok(());
    }
    // Perfect power check before rho.
    let maxk = n.bits() as u32;
    for k in 2..=maxk {
        let r = num_integer::Roots::nth_root(n, k);
        if r.pow(k) == *n {
            let mut inner = BTreeMap::new();
            factor_large(&r, &mut inner)?;
            for (p, e) in inner {
                *out.entry(p).or_insert(0) += e * k;
            }
            return Ok(());
        }
    }
    let d = pollard_rho(n)
        .ok_or_else(|| Error::InvalidInput(format!("cannot factor radicand {n}")))?;
    factor_large(&d, out)?;
    factor_large(&(n / &d), out)
}

fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n == &two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    // Deterministic witness set for n < 3.3 * 10^24.
    for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let ab = BigUint::from(a);
        if &ab >= n {
            continue;
        }
        let mut x = ab.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        let mut ok = false;
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                ok = true;
                break;
            }
        }
        if !ok {
            return false;
        }
    }
    true
}

fn pollard_rho(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u64..64 {
        let cb = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cb) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut steps = 0u64;
        while d == one && steps < 1_000_000 {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
            steps += 1;
        }
        if d != one && &d != n {
            return Some(d);
        }
    }
    None
}

/// Real n-th root of a rational as (rational carry, monomial).
///
/// Even roots of negatives are rejected; odd roots of negatives pull the sign
/// into the carry.
pub fn nth_root_rational(q: &BigRational, n: u32) -> Result<(BigRational, RadicalMonomial)> {
    if n == 0 {
        return Err(Error::InvalidInput("0-th root".into()));
    }
    if q.is_zero() {
        return Ok((BigRational::zero(), RadicalMonomial::one()));
    }
    let mut sign = BigRational::one();
    let qa = if q.is_negative() {
        if n % 2 == 0 {
            return Err(Error::InvalidInput(
                "even root of a negative rational".into(),
            ));
        }
        sign = -sign;
        -q.clone()
    } else {
        q.clone()
    };
    // Signed prime exponents of the absolute value.
    let mut exps: BTreeMap<BigUint, i64> = BTreeMap::new();
    for (p, e) in factorize(qa.numer().magnitude())? {
        *exps.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factorize(qa.denom().magnitude())? {
        *exps.entry(p).or_insert(0) -= e as i64;
    }
    let mut carry = sign;
    let mut factors = Vec::new();
    for (p, e) in exps {
        if e == 0 {
            continue;
        }
        let nn = n as i64;
        let int_part = e.div_euclid(nn);
        let rem = e.rem_euclid(nn) as u32;
        if int_part != 0 {
            let base = BigRational::from_integer(BigInt::from(p.clone()));
            carry *= base.pow(int_part.to_i32().ok_or_else(|| {
                Error::InvalidInput("exponent overflow in root".into())
            })?);
        }
        if rem > 0 {
            factors.push((p, RadExp::reduced(rem, n)));
        }
    }
    factors.sort();
    Ok((carry, RadicalMonomial { factors }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let (c, m) = nth_root_rational(&rat(2, 1), 2).unwrap();
        assert_eq!(c, rat(1, 1));
        let s = RadicalSum::from_term(c, m);
        let sq = s.mul(&s);
        assert_eq!(sq.as_rational(), Some(rat(2, 1)));
    }

    #[test]
    fn root_of_fraction_normalizes() {
        // sqrt(1/2) = (1/2) sqrt(2)
        let (c, m) = nth_root_rational(&rat(1, 2), 2).unwrap();
        assert_eq!(c, rat(1, 2));
        assert_eq!(m.factors.len(), 1);
        assert_eq!(m.factors[0].1, RadExp { num: 1, den: 2 });
    }

    #[test]
    fn perfect_square_collapses() {
        let (c, m) = nth_root_rational(&rat(4, 9), 2).unwrap();
        assert!(m.is_one());
        assert_eq!(c, rat(2, 3));
    }

    #[test]
    fn cube_root_of_negative_is_signed() {
        let (c, m) = nth_root_rational(&rat(-8, 1), 3).unwrap();
        assert!(m.is_one());
        assert_eq!(c, rat(-2, 1));
    }

    #[test]
    fn independent_radicals_do_not_collapse() {
        let (c2, m2) = nth_root_rational(&rat(2, 1), 2).unwrap();
        let (c3, m3) = nth_root_rational(&rat(3, 1), 2).unwrap();
        let s = RadicalSum::from_term(c2, m2).add(&RadicalSum::from_term(c3, m3));
        assert_eq!(s.terms.len(), 2);
        // sqrt(2)*sqrt(3) = sqrt(6)
        let p = RadicalSum::from_term(BigRational::one(), s.terms[0].1.clone())
            .mul(&RadicalSum::from_term(BigRational::one(), s.terms[1].1.clone()));
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].1.factors.len(), 2);
    }

    #[test]
    fn factorize_large_semiprime() {
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
        let f = factorize(&n).unwrap();
        assert_eq!(f.len(), 2);
    }
}
