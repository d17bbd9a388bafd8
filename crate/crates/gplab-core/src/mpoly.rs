//! Sparse multivariate polynomials over Q.
//!
//! Terms are kept in a BTreeMap keyed by exponent vectors of a fixed arity,
//! ordered graded-lexicographically. Serialization is the sparse
//! `{exponent-tuple: rational}` map used by every JSON artifact.

use crate::error::{Error, Result};
use crate::scalar::{rational_from_string, rational_to_string, ExactScalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector; length equals the ambient arity.
pub type Exponents = Vec<u32>;

/// Graded-lexicographic comparison (total degree first, then lex).
pub fn grlex(a: &Exponents, b: &Exponents) -> std::cmp::Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    pub arity: usize,
    pub terms: BTreeMap<Exponents, BigRational>,
}

impl MPoly {
    pub fn zero(arity: usize) -> Self {
        MPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = MPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigRational::one())
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index out of range");
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = MPoly::zero(arity);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn monomial(arity: usize, exps: Exponents, c: BigRational) -> Self {
        assert_eq!(exps.len(), arity);
        let mut p = MPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        MPoly {
            arity: self.arity,
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        MPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.arity);
        }
        MPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut terms: BTreeMap<Exponents, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        MPoly {
            arity: self.arity,
            terms,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MPoly::one(self.arity);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute each variable by the given polynomial.
    pub fn compose(&self, subs: &[MPoly]) -> Self {
        assert_eq!(subs.len(), self.arity);
        let out_arity = subs.first().map(|p| p.arity).unwrap_or(0);
        let mut acc = MPoly::zero(out_arity);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(out_arity, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Substitute x -> x - v (translation by -v), same arity.
    pub fn translate(&self, v: &[BigRational]) -> Self {
        assert_eq!(v.len(), self.arity);
        let subs: Vec<MPoly> = (0..self.arity)
            .map(|i| {
                MPoly::var(self.arity, i).add(&MPoly::constant(self.arity, -v[i].clone()))
            })
            .collect();
        self.compose(&subs)
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.arity);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_scalar(&self, point: &[ExactScalar]) -> ExactScalar {
        assert_eq!(point.len(), self.arity);
        let mut acc = ExactScalar::zero();
        for (e, c) in &self.terms {
            let mut t = ExactScalar::from_rational(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&point[i].pow_i(k as i64).expect("nonnegative power"));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Leading exponent vector under grlex, if nonzero.
    pub fn leading_exponents(&self) -> Option<&Exponents> {
        self.terms.keys().max_by(|a, b| grlex(a, b))
    }

    pub fn coeff(&self, e: &Exponents) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest absolute coefficient (sup norm on the coefficient vector).
    pub fn sup_norm(&self) -> BigRational {
        use num_traits::Signed;
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Sup-norm distance between coefficient vectors.
    pub fn sup_distance(&self, other: &Self) -> BigRational {
        self.sub(other).sup_norm()
    }

    /// Sparse text map used in JSON artifacts.
    pub fn to_sparse_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let key = e
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                (key, rational_to_string(c))
            })
            .collect()
    }

    pub fn from_sparse_map(arity: usize, map: &BTreeMap<String, String>) -> Result<Self> {
        let mut p = MPoly::zero(arity);
        for (k, v) in map {
            let exps: Exponents = if k.is_empty() {
                vec![0; arity]
            } else {
                k.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::InvalidInput(format!("bad exponent `{s}`")))
                    })
                    .collect::<Result<_>>()?
            };
            if exps.len() != arity {
                return Err(Error::InvalidInput(format!(
                    "exponent tuple `{k}` does not match arity {arity}"
                )));
            }
            let c = rational_from_string(v)?;
            if !c.is_zero() {
                p.terms.insert(exps, c);
            }
        }
        Ok(p)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Exponents> = self.terms.keys().collect();
        keys.sort_by(|a, b| grlex(b, a));
        let mut first = true;
        for e in keys {
            let c = &self.terms[e];
            use num_traits::Signed;
            let neg = c.is_negative();
            let ca = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x_{}", i + 1)
                    } else {
                        format!("x_{}^{}", i + 1, k)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", rational_to_string(&ca))?;
            } else if ca.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", rational_to_string(&ca), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn arithmetic_and_eval_agree() {
        // (x+y)^2 = x^2 + 2xy + y^2
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = x.add(&y).pow(2);
        let q = x
            .pow(2)
            .add(&x.mul(&y).scale(&rat(2, 1)))
            .add(&y.pow(2));
        assert_eq!(p, q);
        let v = p.eval_rational(&[rat(3, 1), rat(-1, 2)]);
        assert_eq!(v, rat(25, 4));
    }

    #[test]
    fn translation_shifts_roots() {
        // p = x^2, translated by v=(1): p(x-1) = (x-1)^2 vanishes at 1
        let p = MPoly::var(1, 0).pow(2);
        let t = p.translate(&[rat(1, 1)]);
        assert!(t.eval_rational(&[rat(1, 1)]).is_zero());
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn sparse_map_roundtrip() {
        let p = MPoly::var(2, 0)
            .pow(3)
            .add(&MPoly::constant(2, rat(-7, 2)));
        let m = p.to_sparse_map();
        let q = MPoly::from_sparse_map(2, &m).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn grlex_orders_by_degree_first() {
        assert_eq!(grlex(&vec![2, 0], &vec![0, 3]), std::cmp::Ordering::Less);
        assert_eq!(grlex(&vec![1, 1], &vec![0, 2]), std::cmp::Ordering::Greater);
    }
}
