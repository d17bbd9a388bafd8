//! Constructive {0,1}-valued indicators of sign conditions on N.
//!
//! `indicator_ge0` follows the inductive descent on the expansion degree d:
//! when the top coefficient dominates, the sign of g is the sign of h_d;
//! otherwise a gate q(n) switches to a degree-(d-1) replacement whose top
//! coefficient absorbs n*h_d(n) exactly.
//!
//! Two closed forms do the bounded work:
//! - for bounded g with |g| < M: [[g = 0]] = floor(1 - {g/(2M)}) and
//!   [[g >= 0]] = 1 - floor(2{g/(2M)}), valid since g/(2M) lies in
//!   (-1/2, 1/2);
//! - for integer-valued z: [[z = 0]] = 1 - {z*sqrt(2)} - {-z*sqrt(2)}, since
//!   {y} + {-y} vanishes exactly on integers and z*sqrt(2) is an integer only
//!   for z = 0. The gate needs this because n*h_d(n) is unbounded.

use super::expand::{expand_in_var, PolyInNExpansion};
use super::GenPoly;
use crate::error::Result;
use crate::scalar::{ExactScalar, DEFAULT_MAX_BITS};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// [[g >= 0]] for bounded g with a strict bound |g| < m.
fn bounded_ge0(g: GenPoly, m: &BigRational) -> GenPoly {
    let half_inv = BigRational::new(BigInt::from(1), BigInt::from(2)) / m; // 1/(2M)
    let scaled = g.mul2(GenPoly::constant(ExactScalar::from_rational(half_inv)));
    GenPoly::int(1).sub2(GenPoly::floor_of(
        GenPoly::int(2).mul2(GenPoly::frac_of(scaled)),
    ))
}

/// [[z = 0]] for integer-valued z.
fn integer_is_zero(z: GenPoly) -> GenPoly {
    let theta = GenPoly::constant(ExactScalar::sqrt_int(2).expect("sqrt(2)"));
    let pos = GenPoly::frac_of(theta.clone().mul2(z.clone()));
    let neg = GenPoly::frac_of(theta.negate().mul2(z));
    GenPoly::int(1).sub2(pos).sub2(neg)
}

/// The gate q(n) = [[ -C <= n*h_d(n) < C ]], built as
/// [[ floor(n*h_d(n)/(2C) + 1/2) = 0 ]].
fn gate(h_top: &GenPoly, c: &BigRational) -> GenPoly {
    let half_inv = BigRational::new(BigInt::from(1), BigInt::from(2)) / c; // 1/(2C)
    let z = GenPoly::floor_of(
        GenPoly::n()
            .mul2(h_top.clone())
            .mul2(GenPoly::constant(ExactScalar::from_rational(half_inv)))
            .add2(GenPoly::ratio(1, 2)),
    );
    integer_is_zero(z)
}

fn build(exp: PolyInNExpansion) -> GenPoly {
    let d = exp.degree();
    if d == 0 {
        let m = &exp.bounds[0] + BigRational::one();
        return bounded_ge0(exp.coeffs[0].clone(), &m);
    }
    // Strict upper bound for |sum_{i<d} h_i(n)/n^{d-1-i}| over n >= 1.
    let c: BigRational =
        exp.bounds[..d].iter().fold(BigRational::one(), |a, b| a + b);
    let h_top = exp.coeffs[d].clone();
    let q = gate(&h_top, &c);

    // h'_{d-1}(n) = h_{d-1}(n) + 2C({ n*h_d(n)/(2C) + 1/2 } - 1/2); equal to
    // h_{d-1}(n) + n*h_d(n) whenever the gate is open, and always bounded by
    // bounds[d-1] + C.
    let half_inv = BigRational::new(BigInt::from(1), BigInt::from(2)) / &c;
    let wrapped = GenPoly::frac_of(
        GenPoly::n()
            .mul2(h_top.clone())
            .mul2(GenPoly::constant(ExactScalar::from_rational(half_inv)))
            .add2(GenPoly::ratio(1, 2)),
    )
    .sub2(GenPoly::ratio(1, 2));
    let two_c = &c + &c;
    let h_prime = exp.coeffs[d - 1]
        .clone()
        .add2(wrapped.mul2(GenPoly::constant(ExactScalar::from_rational(two_c))));

    let mut coeffs = exp.coeffs[..d - 1].to_vec();
    coeffs.push(h_prime);
    let mut bounds = exp.bounds[..d - 1].to_vec();
    bounds.push(&exp.bounds[d - 1] + &c);
    let inner = build(PolyInNExpansion { coeffs, bounds });

    let m_top = &exp.bounds[d] + BigRational::one();
    let lead = bounded_ge0(h_top, &m_top);

    GenPoly::int(1)
        .sub2(q.clone())
        .mul2(lead)
        .add2(q.mul2(inner))
}

/// {0,1}-valued generalised polynomial equal to 1 at n iff g(n) >= 0.
/// Defined on the domain N = {1, 2, ...}.
pub fn indicator_ge0(g: &GenPoly) -> Result<GenPoly> {
    let exp = expand_in_var(g)?;
    Ok(build(exp))
}

/// {0,1}-valued generalised polynomial equal to 1 at n iff a <= g(n) < b.
pub fn indicator_interval(g: &GenPoly, a: &ExactScalar, b: &ExactScalar) -> Result<GenPoly> {
    if a.compare(b, DEFAULT_MAX_BITS)? != std::cmp::Ordering::Less {
        return Err(crate::error::Error::InvalidInput(
            "indicator_interval requires a < b".into(),
        ));
    }
    let ge_a = indicator_ge0(&g.clone().sub2(GenPoly::constant(a.clone())))?;
    let ge_b = indicator_ge0(&g.clone().sub2(GenPoly::constant(b.clone())))?;
    Ok(ge_a.mul2(GenPoly::int(1).sub2(ge_b)))
}

/// {0,1}-valued generalised polynomial equal to 1 at n iff g(n) = 0.
pub fn indicator_zero(g: &GenPoly) -> Result<GenPoly> {
    let pos = indicator_ge0(g)?;
    let neg = indicator_ge0(&g.clone().negate())?;
    Ok(pos.mul2(neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genpoly::parse;
    use std::cmp::Ordering;

    const BITS: u32 = DEFAULT_MAX_BITS;

    fn check_ge0(g: &GenPoly, range: std::ops::RangeInclusive<i64>) {
        let ind = indicator_ge0(g).unwrap();
        for n in range {
            let direct = g.eval_at_int(n, BITS).unwrap();
            let expected = if direct.sign(BITS).unwrap() != Ordering::Less {
                1
            } else {
                0
            };
            let got = ind.eval_at_int(n, BITS).unwrap();
            assert_eq!(
                got,
                ExactScalar::from_int(expected),
                "indicator_ge0 mismatch for {} at n={n}",
                g.unparse()
            );
        }
    }

    #[test]
    fn linear_threshold() {
        // g = n - 5: 0 on 1..4, 1 from 5 on (evaluation oracle over 1..100)
        let g = parse("n - 5").unwrap();
        check_ge0(&g, 1..=100);
    }

    #[test]
    fn constant_one() {
        let g = parse("1").unwrap();
        let ind = indicator_ge0(&g).unwrap();
        for n in 1..=20 {
            assert_eq!(ind.eval_at_int(n, BITS).unwrap(), ExactScalar::one());
        }
    }

    #[test]
    fn sturmian_sign() {
        // g = {n*sqrt(2)} - 1/2 against the evaluation oracle on 1..200
        let g = parse("frac(n*sqrt(2)) - 1/2").unwrap();
        check_ge0(&g, 1..=200);
    }

    #[test]
    fn quadratic_and_mixed() {
        check_ge0(&parse("n^2 - 7*n + 3").unwrap(), 1..=60);
        check_ge0(&parse("n*frac(n/3) - 1").unwrap(), 1..=60);
        check_ge0(&parse("floor(n/2) - frac(n*5/7)*n").unwrap(), 1..=60);
    }

    #[test]
    fn interval_indicator() {
        // g = n on [3,6): exactly {3,4,5}
        let g = parse("n").unwrap();
        let ind = indicator_interval(
            &g,
            &ExactScalar::from_int(3),
            &ExactScalar::from_int(6),
        )
        .unwrap();
        for n in 1..=20 {
            let expect = i64::from((3..6).contains(&n));
            assert_eq!(
                ind.eval_at_int(n, BITS).unwrap(),
                ExactScalar::from_int(expect)
            );
        }
    }

    #[test]
    fn interval_indicator_full_range_of_frac() {
        // {n*sqrt(2)} always lies in [0,1)
        let g = parse("frac(n*sqrt(2))").unwrap();
        let ind =
            indicator_interval(&g, &ExactScalar::zero(), &ExactScalar::one()).unwrap();
        for n in 1..=50 {
            assert_eq!(ind.eval_at_int(n, BITS).unwrap(), ExactScalar::one());
        }
    }

    #[test]
    fn interval_below_domain() {
        // g = n on [0, 1/2): empty for n >= 1
        let g = parse("n").unwrap();
        let ind =
            indicator_interval(&g, &ExactScalar::zero(), &ExactScalar::ratio(1, 2))
                .unwrap();
        for n in 1..=20 {
            assert_eq!(ind.eval_at_int(n, BITS).unwrap(), ExactScalar::zero());
        }
    }

    #[test]
    fn zero_indicator() {
        // {n/2} = 0 exactly at even n
        let g = parse("frac(n/2)").unwrap();
        let ind = indicator_zero(&g).unwrap();
        for n in 1..=40 {
            let expect = i64::from(n % 2 == 0);
            assert_eq!(
                ind.eval_at_int(n, BITS).unwrap(),
                ExactScalar::from_int(expect)
            );
        }
        // constants
        let one = indicator_zero(&parse("0").unwrap()).unwrap();
        let zero = indicator_zero(&parse("1").unwrap()).unwrap();
        for n in 1..=10 {
            assert_eq!(one.eval_at_int(n, BITS).unwrap(), ExactScalar::one());
            assert_eq!(zero.eval_at_int(n, BITS).unwrap(), ExactScalar::zero());
        }
    }
}
