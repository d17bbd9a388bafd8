//! Expansion of a univariate generalised polynomial as a polynomial in n
//! with bounded generalised-polynomial coefficients.
//!
//! Structure: Var contributes n^1, constants degree 0, Add/Mul combine
//! expansions, Frac(g) is itself a bounded coefficient, and Floor(g) is
//! g - Frac(g) so the Frac lands in the degree-0 coefficient. Every monomial
//! of every coefficient therefore contains a Frac factor or is constant, and
//! a rational sup-bound certificate comes from interval rules with each Frac
//! valued in [0,1).

use super::{sup_bound, GenPoly};
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use num_rational::BigRational;

/// g(n) = sum coeffs[i](n) * n^i with |coeffs[i](n)| <= bounds[i] on all of N.
#[derive(Debug, Clone)]
pub struct PolyInNExpansion {
    pub coeffs: Vec<GenPoly>,
    pub bounds: Vec<BigRational>,
}

impl PolyInNExpansion {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Reassemble sum coeffs[i](n) * n^i as a generalised polynomial.
    pub fn reassemble(&self) -> GenPoly {
        let terms: Vec<GenPoly> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, h)| {
                if i == 0 {
                    h.clone()
                } else {
                    h.clone().mul2(GenPoly::pow_of(GenPoly::n(), i as u32))
                }
            })
            .collect();
        GenPoly::sum(terms)
    }

    /// Exact evaluation of the reassembled form, for soundness checks.
    pub fn eval_at_int(&self, n: i64, max_bits: u32) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        let nv = ExactScalar::from_int(n);
        for (i, h) in self.coeffs.iter().enumerate() {
            let hv = h.eval(&[nv.clone()], max_bits)?;
            acc = acc.add(&hv.mul(&nv.pow_i(i as i64).expect("nonnegative power")));
        }
        Ok(acc)
    }
}

/// Expand a univariate generalised polynomial in its variable.
pub fn expand_in_var(g: &GenPoly) -> Result<PolyInNExpansion> {
    if g.arity() > 1 {
        return Err(Error::InvalidInput(
            "expansion requires a univariate expression".into(),
        ));
    }
    let mut coeffs = expand_rec(g);
    // Trim structurally-zero top coefficients but keep degree 0.
    while coeffs.len() > 1 && coeffs.last().map(GenPoly::is_const_zero) == Some(true) {
        coeffs.pop();
    }
    let bounds = coeffs
        .iter()
        .map(sup_bound)
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyInNExpansion { coeffs, bounds })
}

fn expand_rec(g: &GenPoly) -> Vec<GenPoly> {
    match g {
        GenPoly::Var(_) => vec![GenPoly::int(0), GenPoly::int(1)],
        GenPoly::Const(c) => vec![GenPoly::Const(c.clone())],
        GenPoly::Add(ch) => {
            let mut acc = vec![GenPoly::int(0)];
            for c in ch {
                let e = expand_rec(c);
                if e.len() > acc.len() {
                    acc.resize(e.len(), GenPoly::int(0));
                }
                for (i, h) in e.into_iter().enumerate() {
                    acc[i] = std::mem::replace(&mut acc[i], GenPoly::int(0)).add2(h);
                }
            }
            acc
        }
        GenPoly::Mul(ch) => {
            let mut acc = vec![GenPoly::int(1)];
            for c in ch {
                acc = convolve(&acc, &expand_rec(c));
            }
            acc
        }
        GenPoly::IntPow(b, e) => {
            let base = expand_rec(b);
            let mut acc = vec![GenPoly::int(1)];
            for _ in 0..*e {
                acc = convolve(&acc, &base);
            }
            acc
        }
        GenPoly::Frac(_) => vec![g.clone()],
        GenPoly::Floor(b) => {
            let mut e = expand_rec(b);
            e[0] = std::mem::replace(&mut e[0], GenPoly::int(0))
                .sub2(GenPoly::frac_of(b.as_ref().clone()));
            e
        }
    }
}

fn convolve(a: &[GenPoly], b: &[GenPoly]) -> Vec<GenPoly> {
    let mut out = vec![GenPoly::int(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_const_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_const_zero() {
                continue;
            }
            let term = x.clone().mul2(y.clone());
            out[i + j] = std::mem::replace(&mut out[i + j], GenPoly::int(0)).add2(term);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genpoly::parse;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn expansion_of_n_times_frac() {
        // g = n*{n/3}: d = 1, h_1 = {n/3}, h_0 = 0, bound(h_1) = 1
        let g = parse("n*frac(n/3)").unwrap();
        let e = expand_in_var(&g).unwrap();
        assert_eq!(e.degree(), 1);
        assert!(e.coeffs[0].is_const_zero());
        assert_eq!(e.bounds[1], rat(1, 1));
    }

    #[test]
    fn expansion_of_floor() {
        // g = floor(2n/3): d = 1, h_1 = 2/3, h_0 = -{2n/3}
        let g = parse("floor(2*n/3)").unwrap();
        let e = expand_in_var(&g).unwrap();
        assert_eq!(e.degree(), 1);
        assert_eq!(e.coeffs[1], GenPoly::ratio(2, 3));
        assert_eq!(
            e.coeffs[0],
            GenPoly::frac_of(parse("2*n/3").unwrap()).negate()
        );
    }

    #[test]
    fn expansion_matches_evaluation() {
        // g = n^2*{n/2} + 5n: d = 2, h_2 = {n/2}, h_1 = 5, h_0 = 0,
        // checked against direct evaluation on n = 1..20
        let g = parse("n^2*frac(n/2) + 5*n").unwrap();
        let e = expand_in_var(&g).unwrap();
        assert_eq!(e.degree(), 2);
        assert_eq!(e.coeffs[1], GenPoly::int(5));
        for n in 1..=20 {
            assert_eq!(
                e.eval_at_int(n, 4096).unwrap(),
                g.eval_at_int(n, 4096).unwrap()
            );
        }
    }

    #[test]
    fn expansion_soundness_random_shapes() {
        let samples = [
            "floor(n/2)*frac(n*3/7) - n",
            "(n - floor(n*5/9))^2",
            "frac(n*frac(n/2) + 1/3)*n^3 - floor(n)*2",
            "floor(floor(n/2)/3) + frac(sqrt(2)*n)",
        ];
        for s in samples {
            let g = parse(s).unwrap();
            let e = expand_in_var(&g).unwrap();
            for n in 1..=30 {
                let direct = g.eval_at_int(n, 4096).unwrap();
                let via = e.eval_at_int(n, 4096).unwrap();
                assert_eq!(direct, via, "expansion mismatch for {s} at n={n}");
                // certified bounds hold coefficientwise
                for (h, b) in e.coeffs.iter().zip(&e.bounds) {
                    let hv = h.eval_at_int(n, 4096).unwrap();
                    assert!(
                        hv.abs_upper_bound() <= b.abs() + rat(1, 1_000_000_000),
                        "bound violated for {s}"
                    );
                }
            }
        }
    }
}
