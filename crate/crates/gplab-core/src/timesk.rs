//! Generalised x k maps: the integer matrices A_k(x), the scaling map S_k,
//! the torus map T_k on [0,1)^D, and the affine data b_k, A-bar_k.
//!
//! Rows of A_k(x) are built in the canonical order (a linear extension of
//! derivability). A leaf row i is k^{d_i} e_i; a compound row mu = kappa
//! [lambda] combines the kappa and lambda rows through the double sum with
//! the sigma[tau] selector plus the correction term
//!
//!   c_{k,lambda}(x) = -floor( sum_{tau <= lambda} A_k(x)_{lambda,tau} {x_tau} ),
//!
//! which is the unique integer aligning fractional parts.

use crate::brackets::{BracketIndex, IndexSet, IndexSetJson};
use crate::error::{Error, Result};
use crate::genpoly::GenPoly;
use crate::scalar::ExactScalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// A_k(x): integer matrix over D x D in canonical coordinate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimesKMatrix {
    pub dset: IndexSet,
    pub k: u64,
    pub entries: Vec<Vec<BigInt>>,
    pub base_point: Vec<ExactScalar>,
}

impl TimesKMatrix {
    pub fn dim(&self) -> usize {
        self.dset.len()
    }

    pub fn entry(&self, mu: usize, nu: usize) -> &BigInt {
        &self.entries[mu][nu]
    }

    /// Entry (mu, nu) nonzero implies nu derivable from mu.
    pub fn is_lower_triangular(&self) -> bool {
        let m = self.dset.members();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() && !crate::brackets::derivable(&m[j], &m[i]) {
                    return false;
                }
            }
        }
        true
    }

    /// Diagonal entries equal k^{d_mu}.
    pub fn has_standard_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| {
            self.entries[i][i] == BigInt::from(self.k).pow(self.dset.degree_at(i))
        })
    }

    /// Entry (mu, nu) divisible by k^{d_nu}; together with the diagonal this
    /// says A_k(x) Delta_k^{-1} is unipotent with integer entries.
    pub fn has_column_divisibility(&self) -> bool {
        let k = BigInt::from(self.k);
        (0..self.dim()).all(|j| {
            let p = k.pow(self.dset.degree_at(j));
            self.entries.iter().all(|row| row[j].is_multiple_of(&p))
        })
    }

    /// A_k(x) Delta_k^{-1} as an exact rational matrix.
    pub fn times_delta_inverse(&self) -> Vec<Vec<BigRational>> {
        let k = BigInt::from(self.k);
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        BigRational::new(v.clone(), k.pow(self.dset.degree_at(j)))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn mat_vec(&self, x: &[ExactScalar]) -> Vec<ExactScalar> {
        self.entries
            .iter()
            .map(|row| {
                let mut acc = ExactScalar::zero();
                for (a, xv) in row.iter().zip(x) {
                    if !a.is_zero() {
                        acc = acc.add(&ExactScalar::from_bigint(a.clone()).mul(xv));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mat_mul(&self, other: &TimesKMatrix) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if self.entries[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !other.entries[l][j].is_zero() {
                        out[i][j] += &self.entries[i][l] * &other.entries[l][j];
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self, b: Option<&[BigInt]>) -> MatrixJson {
        MatrixJson {
            d: self.dset.to_json(),
            k: self.k,
            entries: self
                .entries
                .iter()
                .flat_map(|row| row.iter().map(|v| v.to_string()))
                .collect(),
            x: self.base_point.iter().map(|v| v.to_string()).collect(),
            b: b.map(|bv| bv.iter().map(|v| v.to_string()).collect()),
        }
    }
}

/// Serialized matrix artifact: index order, k, row-major entries, base point
/// and optional translation part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: IndexSetJson,
    pub k: u64,
    pub entries: Vec<String>,
    pub x: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
}

/// Result bundle of applying T_k at a point.
#[derive(Debug, Clone)]
pub struct TkOutput {
    pub image: Vec<ExactScalar>,
    pub b: Vec<BigInt>,
    pub matrix: TimesKMatrix,
}

impl TkOutput {
    /// The augmented matrix A-bar_k(x) with leading row (1, 0, ..., 0) and
    /// translation column -b_k(x), as exact rationals.
    pub fn augmented(&self) -> Vec<Vec<BigRational>> {
        let n = self.matrix.dim();
        let mut out = vec![vec![BigRational::zero(); n + 1]; n + 1];
        out[0][0] = BigRational::one();
        for i in 0..n {
            out[i + 1][0] = BigRational::from_integer(-self.b[i].clone());
            for j in 0..n {
                out[i + 1][j + 1] = BigRational::from_integer(self.matrix.entries[i][j].clone());
            }
        }
        out
    }
}

fn frac_cache(
    x: &[ExactScalar],
    max_bits: u32,
) -> impl FnMut(usize) -> Result<ExactScalar> + '_ {
    let mut cache: Vec<Option<ExactScalar>> = vec![None; x.len()];
    move |i: usize| {
        if cache[i].is_none() {
            cache[i] = Some(x[i].frac(max_bits)?);
        }
        Ok(cache[i].clone().unwrap())
    }
}

fn check_point_len(dset: &IndexSet, x: &[ExactScalar]) -> Result<()> {
    if x.len() != dset.len() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, index set has {}",
            x.len(),
            dset.len()
        )));
    }
    Ok(())
}

/// Build A_k(x) row by row.
pub fn build_a(
    dset: &IndexSet,
    k: u64,
    x: &[ExactScalar],
    max_bits: u32,
) -> Result<TimesKMatrix> {
    check_point_len(dset, x)?;
    let n = dset.len();
    let mut fr = frac_cache(x, max_bits);
    let kb = BigInt::from(k);
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for (pos, mu) in dset.members().iter().enumerate() {
        if mu.is_leaf() {
            rows[pos][pos] = kb.pow(dset.degree_at(pos));
            continue;
        }
        let (kappa, lambda) = mu.peel().expect("compound index");
        let kpos = dset
            .position(&kappa)
            .ok_or_else(|| Error::NotDownwardClosed(kappa.to_string()))?;
        let lpos = dset
            .position(&lambda)
            .ok_or_else(|| Error::NotDownwardClosed(lambda.to_string()))?;
        let c = correction_from_row(dset, &rows[lpos], &mut fr, max_bits)?;
        let row = compound_row(dset, &rows[kpos], &rows[lpos], &kappa, &lambda, &c)?;
        rows[pos] = row;
    }
    Ok(TimesKMatrix {
        dset: dset.clone(),
        k,
        entries: rows,
        base_point: x.to_vec(),
    })
}

fn correction_from_row(
    dset: &IndexSet,
    row: &[BigInt],
    fr: &mut impl FnMut(usize) -> Result<ExactScalar>,
    max_bits: u32,
) -> Result<BigInt> {
    let mut acc = ExactScalar::zero();
    for (tau, a) in row.iter().enumerate() {
        if !a.is_zero() {
            acc = acc.add(&ExactScalar::from_bigint(a.clone()).mul(&fr(tau)?));
        }
    }
    let _ = dset;
    Ok(-acc.floor(max_bits)?)
}

fn compound_row(
    dset: &IndexSet,
    row_kappa: &[BigInt],
    row_lambda: &[BigInt],
    kappa: &BracketIndex,
    lambda: &BracketIndex,
    c: &BigInt,
) -> Result<Vec<BigInt>> {
    let _ = (kappa, lambda);
    let n = dset.len();
    let members = dset.members();
    let mut row = vec![BigInt::zero(); n];
    for (sigma, a) in row_kappa.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (tau, b) in row_lambda.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let nu = members[sigma].with_factor(members[tau].clone());
            let npos = dset
                .position(&nu)
                .ok_or_else(|| Error::NotDownwardClosed(nu.to_string()))?;
            row[npos] += a * b;
        }
        if !c.is_zero() {
            row[sigma] += a * c;
        }
    }
    Ok(row)
}

/// The correction term c_{k,lambda}(x) read off a built matrix.
pub fn correction_term(
    dset: &IndexSet,
    k: u64,
    lambda: &BracketIndex,
    x: &[ExactScalar],
    max_bits: u32,
) -> Result<BigInt> {
    let a = build_a(dset, k, x, max_bits)?;
    let lpos = dset
        .position(lambda)
        .ok_or_else(|| Error::InvalidInput(format!("{lambda} not in the index set")))?;
    let mut fr = frac_cache(x, max_bits);
    correction_from_row(dset, &a.entries[lpos], &mut fr, max_bits)
}

/// S_k(x) = A_k(x) x.
pub fn s_k(dset: &IndexSet, k: u64, x: &[ExactScalar], max_bits: u32) -> Result<Vec<ExactScalar>> {
    Ok(build_a(dset, k, x, max_bits)?.mat_vec(x))
}

fn in_unit_box(x: &[ExactScalar], max_bits: u32) -> Result<bool> {
    for v in x {
        if v.sign(max_bits)? == Ordering::Less {
            return Ok(false);
        }
        if v.compare(&ExactScalar::one(), max_bits)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

/// T_k(x) = {S_k(x)} together with b_k(x) and A_k(x). Defined only on
/// [0,1)^D; out-of-range input is an error, not a silent wrap.
pub fn t_k(dset: &IndexSet, k: u64, x: &[ExactScalar], max_bits: u32) -> Result<TkOutput> {
    check_point_len(dset, x)?;
    if !in_unit_box(x, max_bits)? {
        return Err(Error::InvalidInput(
            "T_k requires a point in [0,1)^D".into(),
        ));
    }
    let matrix = build_a(dset, k, x, max_bits)?;
    let s = matrix.mat_vec(x);
    let mut image = Vec::with_capacity(s.len());
    let mut b = Vec::with_capacity(s.len());
    for v in &s {
        let f = v.floor(max_bits)?;
        image.push(v.sub(&ExactScalar::from_bigint(f.clone())));
        b.push(f);
    }
    Ok(TkOutput { image, b, matrix })
}

/// Reconstruct A_k(x) from the pair (x, y = T_k(x)) by polynomial formulas,
/// with no floor decisions. Correction terms come out as
/// c_{k,lambda} = y_lambda - (A_k(x) x)_lambda and must be integers.
pub fn a_from_pair(
    dset: &IndexSet,
    k: u64,
    x: &[ExactScalar],
    y: &[ExactScalar],
) -> Result<TimesKMatrix> {
    check_point_len(dset, x)?;
    check_point_len(dset, y)?;
    let n = dset.len();
    let kb = BigInt::from(k);
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for (pos, mu) in dset.members().iter().enumerate() {
        if mu.is_leaf() {
            rows[pos][pos] = kb.pow(dset.degree_at(pos));
            continue;
        }
        let (kappa, lambda) = mu.peel().expect("compound index");
        let kpos = dset
            .position(&kappa)
            .ok_or_else(|| Error::NotDownwardClosed(kappa.to_string()))?;
        let lpos = dset
            .position(&lambda)
            .ok_or_else(|| Error::NotDownwardClosed(lambda.to_string()))?;
        let mut s_lambda = ExactScalar::zero();
        for (tau, a) in rows[lpos].iter().enumerate() {
            if !a.is_zero() {
                s_lambda = s_lambda.add(&ExactScalar::from_bigint(a.clone()).mul(&x[tau]));
            }
        }
        let c_scalar = y[lpos].sub(&s_lambda);
        let c = match c_scalar.as_rational() {
            Some(q) if q.is_integer() => q.to_integer(),
            _ => return Err(Error::InconsistentPair),
        };
        rows[pos] = compound_row(dset, &rows[kpos], &rows[lpos], &kappa, &lambda, &c)?;
    }
    Ok(TimesKMatrix {
        dset: dset.clone(),
        k,
        entries: rows,
        base_point: x.to_vec(),
    })
}

/// Orbit x^0, T_k(x^0), ..., T_k^N(x^0). A floor failure reports the step.
pub fn iterate_t(
    dset: &IndexSet,
    k: u64,
    x0: &[ExactScalar],
    n: usize,
    max_bits: u32,
) -> Result<Vec<Vec<ExactScalar>>> {
    let mut orbit = Vec::with_capacity(n + 1);
    orbit.push(x0.to_vec());
    for step in 0..n {
        let cur = orbit.last().unwrap();
        let out = t_k(dset, k, cur, max_bits)
            .map_err(|e| e.with_path(format!("orbit step {}", step + 1)))?;
        orbit.push(out.image);
    }
    Ok(orbit)
}

/// Entry A_k(x)_{mu,nu} as a generalised polynomial in the coordinates of x
/// (arity |D|). Realizes the entries-are-generalised-polynomials fact as an
/// executable extractor.
pub fn entry_genpoly(dset: &IndexSet, k: u64, mu: &BracketIndex, nu: &BracketIndex) -> Result<GenPoly> {
    let n = dset.len();
    let kb = BigInt::from(k);
    let mut rows: Vec<Vec<GenPoly>> = vec![vec![GenPoly::int(0); n]; n];
    for (pos, m) in dset.members().iter().enumerate() {
        if m.is_leaf() {
            rows[pos][pos] = GenPoly::constant(ExactScalar::from_bigint(
                kb.pow(dset.degree_at(pos)),
            ));
            continue;
        }
        let (kappa, lambda) = m.peel().expect("compound index");
        let kpos = dset.position(&kappa).ok_or_else(|| {
            Error::NotDownwardClosed(kappa.to_string())
        })?;
        let lpos = dset.position(&lambda).ok_or_else(|| {
            Error::NotDownwardClosed(lambda.to_string())
        })?;
        let mut inner = Vec::new();
        for (tau, a) in rows[lpos].iter().enumerate() {
            if !a.is_const_zero() {
                inner.push(a.clone().mul2(GenPoly::frac_of(GenPoly::var(tau))));
            }
        }
        let c = GenPoly::floor_of(GenPoly::sum(inner)).negate();
        let members = dset.members();
        let mut row = vec![GenPoly::int(0); n];
        for (sigma, a) in rows[kpos].clone().iter().enumerate() {
            if a.is_const_zero() {
                continue;
            }
            for (tau, b) in rows[lpos].clone().iter().enumerate() {
                if b.is_const_zero() {
                    continue;
                }
                let nu_idx = members[sigma].with_factor(members[tau].clone());
                let npos = dset
                    .position(&nu_idx)
                    .ok_or_else(|| Error::NotDownwardClosed(nu_idx.to_string()))?;
                let term = a.clone().mul2(b.clone());
                row[npos] = std::mem::replace(&mut row[npos], GenPoly::int(0)).add2(term);
            }
            row[sigma] = std::mem::replace(&mut row[sigma], GenPoly::int(0))
                .add2(a.clone().mul2(c.clone()));
        }
        rows[pos] = row;
    }
    let mi = dset
        .position(mu)
        .ok_or_else(|| Error::InvalidInput(format!("{mu} not in the index set")))?;
    let ni = dset
        .position(nu)
        .ok_or_else(|| Error::InvalidInput(format!("{nu} not in the index set")))?;
    Ok(rows[mi][ni].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::{alpha_map, v_vector, Grading, IndexSet};
    use crate::scalar::DEFAULT_MAX_BITS;

    const BITS: u32 = DEFAULT_MAX_BITS;

    fn idx(s: &str) -> BracketIndex {
        BracketIndex::parse(s).unwrap()
    }

    fn running_alpha(d: &IndexSet) -> std::collections::BTreeMap<u32, ExactScalar> {
        alpha_map(
            d,
            &[
                ExactScalar::ratio(1, 3),
                ExactScalar::ratio(1, 5),
                ExactScalar::ratio(1, 7),
            ],
        )
        .unwrap()
    }

    #[test]
    fn toy_matrix_entries() {
        // Row 1[2] of A_k(x): entry at column 1 is -k*floor(k*{x_2}),
        // entry at column 1[2] is k^2.
        let d = IndexSet::running_example();
        let k = 2u64;
        let x = vec![
            ExactScalar::ratio(1, 3),
            ExactScalar::ratio(3, 5),
            ExactScalar::ratio(1, 7),
            ExactScalar::ratio(2, 7),
            ExactScalar::ratio(4, 9),
        ];
        let a = build_a(&d, k, &x, BITS).unwrap();
        let mu = d.position(&idx("1[2]")).unwrap();
        let col1 = d.position(&idx("1")).unwrap();
        // -k*floor(k*3/5) = -2*floor(6/5) = -2
        assert_eq!(a.entries[mu][col1], BigInt::from(-2));
        assert_eq!(a.entries[mu][mu], BigInt::from(4));
        // correction term c_{k,2} = -floor(2*(3/5)) = -1
        let c = correction_term(&d, k, &idx("2"), &x, BITS).unwrap();
        assert_eq!(c, BigInt::from(-1));
    }

    #[test]
    fn correction_vanishes_on_integral_points() {
        let d = IndexSet::running_example();
        let x = vec![ExactScalar::zero(); 5];
        for lam in ["1", "2"] {
            let c = correction_term(&d, 3, &idx(lam), &x, BITS).unwrap();
            assert_eq!(c, BigInt::zero());
        }
    }

    #[test]
    fn k_equals_one_gives_identity() {
        let d = IndexSet::running_example();
        let x = vec![
            ExactScalar::ratio(1, 3),
            ExactScalar::ratio(3, 5),
            ExactScalar::ratio(1, 7),
            ExactScalar::ratio(2, 7),
            ExactScalar::ratio(4, 9),
        ];
        let a = build_a(&d, 1, &x, BITS).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { BigInt::one() } else { BigInt::zero() };
                assert_eq!(a.entries[i][j], expect);
            }
        }
        let out = t_k(&d, 1, &x, BITS).unwrap();
        assert_eq!(out.image, x);
        assert!(out.b.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn row_for_v_alpha_at_one() {
        // k=2, x = v^alpha(1), alpha = (1/3,1/5,1/7): row 1[2] is
        // (-2*floor(2/5), 0, 4, 0, 0) = all zeros except diagonal 4.
        let d = IndexSet::running_example();
        let alpha = running_alpha(&d);
        let x = v_vector(&d, &alpha, &ExactScalar::one(), BITS).unwrap();
        let a = build_a(&d, 2, &x, BITS).unwrap();
        let mu = d.position(&idx("1[2]")).unwrap();
        let expect = [0i64, 0, 4, 0, 0];
        for (j, e) in expect.iter().enumerate() {
            assert_eq!(a.entries[mu][j], BigInt::from(*e));
        }
    }

    #[test]
    fn intertwining_on_running_example() {
        // S_k(v^alpha(m)) = v^alpha(km)
        let d = IndexSet::running_example();
        let alpha = running_alpha(&d);
        for k in 1..=6u64 {
            for m in 1..=6i64 {
                let x = v_vector(&d, &alpha, &ExactScalar::from_int(m), BITS).unwrap();
                let s = s_k(&d, k, &x, BITS).unwrap();
                let expect =
                    v_vector(&d, &alpha, &ExactScalar::from_int(k as i64 * m), BITS).unwrap();
                assert_eq!(s, expect, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn leaf_rows_scale_exactly() {
        let d = IndexSet::running_example();
        let x = vec![
            ExactScalar::ratio(1, 3),
            ExactScalar::ratio(3, 5),
            ExactScalar::ratio(1, 7),
            ExactScalar::ratio(2, 7),
            ExactScalar::ratio(4, 9),
        ];
        let s = s_k(&d, 5, &x, BITS).unwrap();
        // leaves 1, 2 have degree 1; leaf 3 degree 2
        assert_eq!(s[0], ExactScalar::ratio(5, 3));
        assert_eq!(s[1], ExactScalar::from_int(3));
        let p3 = d.position(&idx("3")).unwrap();
        assert_eq!(s[p3], x[p3].mul(&ExactScalar::from_int(25)));
    }

    #[test]
    fn structure_invariants_hold() {
        let d = IndexSet::running_example();
        let x = vec![
            ExactScalar::ratio(7, 13),
            ExactScalar::ratio(3, 11),
            ExactScalar::ratio(1, 2),
            ExactScalar::ratio(9, 10),
            ExactScalar::ratio(4, 9),
        ];
        for k in 1..=7 {
            let a = build_a(&d, k, &x, BITS).unwrap();
            assert!(a.is_lower_triangular());
            assert!(a.has_standard_diagonal());
            assert!(a.has_column_divisibility());
        }
    }

    #[test]
    fn t_k_rejects_out_of_range() {
        let d = IndexSet::running_example();
        let mut x = vec![ExactScalar::zero(); 5];
        x[0] = ExactScalar::from_int(1);
        assert!(matches!(
            t_k(&d, 2, &x, BITS),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn a_from_pair_matches_build() {
        let d = IndexSet::running_example();
        let xs = [
            vec![
                ExactScalar::ratio(1, 3),
                ExactScalar::ratio(3, 5),
                ExactScalar::ratio(1, 7),
                ExactScalar::ratio(2, 7),
                ExactScalar::ratio(4, 9),
            ],
            vec![
                ExactScalar::ratio(12, 13),
                ExactScalar::ratio(5, 11),
                ExactScalar::ratio(3, 4),
                ExactScalar::ratio(1, 10),
                ExactScalar::ratio(8, 9),
            ],
        ];
        for x in xs {
            for k in [1u64, 2, 3, 5] {
                let out = t_k(&d, k, &x, BITS).unwrap();
                let rec = a_from_pair(&d, k, &x, &out.image).unwrap();
                assert_eq!(rec.entries, out.matrix.entries);
            }
        }
    }

    #[test]
    fn a_from_pair_identity_at_k1() {
        let d = IndexSet::running_example();
        let x = vec![
            ExactScalar::ratio(1, 3),
            ExactScalar::ratio(3, 5),
            ExactScalar::ratio(1, 7),
            ExactScalar::ratio(2, 7),
            ExactScalar::ratio(4, 9),
        ];
        let rec = a_from_pair(&d, 1, &x, &x).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { BigInt::one() } else { BigInt::zero() };
                assert_eq!(rec.entries[i][j], expect);
            }
        }
    }

    #[test]
    fn orbit_path_independence() {
        // T_k iterated from {v^alpha(m)} equals {v^alpha(m k^n)} directly.
        let d = IndexSet::running_example();
        let alpha = running_alpha(&d);
        let k = 2u64;
        let m = 3i64;
        let x0: Vec<ExactScalar> = v_vector(&d, &alpha, &ExactScalar::from_int(m), BITS)
            .unwrap()
            .iter()
            .map(|v| v.frac(BITS).unwrap())
            .collect();
        let orbit = iterate_t(&d, k, &x0, 6, BITS).unwrap();
        for (n, point) in orbit.iter().enumerate() {
            let t = m * (k as i64).pow(n as u32);
            let direct: Vec<ExactScalar> =
                v_vector(&d, &alpha, &ExactScalar::from_int(t), BITS)
                    .unwrap()
                    .iter()
                    .map(|v| v.frac(BITS).unwrap())
                    .collect();
            assert_eq!(point, &direct, "n={n}");
        }
    }

    #[test]
    fn orbit_from_zero_stays_zero() {
        let d = IndexSet::running_example();
        let x0 = vec![ExactScalar::zero(); 5];
        let orbit = iterate_t(&d, 3, &x0, 5, BITS).unwrap();
        assert!(orbit.iter().all(|p| p.iter().all(|c| c.is_zero())));
    }

    #[test]
    fn rational_orbit_is_eventually_periodic() {
        // x0 = a/b with gcd(b, k) = 1: detect an exact repeat.
        let d = IndexSet::new(
            vec![BracketIndex::leaf(1)],
            Grading::new(&[(1, 1)]).unwrap(),
        )
        .unwrap();
        let x0 = vec![ExactScalar::ratio(1, 7)];
        let orbit = iterate_t(&d, 2, &x0, 7, BITS).unwrap();
        // period 3: 1/7 -> 2/7 -> 4/7 -> 1/7
        assert_eq!(orbit[0], orbit[3]);
        assert_eq!(orbit[1], orbit[4]);
    }

    #[test]
    fn sqrt2_orbit_matches_direct_fracs() {
        let d = IndexSet::new(
            vec![BracketIndex::leaf(1)],
            Grading::new(&[(1, 1)]).unwrap(),
        )
        .unwrap();
        let s2 = ExactScalar::sqrt_int(2).unwrap();
        let x0 = vec![s2.frac(BITS).unwrap()];
        let orbit = iterate_t(&d, 2, &x0, 10, BITS).unwrap();
        for (n, p) in orbit.iter().enumerate() {
            let direct = s2
                .mul(&ExactScalar::from_int(1i64 << n))
                .frac(BITS)
                .unwrap();
            assert_eq!(p[0], direct, "n={n}");
        }
    }

    #[test]
    fn cocycle_identity_small() {
        let d = IndexSet::running_example();
        let x = vec![
            ExactScalar::ratio(5, 7),
            ExactScalar::ratio(2, 9),
            ExactScalar::ratio(1, 4),
            ExactScalar::ratio(3, 8),
            ExactScalar::ratio(6, 11),
        ];
        for (k, l) in [(2u64, 3u64), (3, 2), (4, 5), (2, 2)] {
            let al = build_a(&d, l, &x, BITS).unwrap();
            let sl = al.mat_vec(&x);
            let ak = build_a(&d, k, &sl, BITS).unwrap();
            let prod = ak.mat_mul(&al);
            let akl = build_a(&d, k * l, &x, BITS).unwrap();
            assert_eq!(prod, akl.entries, "k={k} l={l}");
        }
    }

    #[test]
    fn entry_extractor_matches_numeric_builder() {
        let d = IndexSet::running_example();
        let points = [
            vec![
                ExactScalar::ratio(1, 3),
                ExactScalar::ratio(3, 5),
                ExactScalar::ratio(1, 7),
                ExactScalar::ratio(2, 7),
                ExactScalar::ratio(4, 9),
            ],
            vec![
                ExactScalar::ratio(9, 13),
                ExactScalar::ratio(1, 11),
                ExactScalar::ratio(5, 6),
                ExactScalar::ratio(7, 10),
                ExactScalar::ratio(2, 3),
            ],
        ];
        for k in [2u64, 3] {
            for x in &points {
                let a = build_a(&d, k, x, BITS).unwrap();
                for (i, mu) in d.members().iter().enumerate() {
                    for (j, nu) in d.members().iter().enumerate() {
                        let g = entry_genpoly(&d, k, mu, nu).unwrap();
                        let v = g.eval(x, BITS).unwrap();
                        assert_eq!(
                            v,
                            ExactScalar::from_bigint(a.entries[i][j].clone()),
                            "entry ({mu},{nu}) k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn toy_symbolic_entry_matches_closed_form() {
        // A_k(x)_{1[2],1} = -k*floor(k*{x_2}) for the running index set.
        let d = IndexSet::running_example();
        for k in [2u64, 3, 5] {
            let g = entry_genpoly(&d, k, &idx("1[2]"), &idx("1")).unwrap();
            let closed = crate::genpoly::parse(&format!(
                "0 - {k}*floor({k}*frac(x_2))"
            ))
            .unwrap();
            for den in [7i64, 11, 13] {
                for num in 0..den {
                    let mut x = vec![ExactScalar::zero(); 5];
                    x[1] = ExactScalar::ratio(num, den);
                    assert_eq!(
                        g.eval(&x, BITS).unwrap(),
                        closed.eval(&x, BITS).unwrap()
                    );
                }
            }
        }
    }
}
