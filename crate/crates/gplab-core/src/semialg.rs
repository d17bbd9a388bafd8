//! Degree-bounded vanishing ideals (empirical Zariski closures), affine
//! stabiliser checks, semialgebraic sets with the sum-of-degrees complexity
//! measure, unimodular changes of basis, and the limit sandwich.
//!
//! All linear algebra is exact over Q. Points may have algebraic (radical)
//! coordinates: each evaluation row is split into its Q-linear components
//! over the radical monomials that occur, so a rational-coefficient
//! polynomial vanishes at the point iff every component row annihilates it.

use crate::error::{Error, Result};
use crate::mpoly::{grlex, Exponents, MPoly};
use crate::scalar::{ExactScalar, RadicalMonomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Monomial exponent vectors of total degree <= bound, grlex-descending.
pub fn monomials_up_to(dim: usize, bound: u32) -> Vec<Exponents> {
    fn rec(dim: usize, bound: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        let used: u32 = cur.iter().sum();
        for e in 0..=(bound - used) {
            cur.push(e);
            rec(dim, bound, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| grlex(b, a));
    out
}

/// Reduced row echelon form in place; returns pivot column indices.
pub fn rref(rows: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = rows[r][c].clone().recip();
        for v in &mut rows[r] {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = &rows[r][j] * &f;
                    rows[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|v| !v.is_zero()));
    pivots
}

pub fn matrix_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    rref(&mut rows).len()
}

/// Basis of the degree-bounded vanishing ideal of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealBasis {
    pub dim: usize,
    pub degree_bound: u32,
    /// Canonical reduced echelon basis over the grlex-descending monomials;
    /// leading coefficients are 1.
    pub basis: Vec<MPoly>,
    pub points: Vec<Vec<ExactScalar>>,
}

fn point_rows(point: &[ExactScalar], monomials: &[Exponents]) -> Result<Vec<Vec<BigRational>>> {
    // Evaluate each monomial; decompose over the radical monomials occurring.
    let vals: Vec<_> = monomials
        .iter()
        .map(|e| {
            let mut acc = ExactScalar::one();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    acc = acc.mul(&point[i].pow_i(k as i64).expect("nonnegative power"));
                }
            }
            acc.as_radical_sum().ok_or_else(|| {
                Error::InvalidInput(
                    "point coordinates must be radical sums (no surviving quotients)".into(),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bases: Vec<RadicalMonomial> = Vec::new();
    for v in &vals {
        for m in v.monomials() {
            if !bases.contains(&m) {
                bases.push(m);
            }
        }
    }
    if bases.is_empty() {
        bases.push(RadicalMonomial::one());
    }
    Ok(bases
        .iter()
        .map(|b| vals.iter().map(|v| v.coeff_of(b)).collect())
        .collect())
}

/// All rational-coefficient polynomials of degree <= `degree_bound`
/// vanishing on `points`, as a canonical reduced basis.
pub fn vanishing_ideal(
    points: &[Vec<ExactScalar>],
    dim: usize,
    degree_bound: u32,
) -> Result<IdealBasis> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, ambient dimension is {dim}",
                p.len()
            )));
        }
    }
    let monomials = monomials_up_to(dim, degree_bound);
    let mut eval_rows = Vec::new();
    for p in points {
        eval_rows.extend(point_rows(p, &monomials)?);
    }
    let ncols = monomials.len();
    let pivots = rref(&mut eval_rows);
    // Null space basis: one vector per free column.
    let is_pivot = |c: usize| pivots.contains(&c);
    let mut null_rows: Vec<Vec<BigRational>> = Vec::new();
    for free in (0..ncols).filter(|c| !is_pivot(*c)) {
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -eval_rows[r][free].clone();
        }
        null_rows.push(v);
    }
    rref(&mut null_rows);
    let basis = null_rows
        .into_iter()
        .map(|row| {
            let mut p = MPoly::zero(dim);
            for (c, coeff) in row.into_iter().enumerate() {
                if !coeff.is_zero() {
                    p.terms.insert(monomials[c].clone(), coeff);
                }
            }
            p
        })
        .collect();
    Ok(IdealBasis {
        dim,
        degree_bound,
        basis,
        points: points.to_vec(),
    })
}

impl IdealBasis {
    /// Reduce f against the canonical basis; zero remainder means f lies in
    /// the span. Requires deg f <= degree_bound.
    pub fn reduce(&self, f: &MPoly) -> MPoly {
        let mut rem = f.clone();
        for b in &self.basis {
            let lead = b.leading_exponents().expect("basis polynomials nonzero");
            let c = rem.coeff(lead);
            if !c.is_zero() {
                rem = rem.sub(&b.scale(&c));
            }
        }
        rem
    }

    pub fn contains_in_span(&self, f: &MPoly) -> bool {
        f.degree() <= self.degree_bound && self.reduce(f).is_zero()
    }

    /// Subspace comparison against another basis over the same monomials.
    pub fn same_span(&self, other: &IdealBasis) -> bool {
        self.dim == other.dim
            && self.degree_bound == other.degree_bound
            && self.basis == other.basis
    }

    /// Every basis polynomial of self lies in the span of `other`.
    pub fn subspace_of(&self, other: &IdealBasis) -> bool {
        self.basis.iter().all(|f| other.contains_in_span(f))
    }

    pub fn vanishes_at(&self, x: &[ExactScalar]) -> bool {
        self.basis
            .iter()
            .all(|f| f.eval_scalar(x).is_zero())
    }
}

/// Report of the finite-tail stabilization scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    pub tail_starts: Vec<usize>,
    pub basis_sizes: Vec<usize>,
    pub stabilized: bool,
    /// Index into tail_starts where the basis first equals the final one.
    pub stable_from: Option<usize>,
}

/// Vanishing ideal of each tail {x_n : n >= N0}; the bases grow with the
/// tail start and the report says whether they stabilize.
pub fn tail_closure(
    sequence: &[Vec<ExactScalar>],
    tail_starts: &[usize],
    dim: usize,
    degree_bound: u32,
) -> Result<(IdealBasis, TailReport)> {
    if tail_starts.is_empty() {
        return Err(Error::InvalidInput("need at least one tail start".into()));
    }
    let mut bases = Vec::new();
    for &n0 in tail_starts {
        if n0 >= sequence.len() {
            return Err(Error::EmptyTail(n0));
        }
        bases.push(vanishing_ideal(&sequence[n0..], dim, degree_bound)?);
    }
    let last = bases.last().unwrap().clone();
    let stable_from = bases.iter().position(|b| b.same_span(&last));
    let stabilized = match stable_from {
        Some(i) => bases[i..].iter().all(|b| b.same_span(&last)),
        None => false,
    };
    let report = TailReport {
        tail_starts: tail_starts.to_vec(),
        basis_sizes: bases.iter().map(|b| b.basis.len()).collect(),
        stabilized,
        stable_from,
    };
    Ok((last, report))
}

/// Is the zero set invariant under translation by v? Exact: translation
/// preserves degree, so it is a span test in the degree slice.
pub fn translation_check(basis: &IdealBasis, v: &[BigRational]) -> bool {
    basis
        .basis
        .iter()
        .all(|f| basis.contains_in_span(&f.translate(v)))
}

/// Rational affine map x -> M x + c.
#[derive(Debug, Clone)]
pub struct AffineMapQ {
    pub matrix: Vec<Vec<BigRational>>,
    pub offset: Vec<BigRational>,
}

impl AffineMapQ {
    pub fn apply(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, c)| {
                row.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (a, xv)| acc + a * xv)
            })
            .collect()
    }

    /// Substitution polynomials for composing f(T(x)).
    pub fn substitutions(&self, dim: usize) -> Vec<MPoly> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, c)| {
                let mut p = MPoly::constant(dim, c.clone());
                for (j, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        p = p.add(&MPoly::var(dim, j).scale(a));
                    }
                }
                p
            })
            .collect()
    }
}

/// Does T map the zero set of `b_v` into the zero set of `b_u`? Checked by
/// composing each basis polynomial of b_u with T, verifying vanishing on
/// b_v's generating points (the first `sample_count`, or all when 0), plus a
/// span reduction whenever the composed degree stays within b_v's slice.
pub fn affine_image_check(
    b_v: &IdealBasis,
    b_u: &IdealBasis,
    t: &AffineMapQ,
    sample_count: usize,
    degree_cap: Option<u32>,
) -> Result<bool> {
    let subs = t.substitutions(b_v.dim);
    let limit = if sample_count == 0 {
        b_v.points.len()
    } else {
        sample_count.min(b_v.points.len())
    };
    for f in &b_u.basis {
        let g = f.compose(&subs);
        if let Some(cap) = degree_cap {
            if g.degree() > cap {
                return Err(Error::DegreeOverflow {
                    got: g.degree() as usize,
                    cap: cap as usize,
                });
            }
        }
        for p in &b_v.points[..limit] {
            if !g.eval_scalar(p).is_zero() {
                return Ok(false);
            }
        }
        if g.degree() <= b_v.degree_bound && !b_v.contains_in_span(&g) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Basic semialgebraic piece: equalities F and strict inequalities G.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicSet {
    pub equalities: Vec<MPoly>,
    pub inequalities: Vec<MPoly>,
}

/// Finite union of basic pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SemialgebraicSet {
    pub dim: usize,
    pub pieces: Vec<BasicSet>,
}

impl SemialgebraicSet {
    pub fn empty(dim: usize) -> Self {
        SemialgebraicSet {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        SemialgebraicSet {
            dim,
            pieces: vec![BasicSet {
                equalities: Vec::new(),
                inequalities: Vec::new(),
            }],
        }
    }

    pub fn basic(dim: usize, equalities: Vec<MPoly>, inequalities: Vec<MPoly>) -> Self {
        SemialgebraicSet {
            dim,
            pieces: vec![BasicSet {
                equalities,
                inequalities,
            }],
        }
    }

    /// Exact membership; strict inequalities decided by sign refinement.
    pub fn contains(&self, x: &[ExactScalar], max_bits: u32) -> Result<bool> {
        for piece in &self.pieces {
            let mut ok = true;
            for f in &piece.equalities {
                if !f.eval_scalar(x).is_zero() {
                    ok = false;
                    break;
                }
            }
            if ok {
                for g in &piece.inequalities {
                    if g.eval_scalar(x).sign(max_bits)? != Ordering::Greater {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Sum of degrees of all polynomials in this representation; an upper
    /// bound for the minimum over representations.
    pub fn complexity(&self) -> u32 {
        self.pieces
            .iter()
            .map(|p| {
                p.equalities
                    .iter()
                    .chain(&p.inequalities)
                    .map(|f| f.degree())
                    .sum::<u32>()
            })
            .sum()
    }
}

fn det(matrix: &[Vec<BigInt>]) -> BigRational {
    let n = matrix.len();
    let mut m: Vec<Vec<BigRational>> = matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(sel) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if sel != c {
            m.swap(c, sel);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].clone().recip();
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone() * &inv;
                for j in c..n {
                    let sub = m[c][j].clone() * &f;
                    m[i][j] -= sub;
                }
            }
        }
    }
    d
}

/// Membership of {T(x)} in S', for unimodular integer T and x in [0,1)^d.
/// Realizes the piecewise-linear change of coordinates as a membership
/// transformer; no set image is computed.
pub fn change_basis_membership(
    s_prime: &SemialgebraicSet,
    t: &[Vec<BigInt>],
    x: &[ExactScalar],
    max_bits: u32,
) -> Result<bool> {
    let n = s_prime.dim;
    if t.len() != n || t.iter().any(|row| row.len() != n) || x.len() != n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let d = det(t);
    if !(d == BigRational::one() || d == -BigRational::one()) {
        return Err(Error::InvalidInput(
            "change of basis requires det = +-1".into(),
        ));
    }
    let mut y = Vec::with_capacity(n);
    for row in t {
        let mut acc = ExactScalar::zero();
        for (a, xv) in row.iter().zip(x) {
            if !a.is_zero() {
                acc = acc.add(&ExactScalar::from_bigint(a.clone()).mul(xv));
            }
        }
        y.push(acc.frac(max_bits)?);
    }
    s_prime.contains(&y, max_bits)
}

/// One inequality-polynomial sequence with its stated limit direction.
#[derive(Debug, Clone)]
pub struct PolySequence {
    /// Finite prefix g^(1), g^(2), ... of the sequence.
    pub terms: Vec<MPoly>,
    /// Claimed limit of the sup-norm-normalized coefficient vectors.
    pub limit: MPoly,
}

fn normalize(p: &MPoly) -> Result<MPoly> {
    let n = p.sup_norm();
    if n.is_zero() {
        return Err(Error::NonConvergentCoefficients);
    }
    Ok(p.scale(&n.recip()))
}

/// Limit sandwich for V = R^d: R = S(0, {limits}) and U = V(prod limits),
/// so that R is contained in the limit set which is contained in R union U.
/// Convergence of the normalized coefficient sequences to the stated limits
/// is verified on the supplied prefixes.
pub fn limit_sandwich(
    sequences: &[PolySequence],
    dim: usize,
    tol: &BigRational,
) -> Result<(SemialgebraicSet, SemialgebraicSet)> {
    if sequences.is_empty() {
        return Err(Error::InvalidInput("need at least one sequence".into()));
    }
    let mut limits = Vec::new();
    for seq in sequences {
        if seq.terms.is_empty() {
            return Err(Error::NonConvergentCoefficients);
        }
        let lim = normalize(&seq.limit)?;
        // the trailing third of the prefix must already sit within tol
        let start = seq.terms.len() - seq.terms.len().div_ceil(3);
        for g in &seq.terms[start..] {
            let gn = normalize(g)?;
            if gn.sup_distance(&lim) > *tol {
                return Err(Error::NonConvergentCoefficients);
            }
        }
        limits.push(lim);
    }
    let r = SemialgebraicSet::basic(dim, Vec::new(), limits.clone());
    let product = limits
        .iter()
        .fold(MPoly::one(dim), |acc, g| acc.mul(g));
    let u = SemialgebraicSet::basic(dim, vec![product], Vec::new());
    Ok((r, u))
}

/// Grid verification of the sandwich: every grid point eventually in all
/// S_n lies in R union U, and every grid point of R is eventually in S_n.
/// "Eventually" is sampled on the trailing half of `n_probe`.
pub fn sandwich_holds_on_grid(
    seq_at: impl Fn(u64) -> Vec<MPoly>,
    r: &SemialgebraicSet,
    u: &SemialgebraicSet,
    grid: &[Vec<BigRational>],
    n_probe: &[u64],
    max_bits: u32,
) -> Result<bool> {
    let tail = &n_probe[n_probe.len() / 2..];
    for q in grid {
        let x: Vec<ExactScalar> = q
            .iter()
            .map(|c| ExactScalar::from_rational(c.clone()))
            .collect();
        let in_all_tail = tail.iter().all(|&n| {
            seq_at(n)
                .iter()
                .all(|g| g.eval_rational(q).is_positive())
        });
        if in_all_tail {
            let in_r = r.contains(&x, max_bits)?;
            let in_u = u.contains(&x, max_bits)?;
            if !in_r && !in_u {
                return Ok(false);
            }
        }
        if r.contains(&x, max_bits)? && !in_all_tail {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convert a purely polynomial expression (no floor/frac, rational
/// constants) into a sparse polynomial.
pub fn genpoly_to_mpoly(g: &crate::genpoly::GenPoly, dim: usize) -> Result<MPoly> {
    use crate::genpoly::GenPoly as G;
    match g {
        G::Var(i) => {
            if *i >= dim {
                return Err(Error::InvalidInput(format!(
                    "variable x_{} exceeds dimension {dim}",
                    i + 1
                )));
            }
            Ok(MPoly::var(dim, *i))
        }
        G::Const(c) => match c.as_rational() {
            Some(q) => Ok(MPoly::constant(dim, q.clone())),
            None => Err(Error::InvalidInput(
                "set polynomials must have rational coefficients".into(),
            )),
        },
        G::Add(ch) => {
            let mut acc = MPoly::zero(dim);
            for c in ch {
                acc = acc.add(&genpoly_to_mpoly(c, dim)?);
            }
            Ok(acc)
        }
        G::Mul(ch) => {
            let mut acc = MPoly::one(dim);
            for c in ch {
                acc = acc.mul(&genpoly_to_mpoly(c, dim)?);
            }
            Ok(acc)
        }
        G::IntPow(b, e) => Ok(genpoly_to_mpoly(b, dim)?.pow(*e)),
        G::Floor(_) | G::Frac(_) => Err(Error::InvalidInput(
            "set polynomials cannot contain floor or frac".into(),
        )),
    }
}

/// Parse a semialgebraic set description.
///
/// Pieces are separated by `|`, conjuncts inside a piece by `;`. A conjunct
/// is `lhs OP rhs` with OP one of `<`, `>`, `==`, and comparison chains like
/// `0.55 < x_1 < 0.61` expand to two strict inequalities.
pub fn parse_set_spec(text: &str, dim: Option<usize>) -> Result<SemialgebraicSet> {
    use crate::genpoly::parse as gparse;
    struct Conj {
        eqs: Vec<crate::genpoly::GenPoly>,
        gts: Vec<crate::genpoly::GenPoly>, // expressions required > 0
    }
    let mut pieces_raw = Vec::new();
    for piece in text.split('|') {
        let mut conj = Conj {
            eqs: Vec::new(),
            gts: Vec::new(),
        };
        for clause in piece.split(';') {
            let clause = clause.trim();
            if clause.is_empty() {
                continue;
            }
            // split on comparison operators, keeping the operators
            let mut parts: Vec<(String, &str)> = Vec::new();
            let mut rest = clause;
            let mut expr_acc = String::new();
            while !rest.is_empty() {
                if let Some(idx) = rest.find(['<', '>', '=']) {
                    expr_acc.push_str(&rest[..idx]);
                    let op = if rest[idx..].starts_with("==") {
                        rest = &rest[idx + 2..];
                        "=="
                    } else if rest[idx..].starts_with('=') {
                        rest = &rest[idx + 1..];
                        "=="
                    } else if rest[idx..].starts_with('<') {
                        rest = &rest[idx + 1..];
                        "<"
                    } else {
                        rest = &rest[idx + 1..];
                        ">"
                    };
                    parts.push((std::mem::take(&mut expr_acc), op));
                } else {
                    expr_acc.push_str(rest);
                    rest = "";
                }
            }
            if parts.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "clause `{clause}` has no comparison"
                )));
            }
            let exprs: Vec<crate::genpoly::GenPoly> = parts
                .iter()
                .map(|(e, _)| gparse(e))
                .chain(std::iter::once(gparse(&expr_acc)))
                .collect::<Result<_>>()?;
            for (i, (_, op)) in parts.iter().enumerate() {
                let lhs = exprs[i].clone();
                let rhs = exprs[i + 1].clone();
                match *op {
                    "==" => conj.eqs.push(lhs.sub2(rhs)),
                    "<" => conj.gts.push(rhs.sub2(lhs)),
                    ">" => conj.gts.push(lhs.sub2(rhs)),
                    _ => unreachable!(),
                }
            }
        }
        pieces_raw.push(conj);
    }
    let needed = pieces_raw
        .iter()
        .flat_map(|c| c.eqs.iter().chain(&c.gts))
        .map(|g| g.arity())
        .max()
        .unwrap_or(0);
    let dim = dim.unwrap_or(needed).max(needed).max(1);
    let mut pieces = Vec::new();
    for c in pieces_raw {
        pieces.push(BasicSet {
            equalities: c
                .eqs
                .iter()
                .map(|g| genpoly_to_mpoly(g, dim))
                .collect::<Result<_>>()?,
            inequalities: c
                .gts
                .iter()
                .map(|g| genpoly_to_mpoly(g, dim))
                .collect::<Result<_>>()?,
        });
    }
    Ok(SemialgebraicSet { dim, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn set_spec_parses_chains_and_pieces() {
        let s = parse_set_spec("0.55<x_1<0.61", None).unwrap();
        assert_eq!(s.dim, 1);
        assert!(s
            .contains(&[ExactScalar::ratio(58, 100)], 4096)
            .unwrap());
        assert!(!s.contains(&[ExactScalar::ratio(11, 20)], 4096).unwrap());
        let s = parse_set_spec("x_2 - x_1^2 == 0; x_1 > 0 | x_1 < 0 - 1", None).unwrap();
        assert_eq!(s.dim, 2);
        assert_eq!(s.pieces.len(), 2);
        assert!(s
            .contains(&[ExactScalar::ratio(1, 2), ExactScalar::ratio(1, 4)], 4096)
            .unwrap());
        assert!(s
            .contains(&[ExactScalar::from_int(-2), ExactScalar::zero()], 4096)
            .unwrap());
        assert!(!s
            .contains(&[ExactScalar::ratio(1, 2), ExactScalar::ratio(1, 3)], 4096)
            .unwrap());
    }

    fn rp(points: &[(i64, i64)]) -> Vec<Vec<ExactScalar>> {
        points
            .iter()
            .map(|&(a, b)| vec![ExactScalar::from_int(a), ExactScalar::from_int(b)])
            .collect()
    }

    #[test]
    fn collinear_points_give_the_line() {
        let pts = rp(&[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let b = vanishing_ideal(&pts, 2, 1).unwrap();
        assert_eq!(b.basis.len(), 1);
        // x_1 - x_2 up to the canonical normalization
        let f = &b.basis[0];
        assert_eq!(f.degree(), 1);
        assert!(f.eval_rational(&[rat(5, 1), rat(5, 1)]).is_zero());
        assert!(!f.eval_rational(&[rat(5, 1), rat(4, 1)]).is_zero());
    }

    #[test]
    fn parabola_recovered_at_degree_two() {
        let pts: Vec<Vec<ExactScalar>> = (0..5)
            .map(|i| {
                vec![
                    ExactScalar::from_int(i),
                    ExactScalar::from_int(i * i),
                ]
            })
            .collect();
        let b = vanishing_ideal(&pts, 2, 2).unwrap();
        // x_2 - x_1^2 must lie in the span
        let f = MPoly::var(2, 1).sub(&MPoly::var(2, 0).pow(2));
        assert!(b.contains_in_span(&f));
    }

    #[test]
    fn generic_points_have_trivial_linear_ideal() {
        // d+2 generic points in R^d, D=1 -> empty basis (rank check oracle:
        // the 4x3 evaluation matrix below has full column rank)
        let pts = rp(&[(0, 0), (1, 3), (2, 1), (5, 4)]);
        let monos = monomials_up_to(2, 1);
        let rows: Vec<Vec<BigRational>> = pts
            .iter()
            .map(|p| {
                monos
                    .iter()
                    .map(|e| {
                        let mut acc = ExactScalar::one();
                        for (i, &k) in e.iter().enumerate() {
                            acc = acc.mul(&p[i].pow_i(k as i64).unwrap());
                        }
                        acc.as_rational().unwrap().clone()
                    })
                    .collect()
            })
            .collect();
        assert_eq!(matrix_rank(rows), 3);
        let b = vanishing_ideal(&pts, 2, 1).unwrap();
        assert!(b.basis.is_empty());
    }

    #[test]
    fn nullity_equals_monomials_minus_rank() {
        let pts = rp(&[(0, 0), (1, 1), (2, 4), (3, 9), (4, 16)]);
        let b = vanishing_ideal(&pts, 2, 2).unwrap();
        let monos = monomials_up_to(2, 2);
        let mut rows = Vec::new();
        for p in &pts {
            rows.extend(point_rows(p, &monos).unwrap());
        }
        let rank = matrix_rank(rows);
        assert_eq!(b.basis.len(), monos.len() - rank);
    }

    #[test]
    fn algebraic_points_are_supported() {
        // points ({n sqrt 2} , {n sqrt 2}^2): x_2 - x_1^2 vanishes
        let s2 = ExactScalar::sqrt_int(2).unwrap();
        let pts: Vec<Vec<ExactScalar>> = (1..=6)
            .map(|n| {
                let f = s2.mul(&ExactScalar::from_int(n)).frac(4096).unwrap();
                vec![f.clone(), f.mul(&f)]
            })
            .collect();
        let b = vanishing_ideal(&pts, 2, 2).unwrap();
        let f = MPoly::var(2, 1).sub(&MPoly::var(2, 0).pow(2));
        assert!(b.contains_in_span(&f));
        assert_eq!(b.basis.len(), 1);
    }

    #[test]
    fn tail_closure_periodic_orbit() {
        // orbit of 1/7 under x2: {1/7, 2/7, 4/7}; every tail has the same
        // three points, so the ideal is stable with a cubic generator
        let orbit: Vec<Vec<ExactScalar>> = (0..12)
            .map(|n| {
                vec![ExactScalar::from_rational(
                    rat(1, 7) * rat(2, 1).pow(n) - (rat(1, 7) * rat(2, 1).pow(n)).floor(),
                )]
            })
            .collect();
        let (basis, report) = tail_closure(&orbit, &[0, 3, 6], 1, 3).unwrap();
        assert!(report.stabilized);
        assert_eq!(basis.basis.len(), 1);
        let g = &basis.basis[0];
        assert_eq!(g.degree(), 3);
        for v in [rat(1, 7), rat(2, 7), rat(4, 7)] {
            assert!(g.eval_rational(&[v]).is_zero());
        }
    }

    #[test]
    fn tail_closure_constant_sequence() {
        let seq = vec![vec![ExactScalar::ratio(2, 3)]; 8];
        let (basis, report) = tail_closure(&seq, &[0, 2, 4], 1, 3).unwrap();
        assert!(report.stabilized);
        // ideal of one point: x - 2/3 and its multiples up to degree 3
        assert!(basis
            .contains_in_span(&MPoly::var(1, 0).sub(&MPoly::constant(1, rat(2, 3)))));
    }

    #[test]
    fn tail_closure_empty_tail_errors() {
        let seq = vec![vec![ExactScalar::zero()]; 3];
        assert!(matches!(
            tail_closure(&seq, &[5], 1, 2),
            Err(Error::EmptyTail(5))
        ));
    }

    #[test]
    fn translation_checks() {
        // line x1 = x2: invariant under (1,1), not under (1,0)
        let pts = rp(&[(0, 0), (1, 1), (2, 2), (5, 5)]);
        let b = vanishing_ideal(&pts, 2, 1).unwrap();
        assert!(translation_check(&b, &[rat(1, 1), rat(1, 1)]));
        assert!(!translation_check(&b, &[rat(1, 1), rat(0, 1)]));
        // parabola: no nonzero vertical translation
        let pts: Vec<Vec<ExactScalar>> = (-3..=3)
            .map(|i| vec![ExactScalar::from_int(i), ExactScalar::from_int(i * i)])
            .collect();
        let bp = vanishing_ideal(&pts, 2, 2).unwrap();
        assert!(!translation_check(&bp, &[rat(0, 1), rat(1, 1)]));
        assert!(translation_check(&bp, &[rat(0, 1), rat(0, 1)]));
    }

    #[test]
    fn affine_image_checks() {
        // V = U = line x1 = x2, T = scaling by 3: maps V into V
        let line = vanishing_ideal(&rp(&[(0, 0), (1, 1), (2, 2), (7, 7)]), 2, 1).unwrap();
        let scale3 = AffineMapQ {
            matrix: vec![vec![rat(3, 1), rat(0, 1)], vec![rat(0, 1), rat(3, 1)]],
            offset: vec![rat(0, 1), rat(0, 1)],
        };
        assert!(affine_image_check(&line, &line, &scale3, 0, None).unwrap());

        // parabola under (x,y) -> (2x, 4y): preserved
        let parab: Vec<Vec<ExactScalar>> = (-4..=4)
            .map(|i| vec![ExactScalar::from_int(i), ExactScalar::from_int(i * i)])
            .collect();
        let bp = vanishing_ideal(&parab, 2, 2).unwrap();
        let good = AffineMapQ {
            matrix: vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(4, 1)]],
            offset: vec![rat(0, 1), rat(0, 1)],
        };
        assert!(affine_image_check(&bp, &bp, &good, 0, None).unwrap());

        // parabola translated by (1,0): not preserved
        let bad = AffineMapQ {
            matrix: vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
            offset: vec![rat(1, 1), rat(0, 1)],
        };
        assert!(!affine_image_check(&bp, &bp, &bad, 0, None).unwrap());

        // degree cap errors out
        assert!(matches!(
            affine_image_check(&bp, &bp, &good, 0, Some(1)),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn membership_basics() {
        // S = {x > 0}
        let s = SemialgebraicSet::basic(1, vec![], vec![MPoly::var(1, 0)]);
        assert!(s
            .contains(&[ExactScalar::ratio(1, 2)], 4096)
            .unwrap());
        assert!(!s.contains(&[ExactScalar::zero()], 4096).unwrap());
        assert_eq!(s.complexity(), 1);

        // S = {x^2 < 1} as {1 - x^2 > 0}: x = 1 excluded (strict)
        let s = SemialgebraicSet::basic(
            1,
            vec![],
            vec![MPoly::one(1).sub(&MPoly::var(1, 0).pow(2))],
        );
        assert!(!s.contains(&[ExactScalar::one()], 4096).unwrap());
        assert!(s.contains(&[ExactScalar::ratio(9, 10)], 4096).unwrap());

        // piece of the parabola with x1 in (0,1): (1/2, 1/4) inside
        let s = SemialgebraicSet::basic(
            2,
            vec![MPoly::var(2, 1).sub(&MPoly::var(2, 0).pow(2))],
            vec![
                MPoly::var(2, 0),
                MPoly::one(2).sub(&MPoly::var(2, 0)),
            ],
        );
        assert!(s
            .contains(&[ExactScalar::ratio(1, 2), ExactScalar::ratio(1, 4)], 4096)
            .unwrap());
        assert!(!s
            .contains(&[ExactScalar::ratio(1, 2), ExactScalar::ratio(1, 3)], 4096)
            .unwrap());
        // two pieces of degree 2 each have complexity 4
        let two = SemialgebraicSet {
            dim: 1,
            pieces: vec![
                BasicSet {
                    equalities: vec![],
                    inequalities: vec![MPoly::var(1, 0).pow(2)],
                },
                BasicSet {
                    equalities: vec![MPoly::var(1, 0).pow(2)],
                    inequalities: vec![],
                },
            ],
        };
        assert_eq!(two.complexity(), 4);
    }

    #[test]
    fn change_basis_membership_shear() {
        // T = [[1,1],[0,1]], S' = {x1 < 1/2}: x = (3/4, 3/4) maps to
        // {3/2} = 1/2 which fails the strict bound
        let s = SemialgebraicSet::basic(
            2,
            vec![],
            vec![MPoly::constant(2, rat(1, 2)).sub(&MPoly::var(2, 0))],
        );
        let t = vec![
            vec![BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let x = vec![ExactScalar::ratio(3, 4), ExactScalar::ratio(3, 4)];
        assert!(!change_basis_membership(&s, &t, &x, 4096).unwrap());
        // identity map reduces to plain membership
        let id = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let y = vec![ExactScalar::ratio(1, 4), ExactScalar::ratio(3, 4)];
        assert!(change_basis_membership(&s, &id, &y, 4096).unwrap());
        // non-unimodular matrices are rejected
        let bad = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        assert!(change_basis_membership(&s, &bad, &y, 4096).is_err());
    }

    #[test]
    fn sandwich_shrinking_disc() {
        // g_n = 1/n - x^2 -> limit direction -x^2: R empty, U = {0}
        let terms: Vec<MPoly> = (1..=30)
            .map(|n| {
                MPoly::constant(1, rat(1, n)).sub(&MPoly::var(1, 0).pow(2))
            })
            .collect();
        let seq = PolySequence {
            terms,
            limit: MPoly::var(1, 0).pow(2).neg(),
        };
        let (r, u) = limit_sandwich(&[seq], 1, &rat(1, 8)).unwrap();
        // 0 in S_n for all n, and 0 in U
        assert!(u.contains(&[ExactScalar::zero()], 4096).unwrap());
        assert!(!r.contains(&[ExactScalar::zero()], 4096).unwrap());
        let grid: Vec<Vec<BigRational>> = (-10..=10).map(|i| vec![rat(i, 7)]).collect();
        // probe beyond the exit time of the innermost nonzero grid point
        // (x = 1/7 leaves S_n at n = 50)
        let ok = sandwich_holds_on_grid(
            |n| vec![MPoly::constant(1, rat(1, n as i64)).sub(&MPoly::var(1, 0).pow(2))],
            &r,
            &u,
            &grid,
            &(1..=120).collect::<Vec<_>>(),
            4096,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn sandwich_constant_sequence() {
        // g_n = g = x: R = {x > 0}, U = {x = 0}
        let g = MPoly::var(1, 0);
        let seq = PolySequence {
            terms: vec![g.clone(); 10],
            limit: g.clone(),
        };
        let (r, u) = limit_sandwich(&[seq], 1, &rat(1, 100)).unwrap();
        assert!(r.contains(&[ExactScalar::one()], 4096).unwrap());
        assert!(u.contains(&[ExactScalar::zero()], 4096).unwrap());
        let grid: Vec<Vec<BigRational>> = (-8..=8).map(|i| vec![rat(i, 5)]).collect();
        assert!(sandwich_holds_on_grid(
            |_| vec![g.clone()],
            &r,
            &u,
            &grid,
            &(1..=10).collect::<Vec<_>>(),
            4096,
        )
        .unwrap());
    }

    #[test]
    fn sandwich_moving_halfline() {
        // g_n = x - 1/n -> x: limit set {x > 0} plus boundary handled by U
        let terms: Vec<MPoly> = (1..=30)
            .map(|n| MPoly::var(1, 0).sub(&MPoly::constant(1, rat(1, n))))
            .collect();
        let seq = PolySequence {
            terms,
            limit: MPoly::var(1, 0),
        };
        let (r, u) = limit_sandwich(&[seq], 1, &rat(1, 8)).unwrap();
        assert!(r.contains(&[ExactScalar::ratio(1, 3)], 4096).unwrap());
        assert!(u.contains(&[ExactScalar::zero()], 4096).unwrap());
        let grid: Vec<Vec<BigRational>> = (-10..=10).map(|i| vec![rat(i, 3)]).collect();
        assert!(sandwich_holds_on_grid(
            |n| vec![MPoly::var(1, 0).sub(&MPoly::constant(1, rat(1, n as i64)))],
            &r,
            &u,
            &grid,
            &(1..=40).collect::<Vec<_>>(),
            4096,
        )
        .unwrap());
    }

    #[test]
    fn sandwich_rejects_nonconvergent_input() {
        // oscillating directions x and -x
        let terms: Vec<MPoly> = (1..=10)
            .map(|n| {
                if n % 2 == 0 {
                    MPoly::var(1, 0)
                } else {
                    MPoly::var(1, 0).neg()
                }
            })
            .collect();
        let seq = PolySequence {
            terms,
            limit: MPoly::var(1, 0),
        };
        assert!(matches!(
            limit_sandwich(&[seq], 1, &rat(1, 100)),
            Err(Error::NonConvergentCoefficients)
        ));
    }

    #[test]
    fn planted_variety_recovery() {
        // sample >= 3x monomial count points from a planted quadric and
        // recover exactly its span at D = 2
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(99);
        // planted: x2 = 3 x1^2 - 2 x1 + 5 (a graph, so points are easy)
        let mut pts = Vec::new();
        for _ in 0..20 {
            let p = rng.gen_range(-30i64..30);
            let q = rng.gen_range(1i64..6);
            let x = rat(p, q);
            let y = rat(3, 1) * &x * &x - rat(2, 1) * &x + rat(5, 1);
            pts.push(vec![
                ExactScalar::from_rational(x),
                ExactScalar::from_rational(y),
            ]);
        }
        let b = vanishing_ideal(&pts, 2, 2).unwrap();
        assert_eq!(b.basis.len(), 1);
        let planted = MPoly::var(2, 1)
            .sub(&MPoly::var(2, 0).pow(2).scale(&rat(3, 1)))
            .add(&MPoly::var(2, 0).scale(&rat(2, 1)))
            .sub(&MPoly::constant(2, rat(5, 1)));
        assert!(b.contains_in_span(&planted));
    }

    #[test]
    fn tails_grow_with_start() {
        // a transient point followed by a periodic orbit: the tail ideal
        // grows (as a subspace) when the transient drops out
        let mut seq = vec![vec![ExactScalar::ratio(1, 9)]];
        for n in 0..9 {
            seq.push(vec![ExactScalar::from_rational(
                rat(1, 7) * rat(2, 1).pow(n) - (rat(1, 7) * rat(2, 1).pow(n)).floor(),
            )]);
        }
        let b_all = vanishing_ideal(&seq, 1, 3).unwrap();
        let b_tail = vanishing_ideal(&seq[1..], 1, 3).unwrap();
        assert!(b_all.subspace_of(&b_tail));
        assert!(!b_tail.subspace_of(&b_all));
    }
}
