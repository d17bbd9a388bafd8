//! Graded triangular matrix groups and algebras over a downward-closed index
//! set: matrices lower triangular with respect to derivability, standard
//! (diagonal t^{d_mu}), special/unipotent (diagonal 1), and strictly lower
//! algebra elements, optionally augmented by a 0-th coordinate of degree 0
//! for the affine forms.
//!
//! The exponential never evaluates e^t transcendentally: the graded
//! exponential takes E = e^t as an explicit ring element, and every entry is
//! polynomial in E. The coefficient attached to a descending chain is the
//! divided difference of x -> E^x over the chain degrees,
//!
//!   sum_i E^{d_i} / prod_{j != i} (d_i - d_j),
//!
//! which is a rational polynomial in E because chain degrees strictly
//! decrease. For the two-step chain this is (E^{d_kappa} - E^{d_lambda}) /
//! (d_kappa - d_lambda).

use crate::brackets::{derivable, IndexSet};
use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use crate::scalar::ExactScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Commutative Q-algebra interface; context comes from the receiver so
/// polynomial rings can carry their arity.
pub trait Ring: Clone + PartialEq {
    fn r_zero(&self) -> Self;
    fn r_one(&self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_neg(&self) -> Self;
    fn r_scale(&self, q: &BigRational) -> Self;
    fn r_is_zero(&self) -> bool;

    fn r_sub(&self, o: &Self) -> Self {
        self.r_add(&o.r_neg())
    }

    fn r_pow(&self, n: u32) -> Self {
        let mut acc = self.r_one();
        for _ in 0..n {
            acc = acc.r_mul(self);
        }
        acc
    }
}

impl Ring for ExactScalar {
    fn r_zero(&self) -> Self {
        ExactScalar::zero()
    }
    fn r_one(&self) -> Self {
        ExactScalar::one()
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_neg(&self) -> Self {
        self.neg()
    }
    fn r_scale(&self, q: &BigRational) -> Self {
        self.mul(&ExactScalar::from_rational(q.clone()))
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for MPoly {
    fn r_zero(&self) -> Self {
        MPoly::zero(self.arity)
    }
    fn r_one(&self) -> Self {
        MPoly::one(self.arity)
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_neg(&self) -> Self {
        self.neg()
    }
    fn r_scale(&self, q: &BigRational) -> Self {
        self.scale(q)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Index frame of a graded matrix: the index set, optionally augmented by a
/// 0-th coordinate with degree 0 below everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedFrame {
    pub dset: IndexSet,
    pub augmented: bool,
}

impl GradedFrame {
    pub fn plain(dset: IndexSet) -> Self {
        GradedFrame {
            dset,
            augmented: false,
        }
    }

    pub fn augmented(dset: IndexSet) -> Self {
        GradedFrame {
            dset,
            augmented: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dset.len() + usize::from(self.augmented)
    }

    pub fn degree(&self, pos: usize) -> u32 {
        if self.augmented {
            if pos == 0 {
                0
            } else {
                self.dset.degree_at(pos - 1)
            }
        } else {
            self.dset.degree_at(pos)
        }
    }

    /// Position a weakly below position b in the derivability order.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        if self.augmented {
            match (a, b) {
                (0, _) => true,
                (_, 0) => false,
                (a, b) => {
                    let m = self.dset.members();
                    derivable(&m[a - 1], &m[b - 1])
                }
            }
        } else {
            let m = self.dset.members();
            derivable(&m[a], &m[b])
        }
    }

    pub fn strictly_less(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }
}

/// Matrix over a ring, shaped by a graded frame; stored row-major in the
/// canonical coordinate order (a linear extension of derivability).
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMatrix<R> {
    pub frame: GradedFrame,
    pub entries: Vec<Vec<R>>,
}

impl<R: Ring> GradedMatrix<R> {
    pub fn zero_like(frame: GradedFrame, proto: &R) -> Self {
        let n = frame.dim();
        GradedMatrix {
            frame,
            entries: vec![vec![proto.r_zero(); n]; n],
        }
    }

    pub fn identity(frame: GradedFrame, proto: &R) -> Self {
        let mut m = Self::zero_like(frame, proto);
        for i in 0..m.dim() {
            m.entries[i][i] = proto.r_one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    fn proto(&self) -> &R {
        &self.entries[0][0]
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.entries[i][j] = self.entries[i][j].r_add(&o.entries[i][j]);
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = self.clone();
        for row in &mut out.entries {
            for e in row {
                *e = e.r_scale(q);
            }
        }
        out
    }

    pub fn scale_ring(&self, c: &R) -> Self {
        let mut out = self.clone();
        for row in &mut out.entries {
            for e in row {
                *e = e.r_mul(c);
            }
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let z = self.proto().r_zero();
        let mut out = GradedMatrix {
            frame: self.frame.clone(),
            entries: vec![vec![z; n]; n],
        };
        for i in 0..n {
            for l in 0..n {
                if self.entries[i][l].r_is_zero() {
                    continue;
                }
                for j in 0..n {
                    if o.entries[l][j].r_is_zero() {
                        continue;
                    }
                    let t = self.entries[i][l].r_mul(&o.entries[l][j]);
                    out.entries[i][j] = out.entries[i][j].r_add(&t);
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.entries[i][j] = self.entries[i][j].r_sub(&o.entries[i][j]);
            }
        }
        out
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| self.entries[i][j].r_is_zero() || self.frame.leq(j, i))
        })
    }

    pub fn is_strictly_lower(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n)
                .all(|j| self.entries[i][j].r_is_zero() || self.frame.strictly_less(j, i))
        })
    }

    pub fn is_unipotent(&self) -> bool {
        let one = self.proto().r_one();
        self.is_lower_triangular() && (0..self.dim()).all(|i| self.entries[i][i] == one)
    }

    pub fn transform<S>(&self, f: impl Fn(&R) -> S) -> GradedMatrix<S> {
        GradedMatrix {
            frame: self.frame.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }
}

impl GradedMatrix<ExactScalar> {
    /// Diagonal scale E with diag = E^{d_mu}, when one exists.
    pub fn standard_scale(&self) -> Result<ExactScalar> {
        if !self.is_lower_triangular() {
            return Err(Error::InvalidInput(
                "matrix is not lower triangular w.r.t. derivability".into(),
            ));
        }
        let mut scale: Option<ExactScalar> = None;
        for i in 0..self.dim() {
            let d = self.frame.degree(i);
            if d == 0 {
                if !self.entries[i][i].is_one() {
                    return Err(Error::InconsistentDiagonal);
                }
                continue;
            }
            let e = match self.entries[i][i].as_rational() {
                Some(q) => ExactScalar::nth_root_of(q, d)?,
                None => {
                    return Err(Error::InvalidInput(
                        "constructed diagonal entries are not supported".into(),
                    ))
                }
            };
            match &scale {
                None => scale = Some(e),
                Some(s) => {
                    if *s != e {
                        return Err(Error::InconsistentDiagonal);
                    }
                }
            }
        }
        scale.ok_or(Error::InconsistentDiagonal)
    }

    /// Exact inverse of a (derivability-)triangular matrix with invertible
    /// diagonal, by forward substitution in the canonical order.
    pub fn inverse(&self) -> Result<GradedMatrix<ExactScalar>> {
        if !self.is_lower_triangular() {
            return Err(Error::InvalidInput(
                "inverse requires a lower triangular matrix".into(),
            ));
        }
        let n = self.dim();
        let mut out = GradedMatrix::zero_like(self.frame.clone(), &ExactScalar::zero());
        for col in 0..n {
            // solve A x = e_col; canonical order makes A positionally lower
            // triangular as well
            for i in 0..n {
                let mut rhs = if i == col {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                };
                for j in 0..i {
                    if !self.entries[i][j].is_zero() && !out.entries[j][col].is_zero() {
                        rhs = rhs.sub(&self.entries[i][j].mul(&out.entries[j][col]));
                    }
                }
                if self.entries[i][i].is_zero() {
                    return Err(Error::InvalidInput("singular matrix".into()));
                }
                out.entries[i][col] = rhs.div(&self.entries[i][i])?;
            }
        }
        Ok(out)
    }
}

/// All strictly descending chains from `from` to `to` whose consecutive
/// entries of `z` are nonzero; each chain is a list of positions.
fn chains_through<R: Ring>(
    z: &GradedMatrix<R>,
    from: usize,
    to: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let cur = *path.last().unwrap();
        if cur == to {
            if path.len() >= 2 {
                out.push(path);
            }
            continue;
        }
        for next in 0..z.dim() {
            if z.frame.strictly_less(next, cur)
                && z.frame.leq(to, next)
                && !z.entries[cur][next].r_is_zero()
            {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    out
}

/// Divided difference of x -> E^x over the (distinct) chain degrees.
fn chain_coefficient<R: Ring>(e_scale: &R, degrees: &[u32]) -> Result<R> {
    for (i, a) in degrees.iter().enumerate() {
        for b in &degrees[i + 1..] {
            if a == b {
                return Err(Error::RepeatedDegreeOnChain);
            }
        }
    }
    let mut acc = e_scale.r_zero();
    for (i, &d) in degrees.iter().enumerate() {
        let mut denom = BigRational::one();
        for (j, &dj) in degrees.iter().enumerate() {
            if i != j {
                denom *= BigRational::from_integer(BigInt::from(d as i64 - dj as i64));
            }
        }
        acc = acc.r_add(&e_scale.r_pow(d).r_scale(&denom.recip()));
    }
    Ok(acc)
}

/// exp of a strictly lower (nilpotent) element: finite series, exact.
pub fn exp_nilpotent<R: Ring>(z: &GradedMatrix<R>) -> Result<GradedMatrix<R>> {
    if !z.is_strictly_lower() {
        return Err(Error::NotStrictlyLower);
    }
    let n = z.dim();
    let mut acc = GradedMatrix::identity(z.frame.clone(), z.proto());
    let mut term = GradedMatrix::identity(z.frame.clone(), z.proto());
    let mut fact = BigRational::one();
    for j in 1..n {
        term = term.mul(z);
        fact *= BigRational::from_integer(BigInt::from(j));
        acc = acc.add(&term.scale(&fact.recip()));
    }
    Ok(acc)
}

/// log of a unipotent element: finite alternating series, exact.
pub fn log_unipotent<R: Ring>(a: &GradedMatrix<R>) -> Result<GradedMatrix<R>> {
    if !a.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    let n = a.dim();
    let nil = a.sub(&GradedMatrix::identity(a.frame.clone(), a.proto()));
    let mut acc = GradedMatrix::zero_like(a.frame.clone(), a.proto());
    let mut pw = GradedMatrix::identity(a.frame.clone(), a.proto());
    for j in 1..n {
        pw = pw.mul(&nil);
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let c = BigRational::new(BigInt::from(sign), BigInt::from(j));
        acc = acc.add(&pw.scale(&c));
    }
    Ok(acc)
}

/// exp(t(Lambda + Z)) assembled polynomially in E = e^t: diagonal E^{d_mu},
/// off-diagonal entries summed over descending chains with divided-difference
/// coefficients.
pub fn exp_graded<R: Ring>(e_scale: &R, z: &GradedMatrix<R>) -> Result<GradedMatrix<R>> {
    if !z.is_strictly_lower() {
        return Err(Error::NotStrictlyLower);
    }
    let n = z.dim();
    let mut out = GradedMatrix::zero_like(z.frame.clone(), z.proto());
    for i in 0..n {
        out.entries[i][i] = e_scale.r_pow(z.frame.degree(i));
    }
    for i in 0..n {
        for j in 0..n {
            if !z.frame.strictly_less(j, i) {
                continue;
            }
            let mut acc = z.proto().r_zero();
            for chain in chains_through(z, i, j) {
                let mut zprod = z.proto().r_one();
                for w in chain.windows(2) {
                    zprod = zprod.r_mul(&z.entries[w[0]][w[1]]);
                }
                let degrees: Vec<u32> =
                    chain.iter().map(|&p| z.frame.degree(p)).collect();
                let coeff = chain_coefficient(e_scale, &degrees)?;
                acc = acc.r_add(&zprod.r_mul(&coeff));
            }
            out.entries[i][j] = acc;
        }
    }
    Ok(out)
}

/// Inverse of the graded exponential on standard matrices with scale != 1:
/// recovers E from the diagonal and Z by induction on the longest descending
/// path, so that exp_graded(E, Z) = A exactly.
pub fn log_graded(
    a: &GradedMatrix<ExactScalar>,
) -> Result<(ExactScalar, GradedMatrix<ExactScalar>)> {
    let e = a.standard_scale()?;
    if e.is_one() {
        return Err(Error::ScaleIsOne);
    }
    let n = a.dim();
    // longest strict chain length between comparable positions
    let mut longest = vec![vec![0usize; n]; n];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if a.frame.strictly_less(j, i) {
                pairs.push((i, j));
            }
        }
    }
    // longest path by dynamic programming over the strict order
    loop {
        let mut changed = false;
        for &(i, j) in &pairs {
            let mut best = 2usize;
            for m in 0..n {
                if a.frame.strictly_less(m, i) && a.frame.strictly_less(j, m) {
                    let via = longest[i][m].max(2) + longest[m][j].max(2) - 1;
                    best = best.max(via);
                }
            }
            if longest[i][j] != best {
                longest[i][j] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut order: Vec<(usize, usize)> = pairs.clone();
    order.sort_by_key(|&(i, j)| longest[i][j]);

    let mut z = GradedMatrix::zero_like(a.frame.clone(), &ExactScalar::zero());
    for &(i, j) in &order {
        let mut rem = ExactScalar::zero();
        for chain in chains_through(&z, i, j) {
            if chain.len() < 3 {
                continue;
            }
            let mut zprod = ExactScalar::one();
            for w in chain.windows(2) {
                zprod = zprod.mul(&z.entries[w[0]][w[1]]);
            }
            let degrees: Vec<u32> = chain.iter().map(|&p| z.frame.degree(p)).collect();
            rem = rem.add(&zprod.mul(&chain_coefficient(&e, &degrees)?));
        }
        let dd = chain_coefficient(&e, &[a.frame.degree(i), a.frame.degree(j)])?;
        z.entries[i][j] = a.entries[i][j].sub(&rem).div(&dd)?;
    }
    Ok((e, z))
}

/// A^t for standard or unipotent A and rational t. Unipotent matrices go
/// through the nilpotent series (entries polynomial in t); standard matrices
/// through the graded exponential with scale E^t.
pub fn power(a: &GradedMatrix<ExactScalar>, t: &BigRational) -> Result<GradedMatrix<ExactScalar>> {
    if a.is_unipotent() {
        let l = log_unipotent(a)?;
        return exp_nilpotent(&l.scale(t));
    }
    let (e, z) = log_graded(a)?;
    let p: i64 = t
        .numer()
        .try_into()
        .map_err(|_| Error::InvalidInput("power numerator too large".into()))?;
    let q: u32 = t
        .denom()
        .try_into()
        .map_err(|_| Error::InvalidInput("power denominator too large".into()))?;
    let e_t = e.pow_i(p)?.nth_root(q)?;
    exp_graded(&e_t, &z)
}

/// Transition matrix P in the unipotent group with P^{-1} A P diagonal, for
/// standard A with scale != 1. Column mu of P is the eigenvector of
/// eigenvalue A_{mu,mu} in e_mu + span{e_nu : nu > mu}.
pub fn diagonalize(a: &GradedMatrix<ExactScalar>) -> Result<GradedMatrix<ExactScalar>> {
    let e = a.standard_scale()?;
    if e.is_one() {
        return Err(Error::ScaleIsOne);
    }
    let n = a.dim();
    let mut p = GradedMatrix::identity(a.frame.clone(), &ExactScalar::zero());
    for m in 0..n {
        let lam = &a.entries[m][m];
        // fill v_rho for rho strictly above mu, in canonical (ascending) order
        for rho in (m + 1)..n {
            if !a.frame.strictly_less(m, rho) {
                continue;
            }
            let mut s = ExactScalar::zero();
            for nu in m..rho {
                if a.frame.leq(m, nu) && a.frame.strictly_less(nu, rho) {
                    let v = &p.entries[nu][m];
                    if !v.is_zero() && !a.entries[rho][nu].is_zero() {
                        s = s.add(&a.entries[rho][nu].mul(v));
                    }
                }
            }
            if s.is_zero() {
                continue;
            }
            let denom = lam.sub(&a.entries[rho][rho]);
            p.entries[rho][m] = s.div(&denom)?;
        }
    }
    Ok(p)
}
