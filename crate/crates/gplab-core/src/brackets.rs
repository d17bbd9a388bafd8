//! Bracket indices and finite downward-closed index sets.
//!
//! An index is a positive-integer leaf with a multiset of bracketed index
//! factors; expressions differing only by factor order are equal, so factors
//! are kept in a canonical structural order. Literal syntax: `1`, `1[2]`,
//! `1[2][2[1]]`.

use crate::error::{Error, Result};
use crate::scalar::{parse::Cursor, ExactScalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Formal expression i[f_1]...[f_s] of positive integers and brackets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BracketIndex {
    pub leaf: u32,
    /// Canonically sorted; equality ignores original factor order.
    pub factors: Vec<BracketIndex>,
}

impl BracketIndex {
    pub fn leaf(i: u32) -> Self {
        assert!(i >= 1, "leaves are positive integers");
        BracketIndex {
            leaf: i,
            factors: Vec::new(),
        }
    }

    /// Attach one more bracketed factor (canonicalizing).
    pub fn with_factor(&self, f: BracketIndex) -> Self {
        let mut factors = self.factors.clone();
        factors.push(f);
        factors.sort_by(cmp_structural);
        BracketIndex {
            leaf: self.leaf,
            factors,
        }
    }

    pub fn compound(leaf: u32, mut factors: Vec<BracketIndex>) -> Self {
        factors.sort_by(cmp_structural);
        BracketIndex { leaf, factors }
    }

    pub fn is_leaf(&self) -> bool {
        self.factors.is_empty()
    }

    /// Maximal number of nested brackets.
    pub fn height(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| f.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// All indices obtained by removing exactly one factor occurrence
    /// somewhere in the tree.
    pub fn one_step_removals(&self) -> Vec<BracketIndex> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            // remove the whole factor
            let mut fs = self.factors.clone();
            fs.remove(i);
            out.push(BracketIndex::compound(self.leaf, fs));
            // or remove inside it
            for sub in f.one_step_removals() {
                let mut fs = self.factors.clone();
                fs[i] = sub;
                out.push(BracketIndex::compound(self.leaf, fs));
            }
        }
        out.sort_by(cmp_structural);
        out.dedup();
        out
    }

    /// Pick a decomposition kappa[lambda]: the last canonical factor is
    /// peeled off. Returns None on leaves.
    pub fn peel(&self) -> Option<(BracketIndex, BracketIndex)> {
        let last = self.factors.last()?.clone();
        let mut rest = self.factors.clone();
        rest.pop();
        Some((BracketIndex { leaf: self.leaf, factors: rest }, last))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor::new(text);
        let idx = parse_index(&mut cur)?;
        cur.skip_ws();
        if cur.pos != cur.text.len() {
            return Err(cur.err("trailing input in index literal"));
        }
        Ok(idx)
    }
}

fn parse_index(cur: &mut Cursor) -> Result<BracketIndex> {
    let leaf = cur.integer()?;
    let leaf: u32 = leaf
        .try_into()
        .map_err(|_| cur.err("leaf too large"))?;
    if leaf == 0 {
        return Err(cur.err("leaves are positive integers"));
    }
    let mut factors = Vec::new();
    while cur.eat(b'[') {
        factors.push(parse_index(cur)?);
        cur.expect(b']')?;
    }
    Ok(BracketIndex::compound(leaf, factors))
}

/// Structural total order used only for canonical factor placement:
/// height, then leaf, then factor lists.
fn cmp_structural(a: &BracketIndex, b: &BracketIndex) -> std::cmp::Ordering {
    a.height()
        .cmp(&b.height())
        .then_with(|| a.leaf.cmp(&b.leaf))
        .then_with(|| {
            for (x, y) in a.factors.iter().zip(&b.factors) {
                let c = cmp_structural(x, y);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            a.factors.len().cmp(&b.factors.len())
        })
}

impl fmt::Display for BracketIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.leaf)?;
        for fac in &self.factors {
            write!(f, "[{fac}]")?;
        }
        Ok(())
    }
}

impl Serialize for BracketIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BracketIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BracketIndex::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Degree assignment on leaves, d_i >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Grading(pub BTreeMap<u32, u32>);

impl Grading {
    pub fn new(pairs: &[(u32, u32)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(leaf, d) in pairs {
            if d == 0 {
                return Err(Error::InvalidInput(format!(
                    "degree of leaf {leaf} must be positive"
                )));
            }
            map.insert(leaf, d);
        }
        Ok(Grading(map))
    }

    pub fn degree_of_leaf(&self, leaf: u32) -> Result<u32> {
        self.0.get(&leaf).copied().ok_or(Error::MissingGrade(leaf))
    }
}

/// Total degree: d_i on leaves, d_kappa + d_lambda on compounds.
pub fn degree(idx: &BracketIndex, grading: &Grading) -> Result<u32> {
    let mut d = grading.degree_of_leaf(idx.leaf)?;
    for f in &idx.factors {
        d += degree(f, grading)?;
    }
    Ok(d)
}

/// Derivability: nu is obtainable from mu by removing factors. Leaves must
/// agree and the factors of nu must match injectively into factors of mu,
/// each pair recursively derivable.
pub fn derivable(nu: &BracketIndex, mu: &BracketIndex) -> bool {
    if nu.leaf != mu.leaf {
        return false;
    }
    if nu.factors.len() > mu.factors.len() {
        return false;
    }
    match_factors(&nu.factors, &mu.factors, &mut vec![false; mu.factors.len()])
}

fn match_factors(need: &[BracketIndex], have: &[BracketIndex], used: &mut Vec<bool>) -> bool {
    let Some(first) = need.first() else {
        return true;
    };
    for (j, h) in have.iter().enumerate() {
        if used[j] || !derivable(first, h) {
            continue;
        }
        used[j] = true;
        if match_factors(&need[1..], have, used) {
            used[j] = false;
            return true;
        }
        used[j] = false;
    }
    false
}

pub fn strictly_derivable(nu: &BracketIndex, mu: &BracketIndex) -> bool {
    nu != mu && derivable(nu, mu)
}

/// Finite downward-closed index set with its grading and canonical order.
///
/// The canonical coordinate order sorts by total degree, then leaf, then
/// structure; it extends derivability (strict derivability strictly lowers
/// the degree) and is emitted verbatim in every serialized artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    members: Vec<BracketIndex>,
    grading: Grading,
}

impl IndexSet {
    pub fn new(mut members: Vec<BracketIndex>, grading: Grading) -> Result<Self> {
        members.sort_by(cmp_structural);
        members.dedup();
        // grading totality
        for m in &members {
            degree(m, &grading)?;
        }
        sort_canonical(&mut members, &grading)?;
        let set = IndexSet { members, grading };
        if let Some(missing) = set.downward_closure_gap()? {
            return Err(Error::NotDownwardClosed(missing.to_string()));
        }
        Ok(set)
    }

    /// Close the given members downward and build the set.
    pub fn closure(mut members: Vec<BracketIndex>, grading: Grading) -> Result<Self> {
        let mut stack: Vec<BracketIndex> = members.clone();
        while let Some(m) = stack.pop() {
            for r in m.one_step_removals() {
                if !members.contains(&r) {
                    members.push(r.clone());
                    stack.push(r);
                }
            }
        }
        IndexSet::new(members, grading)
    }

    /// The paper's running five-index example.
    pub fn running_example() -> Self {
        let g = Grading::new(&[(1, 1), (2, 1), (3, 2)]).unwrap();
        let m = vec![
            BracketIndex::leaf(1),
            BracketIndex::leaf(2),
            BracketIndex::leaf(3),
            BracketIndex::leaf(1).with_factor(BracketIndex::leaf(2)),
            BracketIndex::leaf(2).with_factor(BracketIndex::leaf(1)),
        ];
        IndexSet::new(m, g).unwrap()
    }

    fn downward_closure_gap(&self) -> Result<Option<BracketIndex>> {
        for m in &self.members {
            for r in m.one_step_removals() {
                if !self.members.contains(&r) {
                    return Ok(Some(r));
                }
            }
        }
        Ok(None)
    }

    pub fn members(&self) -> &[BracketIndex] {
        &self.members
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, idx: &BracketIndex) -> Option<usize> {
        self.members.iter().position(|m| m == idx)
    }

    pub fn degree(&self, idx: &BracketIndex) -> Result<u32> {
        degree(idx, &self.grading)
    }

    pub fn degree_at(&self, pos: usize) -> u32 {
        degree(&self.members[pos], &self.grading).expect("grading checked on construction")
    }

    /// Complexity vector: c_i = number of members of height i.
    pub fn complexity_vector(&self) -> Vec<usize> {
        let maxh = self
            .members
            .iter()
            .map(|m| m.height())
            .max()
            .unwrap_or(0) as usize;
        let mut c = vec![0usize; maxh + 1];
        for m in &self.members {
            c[m.height() as usize] += 1;
        }
        c
    }

    /// The leaves that occur, in canonical order.
    pub fn leaves(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .members
            .iter()
            .filter(|m| m.is_leaf())
            .map(|m| m.leaf)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn sort_canonical(members: &mut [BracketIndex], grading: &Grading) -> Result<()> {
    let mut keyed: Vec<(u32, BracketIndex)> = members
        .iter()
        .map(|m| Ok((degree(m, grading)?, m.clone())))
        .collect::<Result<_>>()?;
    keyed.sort_by(|(da, a), (db, b)| da.cmp(db).then_with(|| cmp_leaf_major(a, b)));
    for (slot, (_, m)) in members.iter_mut().zip(keyed) {
        *slot = m;
    }
    Ok(())
}

/// Tiebreak within a degree class: leaf first, then factors. This reproduces
/// the conventional coordinate layout (1, 2, 1[2], 2[1], 3) and still extends
/// derivability, which is already settled by the degree comparison.
fn cmp_leaf_major(a: &BracketIndex, b: &BracketIndex) -> std::cmp::Ordering {
    a.leaf.cmp(&b.leaf).then_with(|| {
        for (x, y) in a.factors.iter().zip(&b.factors) {
            let c = cmp_leaf_major(x, y);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        a.factors.len().cmp(&b.factors.len())
    })
}

/// Reverse-lexicographic comparison of complexity vectors: the highest index
/// where they differ decides.
pub fn complexity_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        if x != y {
            return x.cmp(&y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Generalised monomial value v_mu(t): alpha_i t^{d_i} on leaves and
/// v_kappa(t) {v_lambda(t)} on compounds.
pub fn monomial_eval(
    idx: &BracketIndex,
    alpha: &BTreeMap<u32, ExactScalar>,
    grading: &Grading,
    t: &ExactScalar,
    max_bits: u32,
) -> Result<ExactScalar> {
    let a = alpha
        .get(&idx.leaf)
        .ok_or_else(|| Error::InvalidInput(format!("no coefficient for leaf {}", idx.leaf)))?;
    let d = grading.degree_of_leaf(idx.leaf)?;
    let mut v = a.mul(&t.pow_i(d as i64)?);
    for f in &idx.factors {
        let fv = monomial_eval(f, alpha, grading, t, max_bits)?;
        v = v.mul(&fv.frac(max_bits)?);
    }
    Ok(v)
}

/// v^alpha(t): componentwise monomial values in canonical coordinate order.
pub fn v_vector(
    dset: &IndexSet,
    alpha: &BTreeMap<u32, ExactScalar>,
    t: &ExactScalar,
    max_bits: u32,
) -> Result<Vec<ExactScalar>> {
    dset.members()
        .iter()
        .map(|m| monomial_eval(m, alpha, dset.grading(), t, max_bits))
        .collect()
}

/// Coefficient map from a slice ordered like `IndexSet::leaves()`.
pub fn alpha_map(dset: &IndexSet, values: &[ExactScalar]) -> Result<BTreeMap<u32, ExactScalar>> {
    let leaves = dset.leaves();
    if leaves.len() != values.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} coefficients, got {}",
            leaves.len(),
            values.len()
        )));
    }
    Ok(leaves.into_iter().zip(values.iter().cloned()).collect())
}

/// Serialized index-set form: members, grading, canonical order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexSetJson {
    pub members: Vec<String>,
    pub grading: BTreeMap<u32, u32>,
    pub order: Vec<String>,
}

impl IndexSet {
    pub fn to_json(&self) -> IndexSetJson {
        let order: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        IndexSetJson {
            members: order.clone(),
            grading: self.grading.0.clone(),
            order,
        }
    }

    pub fn from_json(j: &IndexSetJson) -> Result<Self> {
        let members = j
            .members
            .iter()
            .map(|s| BracketIndex::parse(s))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(members, Grading(j.grading.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_MAX_BITS;

    fn idx(s: &str) -> BracketIndex {
        BracketIndex::parse(s).unwrap()
    }

    #[test]
    fn equality_ignores_factor_order() {
        let a = BracketIndex::compound(1, vec![idx("2"), idx("2[1]")]);
        let b = BracketIndex::compound(1, vec![idx("2[1]"), idx("2")]);
        assert_eq!(a, b);
    }

    #[test]
    fn degrees_of_running_example() {
        // d_{1[2]} = d_{2[1]} = 2 and d_3 = 2 under d_1 = d_2 = 1, d_3 = 2
        let g = Grading::new(&[(1, 1), (2, 1), (3, 2)]).unwrap();
        assert_eq!(degree(&idx("1[2]"), &g).unwrap(), 2);
        assert_eq!(degree(&idx("2[1]"), &g).unwrap(), 2);
        assert_eq!(degree(&idx("3"), &g).unwrap(), 2);
        // nested: 1[2[1]] -> 3 by summing over the recursion
        assert_eq!(degree(&idx("1[2[1]]"), &g).unwrap(), 3);
    }

    #[test]
    fn missing_grade_is_reported() {
        let g = Grading::new(&[(1, 1)]).unwrap();
        assert_eq!(degree(&idx("2"), &g), Err(Error::MissingGrade(2)));
    }

    #[test]
    fn heights() {
        assert_eq!(idx("2").height(), 0);
        assert_eq!(idx("1[2]").height(), 1);
        assert_eq!(idx("1[2[1]]").height(), 2);
        assert_eq!(idx("1[2][3[4[5]]]").height(), 3);
    }

    #[test]
    fn derivability_pairs() {
        assert!(derivable(&idx("1"), &idx("1[2]")));
        assert!(derivable(&idx("2"), &idx("2[1]")));
        assert!(!derivable(&idx("3"), &idx("1[2]")));
        assert!(!derivable(&idx("1[2]"), &idx("2[1]")));
        // removing one of two identical factors
        assert!(derivable(&idx("1[2]"), &idx("1[2][2]")));
        // slotwise recursion
        assert!(derivable(&idx("1[2]"), &idx("1[2[1]]")));
        assert!(!derivable(&idx("1[2[1]]"), &idx("1[2]")));
    }

    #[test]
    fn derivability_matches_removal_enumeration() {
        // Exhaustive oracle: nu <= mu iff nu is reachable by repeated
        // one-step removals.
        let samples = [
            "1", "2", "1[2]", "2[1]", "1[2][2]", "1[2[1]]", "2[1][1]", "1[2[1]][2]",
        ];
        for m in samples {
            let mu = idx(m);
            let mut reach = vec![mu.clone()];
            let mut stack = vec![mu.clone()];
            while let Some(x) = stack.pop() {
                for r in x.one_step_removals() {
                    if !reach.contains(&r) {
                        reach.push(r.clone());
                        stack.push(r);
                    }
                }
            }
            for nv in samples {
                let nu = idx(nv);
                assert_eq!(
                    derivable(&nu, &mu),
                    reach.contains(&nu),
                    "mismatch for {nv} <= {m}"
                );
            }
        }
    }

    #[test]
    fn canonical_order_of_running_example() {
        let d = IndexSet::running_example();
        let names: Vec<String> = d.members().iter().map(|m| m.to_string()).collect();
        assert_eq!(names, vec!["1", "2", "1[2]", "2[1]", "3"]);
    }

    #[test]
    fn complexity_vector_and_reverse_lex() {
        let d = IndexSet::running_example();
        assert_eq!(d.complexity_vector(), vec![3, 2]);
        let single = IndexSet::new(
            vec![BracketIndex::leaf(1)],
            Grading::new(&[(1, 1)]).unwrap(),
        )
        .unwrap();
        assert_eq!(single.complexity_vector(), vec![1]);
        // (3,2) vs (0,3): the higher coordinate decides
        assert_eq!(complexity_cmp(&[3, 2], &[0, 3]), std::cmp::Ordering::Less);
    }

    #[test]
    fn closure_is_idempotent_and_detects_gaps() {
        let g = Grading::new(&[(1, 1), (2, 1)]).unwrap();
        let err = IndexSet::new(vec![idx("1[2]")], g.clone());
        assert!(matches!(err, Err(Error::NotDownwardClosed(_))));
        let c = IndexSet::closure(vec![idx("1[2][2[1]]")], g.clone()).unwrap();
        let again = IndexSet::closure(c.members().to_vec(), g).unwrap();
        assert_eq!(c, again);
        assert!(c.position(&idx("1[2]")).is_some());
        assert!(c.position(&idx("1[2[1]]")).is_some());
        assert!(c.position(&idx("1")).is_some());
    }

    #[test]
    fn monomial_values_run_example() {
        let d = IndexSet::running_example();
        let alpha = alpha_map(
            &d,
            &[
                ExactScalar::ratio(1, 3),
                ExactScalar::ratio(1, 5),
                ExactScalar::ratio(1, 7),
            ],
        )
        .unwrap();
        // v_{1[2]}(1) = (1/3){1/5} = 1/15
        let v = monomial_eval(
            &idx("1[2]"),
            &alpha,
            d.grading(),
            &ExactScalar::one(),
            DEFAULT_MAX_BITS,
        )
        .unwrap();
        assert_eq!(v, ExactScalar::ratio(1, 15));
        // full vector at t = 2: (2/3, 2/5, 4/15, 4/15, 4/7)
        let vv = v_vector(&d, &alpha, &ExactScalar::from_int(2), DEFAULT_MAX_BITS).unwrap();
        assert_eq!(
            vv,
            vec![
                ExactScalar::ratio(2, 3),
                ExactScalar::ratio(2, 5),
                ExactScalar::ratio(4, 15),
                ExactScalar::ratio(4, 15),
                ExactScalar::ratio(4, 7),
            ]
        );
        // and at t = 1: (1/3, 1/5, 1/15, 1/15, 1/7)
        let v1 = v_vector(&d, &alpha, &ExactScalar::one(), DEFAULT_MAX_BITS).unwrap();
        assert_eq!(
            v1,
            vec![
                ExactScalar::ratio(1, 3),
                ExactScalar::ratio(1, 5),
                ExactScalar::ratio(1, 15),
                ExactScalar::ratio(1, 15),
                ExactScalar::ratio(1, 7),
            ]
        );
        // t = 0 kills every monomial
        let v0 = v_vector(&d, &alpha, &ExactScalar::zero(), DEFAULT_MAX_BITS).unwrap();
        assert!(v0.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn singleton_set_vector() {
        let d = IndexSet::new(
            vec![BracketIndex::leaf(1)],
            Grading::new(&[(1, 1)]).unwrap(),
        )
        .unwrap();
        let alpha = alpha_map(&d, &[ExactScalar::one()]).unwrap();
        let v = v_vector(&d, &alpha, &ExactScalar::from_int(9), DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, vec![ExactScalar::from_int(9)]);
    }

    #[test]
    fn derivability_implies_height_and_degree_monotone() {
        let g = Grading::new(&[(1, 1), (2, 1), (3, 2), (4, 1), (5, 3)]).unwrap();
        let pool = [
            "1", "2", "3", "4", "5", "1[2]", "2[1]", "1[2][2]", "1[2[1]]", "3[1][2]",
            "5[4[1]]", "2[1][1]",
        ];
        for a in pool {
            for b in pool {
                let (na, nb) = (idx(a), idx(b));
                if derivable(&na, &nb) {
                    assert!(na.height() <= nb.height());
                    assert!(degree(&na, &g).unwrap() <= degree(&nb, &g).unwrap());
                }
            }
        }
    }
}
