//! Experiment harness: torus and generalised x k orbits, hitting sets,
//! density statistics, finite-sum (FS) witnesses, and the multiplier
//! searches. "Infinitely many n" is replaced by "some n in a configured
//! window" and reported as such; searches are exhaustive over their grids,
//! never randomized.

use crate::brackets::{alpha_map, v_vector, IndexSet};
use crate::error::{Error, Result};
use crate::genpoly::GenPoly;
use crate::scalar::{rational_to_string, ExactScalar};
use crate::semialg::SemialgebraicSet;
use crate::timesk;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Membership oracle for the target set of an experiment: a semialgebraic
/// set or the zero set of a generalised polynomial.
#[derive(Debug, Clone)]
pub enum ZeroSet {
    Semialgebraic(SemialgebraicSet),
    GenPolyZero(GenPoly),
}

impl ZeroSet {
    pub fn contains(&self, x: &[ExactScalar], max_bits: u32) -> Result<bool> {
        match self {
            ZeroSet::Semialgebraic(s) => s.contains(x, max_bits),
            ZeroSet::GenPolyZero(g) => Ok(g.eval(x, max_bits)?.is_zero()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ZeroSet::Semialgebraic(s) => format!(
                "semialgebraic ({} piece(s), complexity {})",
                s.pieces.len(),
                s.complexity()
            ),
            ZeroSet::GenPolyZero(g) => format!("zero set of {}", g.unparse()),
        }
    }
}

/// Orbit ({k^n x})_{n=0..N}, coordinatewise exact.
pub fn torus_orbit(
    x: &[ExactScalar],
    k: u64,
    n: usize,
    max_bits: u32,
) -> Result<Vec<Vec<ExactScalar>>> {
    let mut out = Vec::with_capacity(n + 1);
    let kv = ExactScalar::from_int(k as i64);
    let mut cur: Vec<ExactScalar> = x
        .iter()
        .map(|c| c.frac(max_bits))
        .collect::<Result<_>>()?;
    out.push(cur.clone());
    for _ in 0..n {
        cur = cur
            .iter()
            .map(|c| c.mul(&kv).frac(max_bits))
            .collect::<Result<_>>()?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Indices n with orbit[n] in S. Indeterminate comparisons are recorded per
/// index, not fatal.
pub fn hitting_times(
    orbit: &[Vec<ExactScalar>],
    s: &SemialgebraicSet,
    max_bits: u32,
) -> (Vec<usize>, Vec<(usize, Error)>) {
    let mut hits = Vec::new();
    let mut events = Vec::new();
    for (n, p) in orbit.iter().enumerate() {
        match s.contains(p, max_bits) {
            Ok(true) => hits.push(n),
            Ok(false) => {}
            Err(e) => events.push((n, e)),
        }
    }
    (hits, events)
}

/// Membership sample of E over [1, N] with the Banach scan configuration.
#[derive(Debug, Clone)]
pub struct DensityWindow {
    /// bits[i] says whether i+1 lies in E.
    pub bits: Vec<bool>,
    /// Banach sub-window length W.
    pub banach_len: usize,
    /// Offsets M scanned for the Banach estimate.
    pub offsets: Vec<usize>,
}

impl DensityWindow {
    pub fn from_members<I: IntoIterator<Item = u64>>(members: I, n: usize) -> Self {
        let mut bits = vec![false; n];
        for m in members {
            if (1..=n as u64).contains(&m) {
                bits[(m - 1) as usize] = true;
            }
        }
        let banach_len = (n / 10).max(1);
        let stride = (banach_len / 16).max(1);
        let offsets = (0..=n.saturating_sub(banach_len)).step_by(stride).collect();
        DensityWindow {
            bits,
            banach_len,
            offsets,
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityStats {
    /// max of |E cap [1,N']|/N' over the trailing half of the window.
    pub upper: String,
    /// min over the same range.
    pub lower: String,
    /// Full-window ratio |E cap [1,N]|/N, flagged as the natural-density
    /// estimate when upper - lower is below the tolerance.
    pub natural: Option<String>,
    /// max over offsets M of |E cap [M+1, M+W]|/W.
    pub banach_upper: String,
}

/// Window estimates for the upper, lower, natural and Banach densities.
pub fn density_stats(w: &DensityWindow, natural_tol: &BigRational) -> DensityStats {
    let n = w.bits.len();
    let mut prefix = vec![0usize; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + usize::from(w.bits[i]);
    }
    let ratio = |num: usize, den: usize| {
        BigRational::new(BigInt::from(num as i64), BigInt::from(den as i64))
    };
    let tail_start = (n / 2).max(1);
    let mut upper = ratio(prefix[tail_start], tail_start);
    let mut lower = upper.clone();
    for np in tail_start..=n {
        let r = ratio(prefix[np], np);
        if r > upper {
            upper = r.clone();
        }
        if r < lower {
            lower = r;
        }
    }
    let full = ratio(prefix[n], n);
    let natural = if (&upper - &lower) < *natural_tol {
        Some(rational_to_string(&full))
    } else {
        None
    };
    let wlen = w.banach_len.min(n).max(1);
    let mut banach = BigRational::from_integer(BigInt::from(0));
    for &m in &w.offsets {
        if m + wlen > n {
            continue;
        }
        let r = ratio(prefix[m + wlen] - prefix[m], wlen);
        if r > banach {
            banach = r;
        }
    }
    DensityStats {
        upper: rational_to_string(&upper),
        lower: rational_to_string(&lower),
        natural,
        banach_upper: rational_to_string(&banach),
    }
}

/// Set of finite sums of the given generators (nonempty subsets).
pub fn fs_set(generators: &[u64]) -> Result<BTreeSet<u64>> {
    if generators.len() > 20 {
        return Err(Error::InvalidInput(
            "at most 20 generators are supported".into(),
        ));
    }
    let mut sums = BTreeSet::new();
    for &g in generators {
        let mut next: BTreeSet<u64> = sums.iter().map(|s| s + g).collect();
        next.insert(g);
        sums.extend(next);
    }
    Ok(sums)
}

/// Some r generators whose finite sums all lie in E, found by depth-first
/// search over nondecreasing generator tuples, or None.
pub fn find_fs_subset(e: &BTreeSet<u64>, r: usize, bound: u64) -> Option<Vec<u64>> {
    fn dfs(
        e: &BTreeSet<u64>,
        r: usize,
        bound: u64,
        gens: &mut Vec<u64>,
        sums: &BTreeSet<u64>,
    ) -> Option<Vec<u64>> {
        if gens.len() == r {
            return Some(gens.clone());
        }
        let start = gens.last().copied().unwrap_or(1);
        for g in start..=bound {
            if !e.contains(&g) {
                continue;
            }
            let mut next = sums.clone();
            next.insert(g);
            let mut ok = true;
            for s in sums {
                let t = s + g;
                if t > bound || !e.contains(&t) {
                    ok = false;
                    break;
                }
                next.insert(t);
            }
            if !ok {
                continue;
            }
            gens.push(g);
            if let Some(found) = dfs(e, r, bound, gens, &next) {
                return Some(found);
            }
            gens.pop();
        }
        None
    }
    dfs(e, r, bound, &mut Vec::new(), &BTreeSet::new())
}

/// Multipliers found by a search, with the witnessing exponents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierHit {
    pub m: u64,
    pub witnesses: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionInfo {
    pub max_bits: u32,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: serde_json::Value,
    pub premise_check: bool,
    pub multipliers: Vec<MultiplierHit>,
    pub fs_probe: Option<Vec<u64>>,
    pub density: DensityStats,
    pub precision: PrecisionInfo,
}

/// All l <= l_max with {l k^n x} in S for every n in [n0, n1]. The premise
/// ({k^n x} in S on the window) is checked first.
pub fn multiplier_search_torus(
    x: &[ExactScalar],
    s: &SemialgebraicSet,
    k: u64,
    n_window: (u64, u64),
    l_max: u64,
    max_bits: u32,
) -> Result<ExperimentReport> {
    let (n0, n1) = n_window;
    if n1 < n0 {
        return Err(Error::InvalidInput("empty window".into()));
    }
    let base = torus_orbit(x, k, n1 as usize, max_bits)?;
    for n in n0..=n1 {
        if !s.contains(&base[n as usize], max_bits)? {
            return Err(Error::PremiseViolated(n));
        }
    }
    let kv = ExactScalar::from_int(k as i64);
    let check_l = |l: u64| -> Result<bool> {
        let mut cur: Vec<ExactScalar> = x
            .iter()
            .map(|c| c.mul(&ExactScalar::from_int(l as i64)).frac(max_bits))
            .collect::<Result<_>>()?;
        for n in 0..=n1 {
            if n >= n0 && !s.contains(&cur, max_bits)? {
                return Ok(false);
            }
            if n < n1 {
                cur = cur
                    .iter()
                    .map(|c| c.mul(&kv).frac(max_bits))
                    .collect::<Result<_>>()?;
            }
        }
        Ok(true)
    };
    let results: Vec<Result<(u64, bool)>> = (1..=l_max)
        .into_par_iter()
        .map(|l| check_l(l).map(|ok| (l, ok)))
        .collect();
    let mut found = Vec::new();
    let mut events = Vec::new();
    for r in results {
        match r {
            Ok((l, true)) => found.push(l),
            Ok((_, false)) => {}
            Err(e) => events.push(e.to_string()),
        }
    }
    found.sort_unstable();
    let window = DensityWindow::from_members(found.iter().copied(), l_max as usize);
    let density = density_stats(&window, &BigRational::new(BigInt::from(1), BigInt::from(100)));
    let fs_probe = find_fs_subset(&found.iter().copied().collect(), 3, l_max);
    Ok(ExperimentReport {
        params: serde_json::json!({
            "kind": "torus multiplier search",
            "x": x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "k": k,
            "n_window": [n0, n1],
            "l_max": l_max,
        }),
        premise_check: true,
        multipliers: found
            .into_iter()
            .map(|m| MultiplierHit {
                m,
                witnesses: (n0..=n1).collect(),
            })
            .collect(),
        fs_probe,
        density,
        precision: PrecisionInfo { max_bits, events },
    })
}

fn frac_point(v: &[ExactScalar], max_bits: u32) -> Result<Vec<ExactScalar>> {
    v.iter().map(|c| c.frac(max_bits)).collect()
}

/// Multiplier experiment over the generalised x k system: all m <= m_max
/// with k not dividing m such that {v^alpha(m k^n)} lies in the target set
/// for some n in the window. Each hit is computed both directly and through
/// T_k iteration of {v^alpha(m)}; the two paths must agree pointwise.
pub fn theorem_a_experiment(
    dset: &IndexSet,
    alpha: &[ExactScalar],
    zero_set: &ZeroSet,
    k: u64,
    m_max: u64,
    n_window: (u64, u64),
    max_bits: u32,
) -> Result<ExperimentReport> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let (n0, n1) = n_window;
    if n1 < n0 {
        return Err(Error::InvalidInput("empty window".into()));
    }
    let amap = alpha_map(dset, alpha)?;
    let value_at = |t: i64| -> Result<Vec<ExactScalar>> {
        v_vector(dset, &amap, &ExactScalar::from_int(t), max_bits)
    };
    // premise: {v^alpha(k^n)} in the set for every window n
    for n in n0..=n1 {
        let t = (k as i64).checked_pow(n as u32).ok_or_else(|| {
            Error::InvalidInput("k^n overflows the experiment range".into())
        })?;
        let p = frac_point(&value_at(t)?, max_bits)?;
        if !zero_set.contains(&p, max_bits)? {
            return Err(Error::PremiseViolated(n));
        }
    }
    let scan_m = |m: u64| -> Result<Option<MultiplierHit>> {
        if m % k == 0 {
            return Ok(None);
        }
        // path 1: T_k iteration from {v^alpha(m)}
        let mut cur = frac_point(&value_at(m as i64)?, max_bits)?;
        let mut witnesses = Vec::new();
        for n in 0..=n1 {
            // path 2: direct evaluation at m k^n
            let t = (m as i64)
                .checked_mul((k as i64).pow(n as u32))
                .ok_or_else(|| {
                    Error::InvalidInput("m*k^n overflows the experiment range".into())
                })?;
            let direct = frac_point(&value_at(t)?, max_bits)?;
            if direct != cur {
                return Err(Error::InvalidInput(format!(
                    "path disagreement at m={m}, n={n}"
                )));
            }
            if n >= n0 && zero_set.contains(&cur, max_bits)? {
                witnesses.push(n);
            }
            if n < n1 {
                cur = timesk::t_k(dset, k, &cur, max_bits)?.image;
            }
        }
        if witnesses.is_empty() {
            Ok(None)
        } else {
            Ok(Some(MultiplierHit { m, witnesses }))
        }
    };
    let results: Vec<Result<Option<MultiplierHit>>> =
        (1..=m_max).into_par_iter().map(scan_m).collect();
    let mut hits = Vec::new();
    let mut events = Vec::new();
    for r in results {
        match r {
            Ok(Some(h)) => hits.push(h),
            Ok(None) => {}
            Err(e @ Error::InvalidInput(_)) => return Err(e),
            Err(e) => events.push(e.to_string()),
        }
    }
    hits.sort_by_key(|h| h.m);
    let found: BTreeSet<u64> = hits.iter().map(|h| h.m).collect();
    let window = DensityWindow::from_members(found.iter().copied(), m_max as usize);
    let density = density_stats(&window, &BigRational::new(BigInt::from(1), BigInt::from(100)));
    let fs_probe = find_fs_subset(&found, 3, m_max);
    Ok(ExperimentReport {
        params: serde_json::json!({
            "kind": "generalised multiplier experiment",
            "D": dset.to_json(),
            "alpha": alpha.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "set": zero_set.describe(),
            "k": k,
            "m_max": m_max,
            "n_window": [n0, n1],
        }),
        premise_check: true,
        multipliers: hits,
        fs_probe,
        density,
        precision: PrecisionInfo { max_bits, events },
    })
}

/// Re-verify every reported (m, n) pair by fresh direct evaluation at
/// doubled precision.
pub fn verify_experiment(
    dset: &IndexSet,
    alpha: &[ExactScalar],
    zero_set: &ZeroSet,
    k: u64,
    report: &ExperimentReport,
    max_bits: u32,
) -> Result<bool> {
    let amap = alpha_map(dset, alpha)?;
    let bits = max_bits * 2;
    for hit in &report.multipliers {
        for &n in &hit.witnesses {
            let t = (hit.m as i64) * (k as i64).pow(n as u32);
            let v = v_vector(dset, &amap, &ExactScalar::from_int(t), bits)?;
            let p = frac_point(&v, bits)?;
            if !zero_set.contains(&p, bits)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Orbit CSV: header n, coordinate names; exact rational/constructed text.
pub fn orbit_to_csv(orbit: &[Vec<ExactScalar>], names: &[String]) -> String {
    let mut out = String::from("n");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (n, p) in orbit.iter().enumerate() {
        out.push_str(&n.to_string());
        for c in p {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push('\n');
    }
    out
}
