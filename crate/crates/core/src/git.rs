//! Exact GIT for torus weight systems: μ-weights, Hilbert–Mumford
//! classification with certificates, unstable loci, stabilizers, strata,
//! compactness.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lp::{box_minimize, fm_solve, nonneg_solution, simplex_max, Inequality, LpOutcome};
use crate::rational::{primitive_integer, q, Q};
use crate::rep::{AmbientPoint, Cocharacter, Coordinate, IndexSet, WeightSystem};
use crate::snf::{from_i64, smith};

pub const DEFAULT_ENUMERATION_BOUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Stable,
    StrictlySemistable,
    Unstable,
}

impl Status {
    pub fn is_semistable(self) -> bool {
        self != Status::Unstable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Stable => "stable",
            Status::StrictlySemistable => "strictly-semistable",
            Status::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub status: Status,
    /// Primitive integer cocharacter; present unless the status is stable.
    pub certificate: Option<Cocharacter>,
}

impl StabilityVerdict {
    /// Re-checks the certificate against `support` in exact arithmetic.
    pub fn certificate_valid(&self, w: &WeightSystem, support: &IndexSet) -> bool {
        match (&self.status, &self.certificate) {
            (Status::Stable, None) => true,
            (Status::Stable, Some(_)) => false,
            (_, None) => false,
            (status, Some(c)) => {
                let Some(xi) = c.as_exact() else { return false };
                if xi.iter().all(Zero::is_zero) || xi.len() != w.rank() {
                    return false;
                }
                let lam = w.lambdas_exact(xi);
                if support.iter().any(|&i| lam[i].is_negative()) {
                    return false;
                }
                let t = w.theta_pairing(xi);
                match status {
                    Status::Unstable => t.is_negative(),
                    _ => !t.is_positive(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MuWeight {
    Finite(Q),
    Infinite,
}

impl MuWeight {
    pub fn to_f64(&self) -> f64 {
        match self {
            MuWeight::Finite(v) => crate::rational::to_f64(v),
            MuWeight::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for MuWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MuWeight::Finite(v) => f.write_str(&crate::rational::format_rational(v)),
            MuWeight::Infinite => f.write_str("+inf"),
        }
    }
}

fn rows_of(w: &WeightSystem, s: &IndexSet) -> Vec<Vec<Q>> {
    s.iter().map(|&i| w.weight(i).iter().map(|&b| q(b)).collect()).collect()
}

fn check_support(w: &WeightSystem, s: &IndexSet) -> Result<()> {
    match s.iter().next_back() {
        Some(&m) if m >= w.n() => Err(Error::Precondition(format!("index {m} out of range for n = {}", w.n()))),
        _ => Ok(()),
    }
}

pub fn mu_weight_support(w: &WeightSystem, s: &IndexSet, xi: &[Q]) -> Result<MuWeight> {
    w.check_xi(xi.len())?;
    check_support(w, s)?;
    let lam = w.lambdas_exact(xi);
    if s.iter().any(|&i| lam[i].is_negative()) {
        return Ok(MuWeight::Infinite);
    }
    Ok(MuWeight::Finite(w.theta_pairing(xi)))
}

/// μ-weight of `(v, ξ)`: `+∞` if `β^i(ξ) < 0` on the support, else `⟨θ,ξ⟩`.
pub fn mu_weight<C: Coordinate>(w: &WeightSystem, v: &AmbientPoint<C>, xi: &Cocharacter) -> Result<MuWeight> {
    check_len(w.n(), v.len())?;
    let xi = xi.as_exact().ok_or_else(|| Error::Precondition("mu_weight needs an exact cocharacter".into()))?;
    mu_weight_support(w, &v.support(), xi)
}

/// A nonzero `ξ` with `B_S ξ ≥ 0` and `⟨θ,ξ⟩ ≤ 0`, if any.
fn nonzero_cone_witness(w: &WeightSystem, s: &IndexSet) -> Option<Vec<Q>> {
    let k = w.rank();
    let mut base: Vec<Inequality> = rows_of(w, s).into_iter().map(|r| Inequality::ge(r, Q::zero())).collect();
    base.push(Inequality::ge(w.theta().iter().map(|t| -t).collect(), Q::zero()));
    for a in 0..k {
        for sign in [1i64, -1] {
            let mut sys = base.clone();
            let mut e = vec![Q::zero(); k];
            e[a] = q(sign);
            sys.push(Inequality::ge(e, Q::one()));
            if let Some(x) = fm_solve(k, &sys) {
                return Some(x);
            }
        }
    }
    None
}

fn certificate(xi: &[Q]) -> Option<Cocharacter> {
    primitive_integer(xi).map(|v| Cocharacter::integer(&v))
}

/// Classifies any point with support `s`.
pub fn classify_support(w: &WeightSystem, s: &IndexSet) -> Result<StabilityVerdict> {
    check_support(w, s)?;
    let (xi, value) = box_minimize(&rows_of(w, s), w.theta());
    if value.is_negative() {
        return Ok(StabilityVerdict { status: Status::Unstable, certificate: certificate(&xi) });
    }
    Ok(match nonzero_cone_witness(w, s) {
        Some(xi) => StabilityVerdict { status: Status::StrictlySemistable, certificate: certificate(&xi) },
        None => StabilityVerdict { status: Status::Stable, certificate: None },
    })
}

pub fn classify_point<C: Coordinate>(w: &WeightSystem, v: &AmbientPoint<C>) -> Result<StabilityVerdict> {
    check_len(w.n(), v.len())?;
    classify_support(w, &v.support())
}

/// Nonnegative `c` with `Σ c_i β^i = θ` over `i ∈ s`, if `θ` lies in the cone.
pub fn cone_membership(w: &WeightSystem, s: &IndexSet) -> Result<Option<Vec<Q>>> {
    check_support(w, s)?;
    let k = w.rank();
    let idx: Vec<usize> = s.iter().copied().collect();
    let a: Vec<Vec<Q>> = (0..k).map(|r| idx.iter().map(|&i| q(w.weight(i)[r])).collect()).collect();
    if idx.is_empty() {
        return Ok(w.theta().iter().all(Zero::is_zero).then(Vec::new));
    }
    Ok(nonneg_solution(&a, w.theta()))
}

/// Points with support `s` have closed orbits meeting `μ = 0`: `θ = Σ c_i β^i`
/// with every `c_i > 0`.
pub fn polystable_support(w: &WeightSystem, s: &IndexSet) -> Result<bool> {
    check_support(w, s)?;
    if cone_membership(w, s)?.is_none() {
        return Ok(false);
    }
    let idx: Vec<usize> = s.iter().copied().collect();
    let a: Vec<Vec<Q>> = (0..w.rank()).map(|r| idx.iter().map(|&i| q(w.weight(i)[r])).collect()).collect();
    // The feasible set is a polyhedron; it meets the open orthant iff each
    // coordinate is positive somewhere on it.
    for j in 0..idx.len() {
        let mut c = vec![Q::zero(); idx.len()];
        c[j] = Q::one();
        match simplex_max(&a, w.theta(), &c) {
            LpOutcome::Optimal { value, .. } if !value.is_positive() => return Ok(false),
            LpOutcome::Infeasible => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

/// `θ ∈ Cone{β^i : i ∈ s}`.
pub fn semistable_support(w: &WeightSystem, s: &IndexSet) -> Result<bool> {
    Ok(cone_membership(w, s)?.is_some())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StabilizerInfo {
    pub subtorus_rank: usize,
    pub finite_invariants: Vec<u64>,
}

impl StabilizerInfo {
    pub fn is_trivial(&self) -> bool {
        self.subtorus_rank == 0 && self.finite_invariants.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.subtorus_rank == 0
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.finite_invariants.iter().try_fold(1u64, |acc, d| acc.checked_mul(*d))
    }

    pub fn describe(&self) -> String {
        let finite: Vec<String> = self.finite_invariants.iter().map(|d| format!("Z/{d}")).collect();
        match (self.subtorus_rank, finite.is_empty()) {
            (0, true) => "trivial".into(),
            (0, false) => finite.join(" x "),
            (r, true) => format!("T^{r}"),
            (r, false) => format!("T^{r} x {}", finite.join(" x ")),
        }
    }
}

fn weight_matrix(w: &WeightSystem, s: &IndexSet) -> Vec<Vec<i64>> {
    (0..w.rank()).map(|r| s.iter().map(|&i| w.weight(i)[r]).collect()).collect()
}

/// Stabilizer of a point with support `s`, from the Smith form of `B_S`.
pub fn stabilizer(w: &WeightSystem, s: &IndexSet) -> Result<StabilizerInfo> {
    check_support(w, s)?;
    let snf = smith(&from_i64(&weight_matrix(w, s)));
    Ok(StabilizerInfo {
        subtorus_rank: w.rank() - snf.rank(),
        finite_invariants: snf.torsion().iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect(),
    })
}

/// Rank of `{β^i : i ∈ s}` over `Q`.
pub fn weight_rank(w: &WeightSystem, s: &IndexSet) -> usize {
    if s.is_empty() {
        return 0;
    }
    smith(&from_i64(&weight_matrix(w, s))).rank()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    /// `⟨θ,ξ⟩ < 0`: the unstable locus.
    Unstable,
    /// `ξ ≠ 0`, `⟨θ,ξ⟩ ≤ 0`: the complement of the stable locus.
    NonStable,
}

fn check_bound(n: usize, bound: usize) -> Result<()> {
    if n > bound || n > 63 {
        return Err(Error::BoundExceeded { n, bound: bound.min(63) });
    }
    Ok(())
}

fn locus_feasible(k: usize, sys: &[Inequality], locus: Locus) -> bool {
    match locus {
        Locus::Unstable => fm_solve(k, sys).is_some(),
        Locus::NonStable => (0..k).any(|a| {
            [1i64, -1].iter().any(|&sign| {
                let mut e = vec![Q::zero(); k];
                e[a] = q(sign);
                let mut s = sys.to_vec();
                s.push(Inequality::ge(e, Q::one()));
                fm_solve(k, &s).is_some()
            })
        }),
    }
}

/// All distinct subspaces `V^{ξ ≥ 0} = {i : β^i(ξ) ≥ 0}` as `ξ` ranges over
/// the locus, found by walking the sign chambers of `{β^i(ξ) = 0}`.
/// Sorted lexicographically.
pub fn destabilizing_subspaces(w: &WeightSystem, locus: Locus, bound: usize) -> Result<Vec<IndexSet>> {
    check_bound(w.n(), bound)?;
    let k = w.rank();
    let theta_neg: Vec<Q> = w.theta().iter().map(|t| -t).collect();
    let root = match locus {
        Locus::Unstable => Inequality::gt(theta_neg, Q::zero()),
        Locus::NonStable => Inequality::ge(theta_neg, Q::zero()),
    };
    let mut out = Vec::new();
    let mut stack = vec![(0usize, vec![root], IndexSet::new())];
    if !locus_feasible(k, &stack[0].1, locus) {
        return Ok(out);
    }
    while let Some((i, sys, set)) = stack.pop() {
        if i == w.n() {
            out.push(set);
            continue;
        }
        let row: Vec<Q> = w.weight(i).iter().map(|&b| q(b)).collect();
        let neg: Vec<Q> = row.iter().map(|v| -v).collect();
        let mut inside = sys.clone();
        inside.push(Inequality::ge(row, Q::zero()));
        let mut outside = sys;
        outside.push(Inequality::gt(neg, Q::zero()));
        if locus_feasible(k, &outside, locus) {
            stack.push((i + 1, outside, set.clone()));
        }
        if locus_feasible(k, &inside, locus) {
            let mut s = set;
            s.insert(i);
            stack.push((i + 1, inside, s));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn maximal_only(mut sets: Vec<IndexSet>) -> Vec<IndexSet> {
    let all = sets.clone();
    sets.retain(|s| !all.iter().any(|t| t != s && s.is_subset(t)));
    sets
}

/// Inclusion-maximal supports `S` such that every point with support in `S`
/// is unstable.
pub fn unstable_maximal_supports(w: &WeightSystem, bound: usize) -> Result<Vec<IndexSet>> {
    Ok(maximal_only(destabilizing_subspaces(w, Locus::Unstable, bound)?))
}

pub(crate) fn mask_of(s: &IndexSet) -> u64 {
    s.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

pub(crate) fn set_of(mask: u64, n: usize) -> IndexSet {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Membership oracle for the semistable locus, valid for supports of `w`.
#[derive(Debug, Clone)]
pub struct SemistableOracle {
    n: usize,
    unstable_masks: Vec<u64>,
}

impl SemistableOracle {
    pub fn new(w: &WeightSystem, bound: usize) -> Result<Self> {
        let unstable_masks = unstable_maximal_supports(w, bound)?.iter().map(mask_of).collect();
        Ok(Self { n: w.n(), unstable_masks })
    }

    pub fn is_semistable_mask(&self, mask: u64) -> bool {
        !self.unstable_masks.iter().any(|&u| mask & !u == 0)
    }

    pub fn is_semistable(&self, s: &IndexSet) -> bool {
        self.is_semistable_mask(mask_of(s))
    }

    /// All semistable supports, as bitmasks in increasing order.
    pub fn semistable_masks(&self) -> Vec<u64> {
        (0..1u64 << self.n).filter(|&m| self.is_semistable_mask(m)).collect()
    }
}

pub fn semistable_supports(w: &WeightSystem, bound: usize) -> Result<Vec<IndexSet>> {
    let oracle = SemistableOracle::new(w, bound)?;
    Ok(oracle.semistable_masks().into_iter().map(|m| set_of(m, w.n())).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub offending: Option<IndexSet>,
    pub stabilizer: Option<StabilizerInfo>,
}

/// Smooth iff every semistable support has trivial stabilizer.
pub fn quotient_smooth(w: &WeightSystem, bound: usize) -> Result<SmoothnessReport> {
    let oracle = SemistableOracle::new(w, bound)?;
    let masks = oracle.semistable_masks();
    let bad =
        masks.par_iter().find_first(|&&m| stabilizer(w, &set_of(m, w.n())).map(|s| !s.is_trivial()).unwrap_or(false));
    Ok(match bad {
        Some(&m) => {
            let s = set_of(m, w.n());
            let st = stabilizer(w, &s)?;
            SmoothnessReport { smooth: false, offending: Some(s), stabilizer: Some(st) }
        }
        None => SmoothnessReport { smooth: true, offending: None, stabilizer: None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub compact: bool,
    /// `ξ` with `β^i(ξ) > 0` for all `i` (present iff compact).
    pub positive_cocharacter: Option<Vec<i64>>,
    /// `s ≥ 0`, `Σ s_i = 1`, `Σ s_i β^i = 0` (present iff not compact).
    #[serde(with = "opt_q_vec")]
    pub relation: Option<Vec<Q>>,
}

mod opt_q_vec {
    use crate::rational::{format_rational, parse_rational, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Q>>, D::Error> {
        let v = Option::<Vec<String>>::deserialize(d)?;
        v.map(|v| v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()).transpose()
    }
}

/// Compactness of `μ^{-1}(0)`: the recession cone `{s ≥ 0 : Σ s_i β^i = 0}`
/// is trivial.
pub fn quotient_compact(w: &WeightSystem) -> CompactnessReport {
    let k = w.rank();
    let n = w.n();
    let mut a: Vec<Vec<Q>> = (0..k).map(|r| (0..n).map(|i| q(w.weight(i)[r])).collect()).collect();
    a.push(vec![Q::one(); n]);
    let mut b = vec![Q::zero(); k];
    b.push(Q::one());
    let relation = nonneg_solution(&a, &b);
    let positive = if relation.is_none() {
        let sys: Vec<Inequality> =
            w.weights().iter().map(|r| Inequality::gt(r.iter().map(|&x| q(x)).collect(), Q::zero())).collect();
        fm_solve(k, &sys).and_then(|xi| primitive_integer(&xi))
    } else {
        None
    };
    debug_assert!(relation.is_some() != positive.is_some(), "Gordan alternative violated");
    CompactnessReport { compact: relation.is_none(), positive_cocharacter: positive, relation }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub stabilizer: StabilizerInfo,
    pub supports: Vec<IndexSet>,
    pub open: bool,
}

/// Semistable supports grouped by stabilizer; trivial stabilizer first.
pub fn kahler_strata(w: &WeightSystem, bound: usize) -> Result<Vec<StratumRecord>> {
    let oracle = SemistableOracle::new(w, bound)?;
    strata_from_masks(w, &oracle.semistable_masks(), w.n())
}

pub(crate) fn strata_from_masks(w: &WeightSystem, masks: &[u64], n: usize) -> Result<Vec<StratumRecord>> {
    let stabs: Vec<Result<StabilizerInfo>> = masks.par_iter().map(|&m| stabilizer(w, &set_of(m, n))).collect();
    let mut groups: BTreeMap<StabilizerInfo, Vec<IndexSet>> = BTreeMap::new();
    for (&m, st) in masks.iter().zip(stabs) {
        groups.entry(st?).or_default().push(set_of(m, n));
    }
    // BTreeMap order puts (0, []) first, which is the trivial stabilizer.
    Ok(groups
        .into_iter()
        .map(|(stabilizer, supports)| StratumRecord { open: stabilizer.is_trivial(), stabilizer, supports })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;
    use crate::rep::ExactAmbientPoint;
    use num_complex::Complex;

    fn hirzebruch(n: i64) -> WeightSystem {
        WeightSystem::new(2, vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![-n, 1]], vec![q_frac(1, 2), q_frac(1, 2)])
            .unwrap()
    }

    fn pt(v: &[i64]) -> ExactAmbientPoint {
        AmbientPoint::new(v.iter().map(|&x| Complex::new(q(x), q(0))).collect())
    }

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn mu_weight_examples() {
        let w = hirzebruch(1);
        let v = pt(&[1, 0, 0, 0]);
        assert_eq!(mu_weight(&w, &v, &Cocharacter::integer(&[0, -1])).unwrap(), MuWeight::Finite(q_frac(-1, 2)));
        assert_eq!(mu_weight(&w, &v, &Cocharacter::integer(&[-1, 0])).unwrap(), MuWeight::Infinite);
        let z = pt(&[0, 0, 0, 0]);
        assert_eq!(mu_weight(&w, &z, &Cocharacter::integer(&[3, 1])).unwrap(), MuWeight::Finite(q(2)));
        assert!(mu_weight(&w, &pt(&[1, 0]), &Cocharacter::integer(&[1, 0])).is_err());
    }

    #[test]
    fn classify_examples() {
        let w = hirzebruch(1);
        let v = pt(&[1, 1, 0, 0]);
        let verdict = classify_point(&w, &v).unwrap();
        assert_eq!(verdict.status, Status::Unstable);
        assert!(verdict.certificate_valid(&w, &v.support()));
        assert_eq!(classify_point(&w, &pt(&[1, 0, 1, 0])).unwrap().status, Status::Stable);
        assert_eq!(classify_point(&w, &pt(&[0, 0, 0, 0])).unwrap().status, Status::Unstable);
    }

    #[test]
    fn strictly_semistable_when_theta_on_boundary() {
        // θ = β^0 on a ray: semistable but the stabilizer direction is free.
        let w = WeightSystem::new(2, vec![vec![1, 0], vec![0, 1]], vec![q(1), q(0)]).unwrap();
        let v = classify_support(&w, &set(&[0, 1])).unwrap();
        assert_eq!(v.status, Status::StrictlySemistable);
        assert!(v.certificate_valid(&w, &set(&[0, 1])));
    }

    #[test]
    fn polystability() {
        let w = WeightSystem::new(2, vec![vec![1, 0], vec![0, 1]], vec![q(1), q(0)]).unwrap();
        assert!(!polystable_support(&w, &set(&[0, 1])).unwrap());
        assert!(polystable_support(&w, &set(&[0])).unwrap());
        assert!(polystable_support(&hirzebruch(1), &set(&[0, 1, 2, 3])).unwrap());
        assert!(!polystable_support(&hirzebruch(1), &set(&[0, 1])).unwrap());
    }

    #[test]
    fn hirzebruch_unstable_subspaces() {
        let w = hirzebruch(1);
        let all = destabilizing_subspaces(&w, Locus::Unstable, 20).unwrap();
        assert_eq!(all, vec![set(&[]), set(&[0, 1]), set(&[2, 3]), set(&[3])]);
        let max = unstable_maximal_supports(&w, 20).unwrap();
        assert_eq!(max, vec![set(&[0, 1]), set(&[2, 3])]);
    }

    #[test]
    fn single_weight_origin_only() {
        let w = WeightSystem::new(1, vec![vec![1]], vec![q_frac(1, 2)]).unwrap();
        assert_eq!(unstable_maximal_supports(&w, 20).unwrap(), vec![set(&[])]);
    }

    #[test]
    fn doubled_hirzebruch_table() {
        for n in 1..=3 {
            let d = hirzebruch(n).doubled();
            let all = destabilizing_subspaces(&d, Locus::Unstable, 20).unwrap();
            let nonzero: Vec<_> = all.iter().filter(|s| !s.is_empty()).collect();
            assert_eq!(nonzero.len(), 7, "n = {n}: {all:?}");
            let max = unstable_maximal_supports(&d, 20).unwrap();
            assert_eq!(max.len(), 3, "n = {n}: {max:?}");
        }
    }

    #[test]
    fn semistable_support_examples() {
        let w = hirzebruch(1);
        assert!(semistable_support(&w, &set(&[0, 2])).unwrap());
        assert!(!semistable_support(&w, &set(&[0, 1])).unwrap());
        assert!(semistable_support(&w, &set(&[0, 1, 2, 3])).unwrap());
        let oracle = SemistableOracle::new(&w, 20).unwrap();
        for m in 0..16u64 {
            let s = set_of(m, 4);
            assert_eq!(oracle.is_semistable(&s), semistable_support(&w, &s).unwrap(), "{s:?}");
        }
    }

    #[test]
    fn stabilizer_examples() {
        let w = hirzebruch(1);
        assert!(stabilizer(&w, &set(&[0, 2])).unwrap().is_trivial());
        let full = stabilizer(&w, &set(&[])).unwrap();
        assert_eq!(full.subtorus_rank, 2);
        for n in 2..=5 {
            let d = hirzebruch(n).doubled();
            let st = stabilizer(&d, &set(&[2, 7])).unwrap();
            assert_eq!(st.finite_invariants, vec![n as u64]);
            assert_eq!(st.order(), Some(n as u64));
        }
    }

    #[test]
    fn smoothness_examples() {
        assert!(quotient_smooth(&hirzebruch(1), 20).unwrap().smooth);
        let w = WeightSystem::new(1, vec![vec![2]], vec![q(1)]).unwrap();
        let r = quotient_smooth(&w, 20).unwrap();
        assert!(!r.smooth);
        assert_eq!(r.stabilizer.unwrap().finite_invariants, vec![2]);
        let w = WeightSystem::new(1, vec![vec![1], vec![1]], vec![q_frac(1, 2)]).unwrap();
        assert!(quotient_smooth(&w, 20).unwrap().smooth);
    }

    #[test]
    fn compactness_examples() {
        let c = quotient_compact(&hirzebruch(1));
        assert!(c.compact);
        let xi = c.positive_cocharacter.unwrap();
        for b in hirzebruch(1).weights() {
            assert!(b[0] * xi[0] + b[1] * xi[1] > 0);
        }
        let w = WeightSystem::new(1, vec![vec![1], vec![-1]], vec![q(0)]).unwrap();
        let c = quotient_compact(&w);
        assert!(!c.compact);
        assert_eq!(c.relation.unwrap(), vec![q_frac(1, 2), q_frac(1, 2)]);
        let w = WeightSystem::new(1, vec![vec![1]], vec![q(1)]).unwrap();
        assert!(quotient_compact(&w).compact);
    }

    #[test]
    fn strata_examples() {
        let s = kahler_strata(&hirzebruch(1), 20).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].open && s[0].stabilizer.is_trivial());
        let w = WeightSystem::new(1, vec![vec![1], vec![2]], vec![q(1)]).unwrap();
        let s = kahler_strata(&w, 20).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s[0].open);
        assert_eq!(s[1].stabilizer.finite_invariants, vec![2]);
        assert_eq!(s[1].supports, vec![set(&[1])]);
        let w = WeightSystem::new(1, vec![vec![1]], vec![q(-1)]).unwrap();
        assert!(kahler_strata(&w, 20).unwrap().is_empty());
    }

    #[test]
    fn bound_is_enforced() {
        let w = WeightSystem::new(1, vec![vec![1]; 5], vec![q(1)]).unwrap();
        assert!(matches!(unstable_maximal_supports(&w, 4), Err(Error::BoundExceeded { .. })));
    }
}
