//! Hyperkähler stratum candidates for `(T*V)///C`, sampling certification,
//! and the Hirzebruch surface verification suite.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::git::{
    classify_support, destabilizing_subspaces, set_of, stabilizer, unstable_maximal_supports, weight_rank, Locus,
    SemistableOracle, StabilizerInfo, Status,
};
use crate::kn::{solve_hyperkahler, KnConfig};
use crate::moment::{hol_moment, mu_hyperkahler, norm};
use crate::rational::{q, q_frac, to_f64, Q};
use crate::rep::{CotangentPoint, IndexSet, WeightSystem};
use crate::snf::{from_i64, smith};

pub const HK_ENUMERATION_BOUND: usize = 12;
pub const CERTIFY_SEEDS: usize = 64;
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateStatus {
    Certified,
    Candidate,
    Refuted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HkStratumCandidate {
    /// `(S_x, S_z)`.
    pub support_pair: (IndexSet, IndexSet),
    pub stabilizer: StabilizerInfo,
    pub status: CandidateStatus,
    pub witness: Option<CotangentPoint>,
    /// Seeds tried by the last certification run.
    pub attempts: usize,
}

impl HkStratumCandidate {
    pub fn new(w: &WeightSystem, sx: IndexSet, sz: IndexSet) -> Result<Self> {
        let n = w.n();
        let union: IndexSet = sx.union(&sz).copied().collect();
        let stabilizer = stabilizer(w, &union)?;
        if sx.iter().chain(&sz).any(|&i| i >= n) {
            return Err(Error::Precondition("support index out of range".into()));
        }
        Ok(Self { support_pair: (sx, sz), stabilizer, status: CandidateStatus::Candidate, witness: None, attempts: 0 })
    }
}

/// `𝓜 = 0` admits solutions with `x_i z_i ≠ 0` exactly on `t`: every index of
/// `t` lies in the support of some linear relation among `{β^i : i ∈ t}`.
pub fn relation_consistent(w: &WeightSystem, t: &IndexSet) -> bool {
    let r = weight_rank(w, t);
    t.iter().all(|i| {
        let mut s = t.clone();
        s.remove(i);
        weight_rank(w, &s) == r
    })
}

fn doubled_mask(sx: u64, sz: u64, n: usize) -> u64 {
    sx | (sz << n)
}

/// Exact necessary conditions for `(S_x, S_z)` to meet `μ_hk^{-1}(0)`.
pub fn pair_passes(w: &WeightSystem, sx: &IndexSet, sz: &IndexSet) -> Result<bool> {
    let d = w.doubled();
    let ds: IndexSet = sx.iter().copied().chain(sz.iter().map(|i| i + w.n())).collect();
    if !classify_support(&d, &ds)?.status.is_semistable() {
        return Ok(false);
    }
    Ok(relation_consistent(w, &sx.intersection(sz).copied().collect()))
}

/// All support pairs passing the exact necessary conditions, ordered by
/// stabilizer signature (trivial first), then by `(S_x, S_z)` bitmasks.
pub fn hk_candidate_strata(w: &WeightSystem, bound: usize) -> Result<Vec<HkStratumCandidate>> {
    let n = w.n();
    if n > bound.min(HK_ENUMERATION_BOUND) {
        return Err(Error::BoundExceeded { n, bound: bound.min(HK_ENUMERATION_BOUND) });
    }
    let d = w.doubled();
    let oracle = SemistableOracle::new(&d, 2 * n)?;
    let full = 1u64 << n;
    let consistent: Vec<bool> = (0..full).into_par_iter().map(|t| relation_consistent(w, &set_of(t, n))).collect();
    let stabs: Vec<StabilizerInfo> =
        (0..full).into_par_iter().map(|m| stabilizer(w, &set_of(m, n))).collect::<Result<_>>()?;
    let mut groups: BTreeMap<StabilizerInfo, Vec<(u64, u64)>> = BTreeMap::new();
    for sx in 0..full {
        for sz in 0..full {
            if !consistent[(sx & sz) as usize] || !oracle.is_semistable_mask(doubled_mask(sx, sz, n)) {
                continue;
            }
            groups.entry(stabs[(sx | sz) as usize].clone()).or_default().push((sx, sz));
        }
    }
    Ok(groups
        .into_iter()
        .flat_map(|(st, pairs)| {
            pairs.into_iter().map(move |(sx, sz)| HkStratumCandidate {
                support_pair: (set_of(sx, n), set_of(sz, n)),
                stabilizer: st.clone(),
                status: CandidateStatus::Candidate,
                witness: None,
                attempts: 0,
            })
        })
        .collect())
}

/// Candidates grouped by stabilizer signature.
pub fn group_by_stabilizer(c: &[HkStratumCandidate]) -> Vec<(StabilizerInfo, Vec<&HkStratumCandidate>)> {
    let mut groups: BTreeMap<StabilizerInfo, Vec<&HkStratumCandidate>> = BTreeMap::new();
    for cand in c {
        groups.entry(cand.stabilizer.clone()).or_default().push(cand);
    }
    groups.into_iter().collect()
}

/// Real basis of `{c ∈ R^t : Σ c_i β^i = 0}`, columns indexed like `t`.
fn relation_basis(w: &WeightSystem, t: &[usize]) -> DMatrix<f64> {
    let k = w.rank();
    if t.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    let b = DMatrix::from_fn(k.max(t.len()), t.len(), |r, c| if r < k { w.weight(t[c])[r] as f64 } else { 0.0 });
    let svd = b.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.amax().max(1.0);
    let null: Vec<usize> = (0..t.len()).filter(|&j| svd.singular_values[j] <= 1e-9 * smax).collect();
    DMatrix::from_fn(t.len(), null.len(), |r, c| vt[(null[c], r)])
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let modulus = (rng.random_range(-1.5f64..1.5)).exp();
    Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU))
}

/// A random point with supports exactly `(S_x, S_z)` and `𝓜 = 0`.
pub fn seed_point<R: Rng>(w: &WeightSystem, sx: &IndexSet, sz: &IndexSet, rng: &mut R) -> CotangentPoint {
    let n = w.n();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let mut z = vec![zero; n];
    for &i in sx {
        x[i] = random_complex(rng);
    }
    for &i in sz {
        z[i] = random_complex(rng);
    }
    let t: Vec<usize> = sx.intersection(sz).copied().collect();
    if !t.is_empty() {
        let basis = relation_basis(w, &t);
        let coef: Vec<Complex64> = (0..basis.ncols()).map(|_| random_complex(rng)).collect();
        for (r, &i) in t.iter().enumerate() {
            let c: Complex64 = (0..basis.ncols()).map(|j| coef[j] * basis[(r, j)]).sum();
            z[i] = c / x[i];
        }
    }
    CotangentPoint { x, z }
}

/// Searches for a witness on `μ_hk^{-1}(0)` with the candidate's supports.
/// Only exact failures of the necessary conditions refute; sampling failures
/// leave the status at `candidate`.
pub fn certify_stratum(w: &WeightSystem, cand: &HkStratumCandidate, seed: u64) -> Result<HkStratumCandidate> {
    let (sx, sz) = &cand.support_pair;
    let mut out = cand.clone();
    out.witness = None;
    if !pair_passes(w, sx, sz)? {
        out.status = CandidateStatus::Refuted;
        out.attempts = 0;
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = KnConfig::default();
    for attempt in 1..=CERTIFY_SEEDS {
        let p = seed_point(w, sx, sz, &mut rng);
        let m = norm(&hol_moment(w, &p)?.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>());
        if m >= 1e-10 {
            continue;
        }
        let Ok(res) = solve_hyperkahler(w, &p, &cfg) else { continue };
        let Some(rep) = res.representative else { continue };
        if rep.support() != (sx.clone(), sz.clone()) {
            continue;
        }
        if norm(&mu_hyperkahler(w, &rep)?) < WITNESS_TOL {
            out.status = CandidateStatus::Certified;
            out.witness = Some(rep);
            out.attempts = attempt;
            return Ok(out);
        }
    }
    out.status = CandidateStatus::Candidate;
    out.attempts = CERTIFY_SEEDS;
    Ok(out)
}

/// Rational phases `α ∈ Q^k` with `Σ_a β^i_a α_a ≡ δ_i (mod 1)` for `i ∈ s`,
/// i.e. the compact torus element `exp(2π√-1 α)` multiplies coordinate `i`
/// by `exp(2π√-1 δ_i)`. `None` when no such element exists.
pub fn phase_solve(w: &WeightSystem, s: &[usize], delta: &[Q]) -> Option<Vec<Q>> {
    let k = w.rank();
    let m: Vec<Vec<i64>> = s.iter().map(|&i| w.weight(i).to_vec()).collect();
    let snf = smith(&from_i64(&m));
    let to_q = |b: &num_bigint::BigInt| Q::from_integer(b.clone());
    let ud: Vec<Q> =
        snf.u.iter().map(|row| row.iter().zip(delta).fold(Q::zero(), |acc, (u, d)| acc + to_q(u) * d)).collect();
    let r = snf.rank();
    if ud[r..].iter().any(|v| !v.is_integer()) {
        return None;
    }
    let beta: Vec<Q> = (0..k).map(|j| if j < r { &ud[j] / to_q(&snf.diagonal[j]) } else { Q::zero() }).collect();
    let alpha: Vec<Q> =
        snf.v.iter().map(|row| row.iter().zip(&beta).fold(Q::zero(), |acc, (v, b)| acc + to_q(v) * b)).collect();
    debug_assert!(s.iter().zip(delta).all(|(&i, d)| {
        let lhs = w.weight(i).iter().zip(&alpha).fold(Q::zero(), |acc, (b, a)| acc + a * Q::from_integer((*b).into()));
        (lhs - d).is_integer()
    }));
    Some(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteTable {
    pub expected: Vec<Vec<String>>,
    pub computed: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HirzebruchReport {
    pub n: i64,
    #[serde(with = "crate::rational::q_str")]
    pub c0: Q,
    #[serde(with = "crate::rational::q_str")]
    pub c1: Q,
    pub checks: Vec<SuiteCheck>,
    pub table1: SuiteTable,
    pub table2: SuiteTable,
    pub residual_order: Option<u64>,
    pub witness: Option<[Vec<[f64; 2]>; 2]>,
}

impl HirzebruchReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const HIRZEBRUCH_NAMES: [&str; 4] = ["x0", "x1", "y0", "y1"];
pub const HIRZEBRUCH_FIBER_NAMES: [&str; 4] = ["z0", "z1", "w0", "w1"];

pub fn hirzebruch_weights(n: i64, c0: &Q, c1: &Q) -> Result<WeightSystem> {
    if n < 1 {
        return Err(Error::Precondition(format!("n must be positive, got {n}")));
    }
    if !c0.is_positive() || !c1.is_positive() {
        return Err(Error::Precondition("c0 and c1 must both be positive".into()));
    }
    let half = q_frac(1, 2);
    WeightSystem::new(2, vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![-n, 1]], vec![c0 * &half, c1 * &half])
}

fn names(s: &IndexSet) -> Vec<String> {
    s.iter()
        .map(|&i| if i < 4 { HIRZEBRUCH_NAMES[i].to_string() } else { HIRZEBRUCH_FIBER_NAMES[i - 4].to_string() })
        .collect()
}

fn parse_names(v: &[&str]) -> IndexSet {
    v.iter()
        .map(|s| {
            HIRZEBRUCH_NAMES.iter().chain(&HIRZEBRUCH_FIBER_NAMES).position(|t| t == s).expect("known coordinate name")
        })
        .collect()
}

/// Rows of the unstable-subspace table of `C^4` (coordinates spanning each
/// subspace), excluding the origin.
pub fn hirzebruch_table1() -> Vec<IndexSet> {
    [vec!["x0", "x1"], vec!["y0", "y1"], vec!["y1"]].iter().map(|r| parse_names(r)).collect()
}

/// Rows of the unstable-subspace table of `T*C^4`, excluding the origin.
pub fn hirzebruch_table2() -> Vec<IndexSet> {
    [
        vec!["x0", "x1", "w0", "w1"],
        vec!["x0", "x1", "z0", "z1", "w0", "w1"],
        vec!["y0", "y1", "z0", "z1"],
        vec!["y0", "y1", "z0", "z1", "w0"],
        vec!["z0", "z1", "w0", "w1"],
        vec!["y1", "z0", "z1", "w0", "w1"],
        vec!["y1", "z0", "z1", "w0"],
    ]
    .iter()
    .map(|r| parse_names(r))
    .collect()
}

fn sorted(mut v: Vec<IndexSet>) -> Vec<IndexSet> {
    v.sort();
    v
}

fn table(expected: &[IndexSet], computed: &[IndexSet]) -> SuiteTable {
    SuiteTable { expected: expected.iter().map(names).collect(), computed: computed.iter().map(names).collect() }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> SuiteCheck {
    SuiteCheck { name: name.into(), passed, detail: detail.into() }
}

/// Torus-invariant monomials `y0·w1·z0^a·z1^{n-a}`, `a = 0..=n`.
pub fn slice_invariants(p: &CotangentPoint, n: i64) -> Vec<Complex64> {
    (0..=n).map(|a| p.x[2] * p.z[3] * p.z[0].powi(a as i32) * p.z[1].powi((n - a) as i32)).collect()
}

/// Full verification of the `Σ_n` example.
pub fn hirzebruch_suite(n: i64, c0: &Q, c1: &Q, seed: u64) -> Result<HirzebruchReport> {
    let w = hirzebruch_weights(n, c0, c1)?;
    let d = w.doubled();
    let mut checks = Vec::new();

    // (a) unstable subspaces of C^4.
    let t1 = hirzebruch_table1();
    let sub1: Vec<IndexSet> =
        destabilizing_subspaces(&w, Locus::Unstable, 20)?.into_iter().filter(|s| !s.is_empty()).collect();
    let max1 = unstable_maximal_supports(&w, 20)?;
    let ok_a = sorted(sub1.clone()) == sorted(t1.clone()) && max1 == sorted(vec![t1[0].clone(), t1[1].clone()]);
    checks.push(check("a_table1", ok_a, format!("computed {:?}", sub1.iter().map(names).collect::<Vec<_>>())));

    // (b) unstable subspaces of T*C^4.
    let t2 = hirzebruch_table2();
    let sub2: Vec<IndexSet> =
        destabilizing_subspaces(&d, Locus::Unstable, 20)?.into_iter().filter(|s| !s.is_empty()).collect();
    let ok_b = sorted(sub2.clone()) == sorted(t2.clone());
    let missing: Vec<_> = t2.iter().filter(|r| !sub2.contains(r)).map(names).collect();
    let extra: Vec<_> = sub2.iter().filter(|r| !t2.contains(r)).map(names).collect();
    checks.push(check("b_table2", ok_b, format!("missing {missing:?}, extra {extra:?}")));

    // (c) stable = (C^2 \ 0) x (C^2 \ 0) on a probe set: all supports plus random points.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for probe in 0..200u64 {
        let mask = if probe < 16 { probe } else { rng.random_range(0..16u64) };
        let s = set_of(mask, 4);
        let v = classify_support(&w, &s)?;
        let expect_stable = (mask & 0b0011 != 0) && (mask & 0b1100 != 0);
        let stable = v.status == Status::Stable;
        if stable != expect_stable
            || (!stable && !v.certificate_valid(&w, &s))
            || v.status == Status::StrictlySemistable
        {
            bad.push(names(&s));
        }
    }
    checks.push(check("c_stable_set", bad.is_empty(), format!("mismatched supports {bad:?}")));

    // (d) T*-semistable pairs over V-unstable points.
    let v_oracle = SemistableOracle::new(&w, 20)?;
    let d_oracle = SemistableOracle::new(&d, 20)?;
    let (y0, y1, w0, w1) = (2usize, 3usize, 2usize, 3usize);
    let mut d_bad = Vec::new();
    let mut e_pairs = Vec::new();
    for sx in 0..16u64 {
        for sz in 0..16u64 {
            let in_e = !v_oracle.is_semistable_mask(sx) && d_oracle.is_semistable_mask(sx | (sz << 4));
            let pattern = sx & 0b0011 == 0 && sx >> y0 & 1 == 1 && sz >> w1 & 1 == 1;
            if in_e != pattern {
                d_bad.push((names(&set_of(sx, 4)), names(&set_of(sz << 4, 8))));
            }
            if in_e {
                e_pairs.push((sx, sz));
            }
        }
    }
    checks.push(check("d_set_E", d_bad.is_empty(), format!("mismatched pairs {d_bad:?}")));

    // (e) E ∩ {𝓜 = 0}: x = 0, y1 = 0, w0 = 0, y0 w1 ≠ 0.
    let mut e_bad = Vec::new();
    for &(sx, sz) in &e_pairs {
        let consistent = relation_consistent(&w, &set_of(sx & sz, 4));
        let pattern = sx == 1 << y0 && sz >> w1 & 1 == 1 && sz >> w0 & 1 == 0;
        if consistent != pattern {
            e_bad.push((names(&set_of(sx, 4)), names(&set_of(sz << 4, 8))));
        }
    }
    let _ = y1;
    checks.push(check("e_set_E_on_M0", e_bad.is_empty(), format!("mismatched pairs {e_bad:?}")));

    // (f) residual stabilizer on the slice support {y0, w1}.
    let slice: IndexSet = [2usize, 7].into_iter().collect();
    let st = stabilizer(&d, &slice)?;
    let order = st.order();
    let ok_f = order == Some(n as u64) && (n == 1 || st.finite_invariants == vec![n as u64]);
    checks.push(check("f_residual_order", ok_f, format!("stabilizer {}", st.describe())));

    // Certify the E ∩ Z^s stratum ({y0}, {z0, z1, w1}) and the slice origin ({y0}, {w1}).
    let mut witness = None;
    for (label, sz) in [("g_certify_slice_stratum", vec![0usize, 1, 3]), ("g_certify_slice_origin", vec![3usize])] {
        let cand = HkStratumCandidate::new(&w, [y0].into_iter().collect(), sz.into_iter().collect())?;
        let cert = certify_stratum(&w, &cand, seed)?;
        let ok = cert.status == CandidateStatus::Certified;
        if witness.is_none() {
            witness = cert.witness.as_ref().map(|p| {
                let f = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
                [f(&p.x), f(&p.z)]
            });
        }
        checks.push(check(label, ok, format!("{:?} after {} seeds", cert.status, cert.attempts)));
    }

    // (g) slice points p(z) and p(λz): exact group element iff λ^n = 1;
    // KN-normalized invariants agree iff λ^n = 1.
    let slice_idx = [2usize, 7, 4, 5]; // y0, w1, z0, z1 in the doubled system
    let mut g_detail = Vec::new();
    let mut ok_g = true;
    for (num, den) in [(1, n), (1, 2 * n), (1, 3), (2, 5)] {
        let qn = q_frac(num, den);
        let delta = vec![q(0), q(0), qn.clone(), qn.clone()];
        let exact = phase_solve(&d, &slice_idx, &delta).is_some();
        let root_of_unity = (&qn * Q::from_integer(n.into())).is_integer();
        let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * to_f64(&qn));
        let zero = Complex64::new(0.0, 0.0);
        let base = CotangentPoint {
            x: vec![zero, zero, Complex64::new(1.0, 0.0), zero],
            z: vec![Complex64::new(0.7, 0.2), Complex64::new(-0.4, 0.9), zero, Complex64::new(1.0, 0.0)],
        };
        let mut moved = base.clone();
        moved.z[0] *= lambda;
        moved.z[1] *= lambda;
        let cfg = KnConfig::default();
        let ra = solve_hyperkahler(&w, &base, &cfg)?;
        let rb = solve_hyperkahler(&w, &moved, &cfg)?;
        let (Some(pa), Some(pb)) = (ra.representative, rb.representative) else {
            ok_g = false;
            g_detail.push(format!("q={num}/{den}: Kempf-Ness did not converge"));
            continue;
        };
        let moduli_equal =
            pa.x.iter().chain(&pa.z).zip(pb.x.iter().chain(&pb.z)).all(|(a, b)| (a.norm() - b.norm()).abs() < 1e-8);
        let ia = slice_invariants(&pa, n);
        let ib = slice_invariants(&pb, n);
        let inv_equal = ia.iter().zip(&ib).all(|(a, b)| (a - b).norm() < 1e-8);
        let ok = exact == root_of_unity && inv_equal == root_of_unity && moduli_equal;
        ok_g &= ok;
        g_detail.push(format!(
            "q={num}/{den}: lambda^n=1 {root_of_unity}, group element {exact}, invariants equal {inv_equal}"
        ));
    }
    checks.push(check("g_orbit_equality", ok_g, g_detail.join("; ")));

    Ok(HirzebruchReport {
        n,
        c0: c0.clone(),
        c1: c1.clone(),
        checks,
        table1: table(&t1, &sub1),
        table2: table(&t2, &sub2),
        residual_order: order,
        witness,
    })
}

/// Distinct unstable subspaces of `w` that are not the origin.
pub fn nonzero_unstable_subspaces(w: &WeightSystem, bound: usize) -> Result<Vec<IndexSet>> {
    Ok(destabilizing_subspaces(w, Locus::Unstable, bound)?.into_iter().filter(|s| !s.is_empty()).collect())
}

/// Pair-level containment `p^{-1}(V^{ss}) ⊆ (T*V)^{ss}`: for every
/// semistable `S_x` and every `S_z`, the pair is semistable for the doubled
/// weights. Returns the first violating pair.
pub fn preimage_containment(w: &WeightSystem, bound: usize) -> Result<Option<(IndexSet, IndexSet)>> {
    let n = w.n();
    let v = SemistableOracle::new(w, bound)?;
    let d = SemistableOracle::new(&w.doubled(), 2 * bound)?;
    for sx in v.semistable_masks() {
        for sz in 0..1u64 << n {
            if !d.is_semistable_mask(doubled_mask(sx, sz, n)) {
                return Ok(Some((set_of(sx, n), set_of(sz, n))));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn tables_for_small_n() {
        for n in [1, 2, 3] {
            let w = hirzebruch_weights(n, &q(1), &q(1)).unwrap();
            assert_eq!(sorted(nonzero_unstable_subspaces(&w, 20).unwrap()), sorted(hirzebruch_table1()));
            assert_eq!(sorted(nonzero_unstable_subspaces(&w.doubled(), 20).unwrap()), sorted(hirzebruch_table2()));
        }
    }

    #[test]
    fn single_weight_pairs_are_disjoint() {
        let w = WeightSystem::new(1, vec![vec![1]], vec![q_frac(1, 2)]).unwrap();
        let c = hk_candidate_strata(&w, 12).unwrap();
        assert!(!c.is_empty());
        for cand in &c {
            assert!(cand.support_pair.0.is_disjoint(&cand.support_pair.1));
        }
    }

    #[test]
    fn hirzebruch_candidates_include_slice_family() {
        let w = hirzebruch_weights(2, &q(1), &q(1)).unwrap();
        let c = hk_candidate_strata(&w, 12).unwrap();
        assert!(c[0].stabilizer.is_trivial());
        let slice = c.iter().find(|x| x.support_pair == (set(&[2]), set(&[3]))).unwrap();
        assert_eq!(slice.stabilizer.finite_invariants, vec![2]);
        assert!(c.iter().any(|x| x.support_pair == (set(&[2]), set(&[0, 1, 3])) && x.stabilizer.is_trivial()));
        assert!(!c.iter().any(|x| x.support_pair == (set(&[2]), set(&[2, 3]))));
    }

    #[test]
    fn certification() {
        let w = hirzebruch_weights(1, &q(1), &q(1)).unwrap();
        let open = HkStratumCandidate::new(&w, set(&[0, 1, 2, 3]), set(&[])).unwrap();
        let r = certify_stratum(&w, &open, 7).unwrap();
        assert_eq!(r.status, CandidateStatus::Certified);
        let wit = r.witness.unwrap();
        assert!(norm(&mu_hyperkahler(&w, &wit).unwrap()) < WITNESS_TOL);
        let unstable = HkStratumCandidate::new(&w, set(&[0, 1]), set(&[])).unwrap();
        assert_eq!(certify_stratum(&w, &unstable, 7).unwrap().status, CandidateStatus::Refuted);
    }

    #[test]
    fn unreachable_level_stays_candidate() {
        // θ = 0 lies on the boundary of Cone{β^0}: semistable, but no point
        // with support ({0}, ∅) reaches μ_I = 0.
        let w = WeightSystem::new(1, vec![vec![1], vec![-1]], vec![q(0)]).unwrap();
        let cand = HkStratumCandidate::new(&w, set(&[0]), set(&[])).unwrap();
        let r = certify_stratum(&w, &cand, 1).unwrap();
        assert_eq!((r.status, r.attempts), (CandidateStatus::Candidate, CERTIFY_SEEDS));
        let cand = HkStratumCandidate::new(&w, set(&[0, 1]), set(&[])).unwrap();
        assert_eq!(certify_stratum(&w, &cand, 1).unwrap().status, CandidateStatus::Certified);
    }

    #[test]
    fn phase_solve_slice() {
        for n in 1..=5i64 {
            let w = hirzebruch_weights(n, &q(1), &q(1)).unwrap().doubled();
            for den in 1..=12i64 {
                let qv = q_frac(1, den);
                let delta = vec![q(0), q(0), qv.clone(), qv.clone()];
                let solvable = phase_solve(&w, &[2, 7, 4, 5], &delta).is_some();
                assert_eq!(solvable, (qv * Q::from_integer(n.into())).is_integer(), "n={n} den={den}");
            }
        }
    }

    #[test]
    fn suite_passes() {
        for n in [1, 2, 3] {
            let r = hirzebruch_suite(n, &q(1), &q(1), 42).unwrap();
            assert!(r.passed(), "{:#?}", r.checks);
            assert_eq!(r.residual_order, Some(n as u64));
        }
        assert!(hirzebruch_suite(1, &q(0), &q(1), 1).is_err());
        assert!(hirzebruch_suite(0, &q(1), &q(1), 1).is_err());
    }

    #[test]
    fn containment() {
        let w = hirzebruch_weights(2, &q(1), &q(3)).unwrap();
        assert_eq!(preimage_containment(&w, 20).unwrap(), None);
    }
}
