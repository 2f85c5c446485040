//! Exact linear feasibility and optimization over the rationals.
//!
//! Two independent engines live here: Fourier–Motzkin elimination with
//! witness back-substitution (handles strict inequalities natively, used for
//! the low-dimensional cocharacter systems) and a dense two-phase simplex
//! with Bland's rule (used for cone membership and the box-normalized
//! certificate search).

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// `coeffs · x ≥ rhs`, or `>` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
    pub strict: bool,
}

impl Inequality {
    pub fn ge(coeffs: Vec<Q>, rhs: Q) -> Self {
        Self { coeffs, rhs, strict: false }
    }

    pub fn gt(coeffs: Vec<Q>, rhs: Q) -> Self {
        Self { coeffs, rhs, strict: true }
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let lhs = self.coeffs.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b);
        if self.strict {
            lhs > self.rhs
        } else {
            lhs >= self.rhs
        }
    }

    /// Scale so the first nonzero coefficient has modulus one.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &lead;
            }
            self.rhs /= &lead;
        }
        self
    }

    /// `Some(true)` if trivially satisfied, `Some(false)` if trivially
    /// violated, `None` when it still involves a variable.
    fn constant_truth(&self) -> Option<bool> {
        if self.coeffs.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let zero = Q::zero();
        Some(if self.strict { zero > self.rhs } else { zero >= self.rhs })
    }
}

fn dedup(v: Vec<Inequality>) -> Vec<Inequality> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(v.len());
    for ineq in v {
        let ineq = ineq.normalized();
        if ineq.constant_truth() == Some(true) {
            continue;
        }
        if seen.insert(ineq.clone()) {
            out.push(ineq);
        }
    }
    // A non-strict copy is implied by a strict one with the same data.
    out.retain(|i| i.strict || !seen.contains(&Inequality { strict: true, ..i.clone() }));
    out
}

/// Decides feasibility of a system of (strict or non-strict) inequalities in
/// `dim` variables by Fourier–Motzkin elimination, returning an exact
/// witness when feasible.
pub fn fm_solve(dim: usize, system: &[Inequality]) -> Option<Vec<Q>> {
    debug_assert!(system.iter().all(|i| i.coeffs.len() == dim));
    let mut levels: Vec<Vec<Inequality>> = Vec::with_capacity(dim + 1);
    let mut current = dedup(system.to_vec());
    for var in (0..dim).rev() {
        if current.iter().any(|i| i.constant_truth() == Some(false)) {
            return None;
        }
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in &current {
            let a = &ineq.coeffs[var];
            if a.is_positive() {
                lower.push(ineq);
            } else if a.is_negative() {
                upper.push(ineq);
            } else {
                rest.push(ineq.clone());
            }
        }
        for lo in &lower {
            for up in &upper {
                let s = lo.coeffs[var].recip();
                let t = up.coeffs[var].abs().recip();
                let coeffs = lo.coeffs.iter().zip(&up.coeffs).map(|(p, m)| p * &s + m * &t).collect();
                rest.push(Inequality { coeffs, rhs: &lo.rhs * &s + &up.rhs * &t, strict: lo.strict || up.strict });
            }
        }
        levels.push(current);
        current = dedup(rest);
    }
    if current.iter().any(|i| i.constant_truth() == Some(false)) {
        return None;
    }
    // levels[dim-1-var] is the system in variables 0..=var.
    let mut x = vec![Q::zero(); dim];
    for var in 0..dim {
        let sys = &levels[dim - 1 - var];
        let mut lo: Option<(Q, bool)> = None;
        let mut hi: Option<(Q, bool)> = None;
        for ineq in sys {
            let a = &ineq.coeffs[var];
            if a.is_zero() {
                continue;
            }
            let partial = ineq.coeffs[..var].iter().zip(&x).fold(Q::zero(), |acc, (c, v)| acc + c * v);
            let bound = (&ineq.rhs - partial) / a;
            if a.is_positive() {
                let tighter = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && ineq.strict && !s),
                };
                if tighter {
                    lo = Some((bound, ineq.strict));
                }
            } else {
                let tighter = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && ineq.strict && !s),
                };
                if tighter {
                    hi = Some((bound, ineq.strict));
                }
            }
        }
        x[var] = pick_in_interval(lo, hi)?;
    }
    debug_assert!(system.iter().all(|i| i.holds(&x)));
    Some(x)
}

/// A simple point of the interval: zero if allowed, otherwise the integer
/// nearest zero, otherwise the midpoint.
fn pick_in_interval(lo: Option<(Q, bool)>, hi: Option<(Q, bool)>) -> Option<Q> {
    let ok = |v: &Q| {
        lo.as_ref().is_none_or(|(b, s)| if *s { v > b } else { v >= b })
            && hi.as_ref().is_none_or(|(b, s)| if *s { v < b } else { v <= b })
    };
    let zero = Q::zero();
    if ok(&zero) {
        return Some(zero);
    }
    let candidates = [
        lo.as_ref().map(|(b, _)| b.ceil()),
        lo.as_ref().map(|(b, _)| b.floor() + Q::one()),
        hi.as_ref().map(|(b, _)| b.floor()),
        hi.as_ref().map(|(b, _)| b.ceil() - Q::one()),
    ];
    let mut best: Option<Q> = None;
    for c in candidates.into_iter().flatten() {
        if ok(&c) && best.as_ref().is_none_or(|b| c.abs() < b.abs()) {
            best = Some(c);
        }
    }
    if best.is_some() {
        return best;
    }
    match (&lo, &hi) {
        (Some((a, _)), Some((b, _))) => {
            let m = (a + b) / Q::from_integer(2.into());
            ok(&m).then_some(m)
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Q>, value: Q },
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for v in &mut self.t[row] {
            *v /= &p;
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = line[col].clone();
            for (v, pv) in line.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `obj · x` over the current basis, considering only columns
    /// `< allowed`. Bland's rule guarantees termination.
    fn optimize(&mut self, obj: &[Q], allowed: usize) -> bool {
        let rhs = self.t[0].len() - 1;
        loop {
            // Reduced cost of column j: obj_j - Σ_r obj_{basis[r]} t[r][j].
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z = self.t.iter().zip(&self.basis).fold(Q::zero(), |acc, (row, &b)| acc + &obj[b] * &row[j]);
                (&obj[j] - z).is_positive()
            });
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for (r, row) in self.t.iter().enumerate() {
                if row[col].is_positive() {
                    let ratio = &row[rhs] / &row[col];
                    let better = match &leave {
                        None => true,
                        Some((lr, lv)) => ratio < *lv || (ratio == *lv && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

/// Maximizes `c · x` subject to `A x = b`, `x ≥ 0` exactly.
pub fn simplex_max(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == m);
    // Phase one: artificial variables n..n+m.
    let mut t = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let flip = rhs.is_negative();
        let mut line: Vec<Q> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        line.extend(std::iter::repeat_n(Q::zero(), m));
        line.push(if flip { -rhs } else { rhs.clone() });
        t.push(line);
    }
    for (r, line) in t.iter_mut().enumerate() {
        line[n + r] = Q::one();
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect() };
    let mut phase1 = vec![Q::zero(); n + m];
    for v in &mut phase1[n..] {
        *v = -Q::one();
    }
    tab.optimize(&phase1, n + m);
    let rhs = n + m;
    let infeas = tab.t.iter().zip(&tab.basis).any(|(row, &bv)| bv >= n && !row[rhs].is_zero());
    if infeas {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    let mut r = 0;
    while r < tab.basis.len() {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                tab.pivot(r, col);
            } else {
                // Redundant row.
                tab.t.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    let mut obj = c.to_vec();
    obj.extend(std::iter::repeat_n(Q::zero(), m));
    if !tab.optimize(&obj, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (row, &bv) in tab.t.iter().zip(&tab.basis) {
        if bv < n {
            x[bv] = row[rhs].clone();
        }
    }
    let value = x.iter().zip(c).fold(Q::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}

/// A nonnegative solution of `A s = b`, if one exists.
pub fn nonneg_solution(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    match simplex_max(a, b, &vec![Q::zero(); n]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Minimizes `objective · ξ` over `{ξ : rows·ξ ≥ 0, ‖ξ‖_∞ ≤ 1}`; the set
/// always contains `ξ = 0`, so an optimum exists.
pub fn box_minimize(rows: &[Vec<Q>], objective: &[Q]) -> (Vec<Q>, Q) {
    let k = objective.len();
    let m = rows.len();
    // Variables: u = ξ + 1 (k), box slacks (k), row surpluses (m).
    let nv = 2 * k + m;
    let mut a = Vec::with_capacity(k + m);
    let mut b = Vec::with_capacity(k + m);
    for j in 0..k {
        let mut line = vec![Q::zero(); nv];
        line[j] = Q::one();
        line[k + j] = Q::one();
        a.push(line);
        b.push(Q::from_integer(2.into()));
    }
    for (i, row) in rows.iter().enumerate() {
        let mut line = vec![Q::zero(); nv];
        line[..k].clone_from_slice(row);
        line[2 * k + i] = -Q::one();
        a.push(line);
        b.push(row.iter().fold(Q::zero(), |acc, v| acc + v));
    }
    let mut c = vec![Q::zero(); nv];
    for j in 0..k {
        c[j] = -objective[j].clone();
    }
    match simplex_max(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let xi: Vec<Q> = x[..k].iter().map(|u| u - Q::one()).collect();
            let val = xi.iter().zip(objective).fold(Q::zero(), |acc, (p, q)| acc + p * q);
            (xi, val)
        }
        other => unreachable!("box LP is feasible and bounded, got {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_frac};

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn fm_finds_strict_witness() {
        // x ≥ 0, y ≥ 0, x + y < 1, x > y
        let sys = vec![
            Inequality::ge(qs(&[1, 0]), q(0)),
            Inequality::ge(qs(&[0, 1]), q(0)),
            Inequality::gt(qs(&[-1, -1]), q(-1)),
            Inequality::gt(qs(&[1, -1]), q(0)),
        ];
        let x = fm_solve(2, &sys).unwrap();
        assert!(sys.iter().all(|i| i.holds(&x)));
    }

    #[test]
    fn fm_detects_strict_infeasibility() {
        // x ≥ 0 and x < 0
        let sys = vec![Inequality::ge(qs(&[1]), q(0)), Inequality::gt(qs(&[-1]), q(0))];
        assert!(fm_solve(1, &sys).is_none());
        // x ≥ 1, y ≥ x, y ≤ 0
        let sys = vec![
            Inequality::ge(qs(&[1, 0]), q(1)),
            Inequality::ge(qs(&[-1, 1]), q(0)),
            Inequality::ge(qs(&[0, -1]), q(0)),
        ];
        assert!(fm_solve(2, &sys).is_none());
    }

    #[test]
    fn fm_point_interval() {
        // 2x ≥ 1 and 2x ≤ 1 → x = 1/2
        let sys = vec![Inequality::ge(qs(&[2]), q(1)), Inequality::ge(qs(&[-2]), q(-1))];
        assert_eq!(fm_solve(1, &sys).unwrap(), vec![q_frac(1, 2)]);
    }

    #[test]
    fn simplex_basic_optimum() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![qs(&[1, 2, 1, 0]), qs(&[3, 1, 0, 1])];
        let b = qs(&[4, 6]);
        let c = qs(&[1, 1, 0, 0]);
        match simplex_max(&a, &b, &c) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q_frac(14, 5));
                assert_eq!(&x[..2], &[q_frac(8, 5), q_frac(6, 5)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn simplex_infeasible_and_unbounded() {
        // s1 + s2 = -1 with s ≥ 0
        assert_eq!(simplex_max(&[qs(&[1, 1])], &qs(&[-1]), &qs(&[0, 0])), LpOutcome::Infeasible);
        // max s1 with s1 - s2 = 0
        assert_eq!(simplex_max(&[qs(&[1, -1])], &qs(&[0]), &qs(&[1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn simplex_redundant_rows() {
        let a = vec![qs(&[1, 1]), qs(&[2, 2])];
        let b = qs(&[1, 2]);
        let s = nonneg_solution(&a, &b).unwrap();
        assert_eq!(&s[0] + &s[1], q(1));
    }

    #[test]
    fn box_minimize_hirzebruch_row() {
        // ξ = (a, b) with a ≥ 0, minimize (a + b)/2 over the unit box.
        let (xi, v) = box_minimize(&[qs(&[1, 0]), qs(&[1, 0])], &[q_frac(1, 2), q_frac(1, 2)]);
        assert_eq!(xi, qs(&[0, -1]));
        assert_eq!(v, q_frac(-1, 2));
    }

    #[test]
    fn box_minimize_no_rows() {
        let (xi, v) = box_minimize(&[], &[q(1), q(-2)]);
        assert_eq!(xi, qs(&[-1, 1]));
        assert_eq!(v, q(-3));
    }
}
