//! Pointwise hyperkähler reduction at a zero of `μ_hk`: gauge and horizontal
//! subspaces of the real model, the induced metric and Kähler forms, and
//! numerical identity checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::git::stabilizer;
use crate::moment::{hol_moment, mu, mu_hyperkahler, mu_i, norm};
use crate::rep::{apply_quaternion, AmbientPoint, CotangentPoint, Quaternion, WeightSystem};

pub const FRAME_MOMENT_TOL: f64 = 1e-9;
pub const HORIZONTAL_TOL: f64 = 1e-8;
const REORTH_THRESHOLD: f64 = 1e-8;

/// Infinitesimal action of `e_a` at `p` in the real model: `(√-1 λ x, √-1 λ y)`
/// with `λ_i = β^i_a`.
pub fn gauge_generator(w: &WeightSystem, p: &CotangentPoint, a: usize) -> Vec<f64> {
    let i = Complex64::i();
    let y = p.y();
    p.x.iter()
        .zip(w.weights())
        .map(|(x, b)| i * x * b[a] as f64)
        .chain(y.iter().zip(w.weights()).map(|(y, b)| i * y * b[a] as f64))
        .flat_map(|c| [c.re, c.im])
        .collect()
}

/// Modified Gram–Schmidt against `basis` with one reorthogonalization pass
/// when the first pass loses more than `REORTH_THRESHOLD` relative norm.
/// Returns the normalized remainder when it is not negligible.
fn mgs_push(basis: &mut Vec<DVector<f64>>, v: DVector<f64>, drop_tol: f64) -> bool {
    let scale = v.norm();
    if scale == 0.0 {
        return false;
    }
    let mut r = v;
    for _ in 0..2 {
        let before = r.norm();
        for b in basis.iter() {
            let c = b.dot(&r);
            r -= b * c;
        }
        if r.norm() > (1.0 - REORTH_THRESHOLD) * before {
            break;
        }
    }
    if r.norm() <= drop_tol * scale {
        return false;
    }
    let n = r.norm();
    basis.push(r / n);
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFrame {
    pub weights: Option<WeightSystem>,
    pub base: CotangentPoint,
    /// Orthonormal basis of the gauge span, as columns.
    pub gauge: DMatrix<f64>,
    /// Orthonormal basis of its orthogonal complement, as columns.
    pub horizontal: DMatrix<f64>,
}

fn columns(v: &[DVector<f64>], rows: usize) -> DMatrix<f64> {
    if v.is_empty() {
        return DMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(v)
}

/// Horizontal frame at a zero of `μ_hk` with finite stabilizer.
pub fn horizontal_frame(w: &WeightSystem, p: &CotangentPoint) -> Result<ReducedFrame> {
    check_len(w.n(), p.n())?;
    let residual = norm(&mu_hyperkahler(w, p)?);
    if residual >= FRAME_MOMENT_TOL {
        return Err(Error::MomentResidual { residual, tol: FRAME_MOMENT_TOL });
    }
    let k = w.rank();
    let st = stabilizer(&w.doubled(), &p.doubled_support())?;
    if st.subtorus_rank > 0 {
        return Err(Error::ContinuousStabilizer { rank: k - st.subtorus_rank, expected: k });
    }
    let dim = 4 * p.n();
    let mut gauge = Vec::new();
    for a in 0..k {
        let g = gauge_generator(w, p, a);
        for op in [None, Some(Quaternion::I), Some(Quaternion::J), Some(Quaternion::K)] {
            let v = match op {
                None => g.clone(),
                Some(q) => apply_quaternion(q, &g)?,
            };
            mgs_push(&mut gauge, DVector::from_vec(v), 1e-8);
        }
    }
    if gauge.len() != 4 * k {
        return Err(Error::ContinuousStabilizer { rank: gauge.len() / 4, expected: k });
    }
    let gauge_m = columns(&gauge, dim);
    let mut all = gauge;
    for j in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut e = DVector::zeros(dim);
        e[j] = 1.0;
        mgs_push(&mut all, e, 0.1);
    }
    let horizontal = columns(&all[4 * k..], dim);
    Ok(ReducedFrame { weights: Some(w.clone()), base: p.clone(), gauge: gauge_m, horizontal })
}

impl ReducedFrame {
    /// The frame with no group: everything is horizontal.
    pub fn ambient(p: &CotangentPoint) -> Self {
        let dim = 4 * p.n();
        ReducedFrame {
            weights: None,
            base: p.clone(),
            gauge: DMatrix::zeros(dim, 0),
            horizontal: DMatrix::identity(dim, dim),
        }
    }

    pub fn dimension(&self) -> usize {
        self.horizontal.ncols()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.horizontal.nrows()
    }

    /// Horizontal projection.
    pub fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ambient_dimension(), u.len())?;
        let u = DVector::from_column_slice(u);
        let c = self.horizontal.transpose() * &u;
        Ok((&self.horizontal * c).iter().copied().collect())
    }

    fn check_horizontal(&self, u: &[f64]) -> Result<()> {
        let pu = self.project(u)?;
        let r = u.iter().zip(&pu).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if r > HORIZONTAL_TOL {
            return Err(Error::NotHorizontal(r));
        }
        Ok(())
    }

    pub fn reduced_metric(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_horizontal(u)?;
        self.check_horizontal(v)?;
        Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// `ω̃_A(u, v) = g̃(Au, v)`.
    pub fn reduced_form(&self, op: Quaternion, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_horizontal(u)?;
        self.check_horizontal(v)?;
        let au = apply_quaternion(op, u)?;
        Ok(au.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// Matrix of the reduced operator in the horizontal basis:
    /// `Ã_{ji} = h_j · A h_i`.
    pub fn reduced_operator(&self, op: Quaternion) -> DMatrix<f64> {
        let r = self.dimension();
        let mut m = DMatrix::zeros(r, r);
        for i in 0..r {
            let col: Vec<f64> = self.horizontal.column(i).iter().copied().collect();
            let ah = DVector::from_vec(apply_quaternion(op, &col).expect("real model length"));
            let c = self.horizontal.transpose() * ah;
            m.set_column(i, &c);
        }
        m
    }

    /// Gram matrix of `g̃` in the horizontal basis.
    pub fn metric_gram(&self) -> DMatrix<f64> {
        self.horizontal.transpose() * &self.horizontal
    }

    /// Gram matrix of `ω̃_A`: entry `(i, j) = ω̃_A(h_i, h_j)`.
    pub fn form_gram(&self, op: Quaternion) -> DMatrix<f64> {
        self.reduced_operator(op).transpose()
    }

    /// Largest deviation of the gauge/horizontal splitting from orthogonality.
    pub fn orthogonality_defect(&self) -> f64 {
        if self.gauge.ncols() == 0 {
            return 0.0;
        }
        (self.gauge.transpose() * &self.horizontal).amax()
    }
}

fn max_column_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Max over the horizontal basis of `‖(ĨJ̃ - K̃)u‖`, `‖(Ĩ² + 1)u‖`,
/// `‖(J̃² + 1)u‖`, `‖(K̃² + 1)u‖`.
pub fn quaternion_check(frame: &ReducedFrame) -> f64 {
    let r = frame.dimension();
    let id = DMatrix::<f64>::identity(r, r);
    let i = frame.reduced_operator(Quaternion::I);
    let j = frame.reduced_operator(Quaternion::J);
    let k = frame.reduced_operator(Quaternion::K);
    [&i * &j - &k, &i * &i + &id, &j * &j + &id, &k * &k + &id].iter().map(max_column_norm).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSectionReport {
    /// Real dimension of the Kähler quotient tangent space.
    pub dimension: usize,
    pub metric_discrepancy: f64,
    pub form_discrepancy: f64,
    /// How far the lifted `V`-horizontal vectors are from the `T*V` frame.
    pub horizontality_defect: f64,
}

/// Orthonormal basis of the horizontal space of the Kähler reduction of `V`
/// at `x`, computed with a full SVD of the gauge matrix inside `C^n` only.
pub fn kahler_horizontal_basis(w: &WeightSystem, x: &AmbientPoint) -> Result<DMatrix<f64>> {
    check_len(w.n(), x.len())?;
    let n2 = 2 * x.len();
    let k = w.rank();
    let i = Complex64::i();
    let mut g = DMatrix::zeros(n2, 2 * k);
    for a in 0..k {
        for (idx, (c, b)) in x.coords.iter().zip(w.weights()).enumerate() {
            let v = i * c * b[a] as f64;
            // ξ_a x and I ξ_a x = √-1 ξ_a x.
            g[(2 * idx, 2 * a)] = v.re;
            g[(2 * idx + 1, 2 * a)] = v.im;
            let iv = i * v;
            g[(2 * idx, 2 * a + 1)] = iv.re;
            g[(2 * idx + 1, 2 * a + 1)] = iv.im;
        }
    }
    // Complement of the column space via the full left singular basis.
    let padded = DMatrix::from_fn(n2, n2, |r, c| if c < 2 * k { g[(r, c)] } else { 0.0 });
    let svd = padded.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.amax().max(1e-300);
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-9 * smax).count();
    if rank != 2 * k {
        return Err(Error::ContinuousStabilizer { rank: rank / 2, expected: k });
    }
    let cols: Vec<usize> = (0..n2).filter(|&j| svd.singular_values[j] <= 1e-9 * smax).collect();
    Ok(DMatrix::from_fn(n2, cols.len(), |r, c| u[(r, cols[c])]))
}

fn lift_to_zero_section(u: &[f64]) -> Vec<f64> {
    let mut v = u.to_vec();
    v.extend(std::iter::repeat_n(0.0, u.len()));
    v
}

/// Compares `g̃`, `ω̃_I` at `(x|0)` on zero-section tangent directions with
/// the Kähler quotient of `V` alone.
pub fn zero_section_check(w: &WeightSystem, x: &AmbientPoint) -> Result<ZeroSectionReport> {
    let residual = norm(&mu(w, x)?);
    if residual >= 1e-10 {
        return Err(Error::MomentResidual { residual, tol: 1e-10 });
    }
    let p = CotangentPoint::zero_section(x);
    let frame = horizontal_frame(w, &p)?;
    let hv = kahler_horizontal_basis(w, x)?;
    let m = hv.ncols();
    let cols: Vec<Vec<f64>> = (0..m).map(|j| hv.column(j).iter().copied().collect()).collect();
    let lifted: Vec<Vec<f64>> = cols.iter().map(|c| lift_to_zero_section(c)).collect();
    let mut horiz = 0.0f64;
    let mut projected = Vec::with_capacity(m);
    for l in &lifted {
        let pl = frame.project(l)?;
        horiz = horiz.max(l.iter().zip(&pl).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
        projected.push(pl);
    }
    let mut gd = 0.0f64;
    let mut fd = 0.0f64;
    for a in 0..m {
        let iu = complex_i(&cols[a]);
        for b in 0..m {
            let g_v: f64 = cols[a].iter().zip(&cols[b]).map(|(s, t)| s * t).sum();
            let w_v: f64 = iu.iter().zip(&cols[b]).map(|(s, t)| s * t).sum();
            gd = gd.max((frame.reduced_metric(&projected[a], &projected[b])? - g_v).abs());
            fd = fd.max((frame.reduced_form(Quaternion::I, &projected[a], &projected[b])? - w_v).abs());
        }
    }
    Ok(ZeroSectionReport { dimension: m, metric_discrepancy: gd, form_discrepancy: fd, horizontality_defect: horiz })
}

fn complex_i(u: &[f64]) -> Vec<f64> {
    u.chunks(2).flat_map(|c| [-c[1], c[0]]).collect()
}

/// Fubini–Study data at `[v] ∈ P^n` for `v` on the unit sphere, evaluated on
/// tangent vectors `a`, `b` of `C^{n+1}` pushed through the affine chart
/// `w_j = v_j / v_0`. Returns `(g, ω)`.
pub fn fubini_study(v: &[Complex64], a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    let v0 = v[0];
    let w: Vec<Complex64> = v[1..].iter().map(|c| c / v0).collect();
    let push = |u: &[Complex64]| -> Vec<Complex64> {
        v[1..].iter().zip(&u[1..]).map(|(vj, uj)| uj / v0 - vj * u[0] / (v0 * v0)).collect()
    };
    let (da, db) = (push(a), push(b));
    let s = 1.0 + w.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let mut h = Complex64::new(0.0, 0.0);
    for j in 0..w.len() {
        for k in 0..w.len() {
            let delta = if j == k { 1.0 / s } else { 0.0 };
            let hjk = Complex64::from(delta) - w[j].conj() * w[k] / (s * s);
            h += hjk * da[j] * db[k].conj();
        }
    }
    (h.re, -h.im)
}

/// `dd^c_A F(u, v) = Hess F(v, A u) - Hess F(u, A v)` with `d^c f = -df∘A`,
/// evaluated for `F = -Ψ = ½‖y‖²` by central differences and compared with
/// `ω_A` on standard basis vectors. Returns the largest entry error.
pub fn potential_residual(op: Quaternion, points: &[Vec<f64>], h: f64) -> Result<f64> {
    let f = |p: &[f64]| -> f64 {
        let half = p.len() / 2;
        0.5 * p[half..].iter().map(|v| v * v).sum::<f64>()
    };
    let mut worst = 0.0f64;
    for p in points {
        let d = p.len();
        if d % 4 != 0 {
            return Err(Error::DimensionMismatch { expected: d - d % 4, got: d });
        }
        let hess = |u: &[f64], v: &[f64]| -> f64 {
            let at = |su: f64, sv: f64| -> f64 {
                let q: Vec<f64> = (0..d).map(|i| p[i] + h * (su * u[i] + sv * v[i])).collect();
                f(&q)
            };
            (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h)
        };
        let basis: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        let images: Vec<Vec<f64>> = basis.iter().map(|e| apply_quaternion(op, e)).collect::<Result<_>>()?;
        for a in 0..d {
            for b in 0..d {
                let ddc = hess(&basis[b], &images[a]) - hess(&basis[a], &images[b]);
                let omega: f64 = images[a].iter().zip(&basis[b]).map(|(s, t)| s * t).sum();
                worst = worst.max((ddc - omega).abs());
            }
        }
    }
    Ok(worst)
}

/// `dd^c_J(-Ψ) = ω_J` on flat `T*C^n`.
pub fn ambient_potential_check(points: &[Vec<f64>], h: f64) -> Result<f64> {
    potential_residual(Quaternion::J, points, h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleReport {
    pub lambda: [f64; 2],
    /// `|μ_I(x, λz) - μ_I(x, z)|`.
    pub mu_i_deviation: f64,
    /// `|𝓜(x, λz) - λ 𝓜(x, z)|`.
    pub hol_deviation: f64,
    /// How far the transported horizontal basis is from horizontal.
    pub transport_defect: f64,
    /// `|Ω̃'(R u, R v) - λ Ω̃(u, v)|` over horizontal basis pairs.
    pub omega_deviation: f64,
}

/// `(x, y) ↦ (x, conj(λ) y)`, the real-model form of `(x, z) ↦ (x, λ z)`.
fn rotate_fiber(u: &[f64], lambda: Complex64) -> Vec<f64> {
    let half = u.len() / 2;
    let mut out = u.to_vec();
    for c in out[half..].chunks_mut(2) {
        let v = Complex64::new(c[0], c[1]) * lambda.conj();
        c[0] = v.re;
        c[1] = v.im;
    }
    out
}

/// Checks that fiberwise rotation by a unit complex `λ` preserves `μ_I`,
/// scales `𝓜` and the reduced `Ω̃ = ω̃_J + √-1 ω̃_K` by `λ`.
pub fn circle_action_check(frame: &ReducedFrame, lambda: Complex64) -> Result<CircleReport> {
    let p = &frame.base;
    let rotated = CotangentPoint::new(p.x.clone(), p.z.iter().map(|z| z * lambda).collect())?;
    let (mu_dev, hol_dev, target) = match &frame.weights {
        Some(w) => {
            let a = mu_i(w, p)?;
            let b = mu_i(w, &rotated)?;
            let mu_dev = a.iter().zip(&b).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max);
            let m0 = hol_moment(w, p)?;
            let m1 = hol_moment(w, &rotated)?;
            let hol_dev = m0.iter().zip(&m1).map(|(s, t)| (t - s * lambda).norm()).fold(0.0, f64::max);
            (mu_dev, hol_dev, horizontal_frame(w, &rotated)?)
        }
        None => (0.0, 0.0, ReducedFrame::ambient(&rotated)),
    };
    let r = frame.dimension();
    let moved: Vec<Vec<f64>> =
        (0..r).map(|j| rotate_fiber(&frame.horizontal.column(j).iter().copied().collect::<Vec<_>>(), lambda)).collect();
    let mut transport = 0.0f64;
    for m in &moved {
        let pm = target.project(m)?;
        transport = transport.max(m.iter().zip(&pm).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
    }
    let omega = |f: &ReducedFrame, u: &[f64], v: &[f64]| -> Result<Complex64> {
        Ok(Complex64::new(f.reduced_form(Quaternion::J, u, v)?, f.reduced_form(Quaternion::K, u, v)?))
    };
    let cols: Vec<Vec<f64>> = (0..r).map(|j| frame.horizontal.column(j).iter().copied().collect()).collect();
    let mut dev = 0.0f64;
    for a in 0..r {
        for b in 0..r {
            let before = omega(frame, &cols[a], &cols[b])?;
            let after = omega(&target, &moved[a], &moved[b])?;
            dev = dev.max((after - before * lambda).norm());
        }
    }
    Ok(CircleReport {
        lambda: [lambda.re, lambda.im],
        mu_i_deviation: mu_dev,
        hol_deviation: hol_dev,
        transport_defect: transport,
        omega_deviation: dev,
    })
}
