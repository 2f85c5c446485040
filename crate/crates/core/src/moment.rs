//! Moment maps of the linear action: Kähler `μ`, holomorphic symplectic `𝓜`,
//! the hyperkähler triple, the circle moment map `ψ`, J-weights and flow
//! traces.
//!
//! Conventions: `⟨μ(v), e_a⟩ = -½ Σ_i β^i_a |v_i|² + θ_a` and
//! `⟨𝓜(x,z), e_a⟩ = √-1 Σ_i β^i_a x_i z_i`.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rational::{q_frac, QComplex, Q};
use crate::rep::{AmbientPoint, Cocharacter, CotangentPoint, ExactAmbientPoint, ExactCotangentPoint, WeightSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum MomentValue {
    Kahler(Vec<f64>),
    /// `[re, im]` per component.
    Holomorphic(Vec<[f64; 2]>),
    /// `(μ_I, Re 𝓜, Im 𝓜)`.
    Hyperkahler(Vec<f64>),
    Circle(f64),
}

impl MomentValue {
    pub fn norm(&self) -> f64 {
        match self {
            MomentValue::Kahler(v) | MomentValue::Hyperkahler(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            MomentValue::Holomorphic(v) => v.iter().map(|[a, b]| a * a + b * b).sum::<f64>().sqrt(),
            MomentValue::Circle(x) => x.abs(),
        }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn weighted_sum(w: &WeightSystem, sq: &[f64]) -> Vec<f64> {
    let theta = w.theta_f64();
    (0..w.rank())
        .map(|a| -0.5 * w.weights().iter().zip(sq).map(|(b, s)| b[a] as f64 * s).sum::<f64>() + theta[a])
        .collect()
}

/// Kähler moment map on `V`.
pub fn mu(w: &WeightSystem, v: &AmbientPoint) -> Result<Vec<f64>> {
    check_len(w.n(), v.len())?;
    let sq: Vec<f64> = v.coords.iter().map(|c| c.norm_sqr()).collect();
    Ok(weighted_sum(w, &sq))
}

pub fn mu_exact(w: &WeightSystem, v: &ExactAmbientPoint) -> Result<Vec<Q>> {
    check_len(w.n(), v.len())?;
    let half = q_frac(-1, 2);
    Ok((0..w.rank())
        .map(|a| {
            let s =
                w.weights().iter().zip(&v.coords).fold(Q::zero(), |acc, (b, c)| {
                    acc + crate::rational::qc_norm_sqr(c) * Q::from_integer(b[a].into())
                });
            &half * s + &w.theta()[a]
        })
        .collect())
}

/// Holomorphic symplectic moment map on `T*V`.
pub fn hol_moment(w: &WeightSystem, p: &CotangentPoint) -> Result<Vec<Complex64>> {
    check_len(w.n(), p.n())?;
    let prod: Vec<Complex64> = p.x.iter().zip(&p.z).map(|(x, z)| x * z).collect();
    Ok((0..w.rank())
        .map(|a| {
            let s: Complex64 = w.weights().iter().zip(&prod).map(|(b, c)| c * b[a] as f64).sum();
            Complex64::i() * s
        })
        .collect())
}

pub fn hol_moment_exact(w: &WeightSystem, p: &ExactCotangentPoint) -> Result<Vec<QComplex>> {
    check_len(w.n(), p.n())?;
    let prod: Vec<QComplex> = p.x.iter().zip(&p.z).map(|(x, z)| x * z).collect();
    Ok((0..w.rank())
        .map(|a| {
            let s = w
                .weights()
                .iter()
                .zip(&prod)
                .fold(QComplex::zero(), |acc, (b, c)| acc + c * Q::from_integer(b[a].into()));
            // √-1 · (re + i im) = -im + i re
            QComplex::new(-s.im, s.re)
        })
        .collect())
}

/// The `I`-moment map on `T*V`: `-½ Σ β^i (|x_i|² - |z_i|²) + θ`.
pub fn mu_i(w: &WeightSystem, p: &CotangentPoint) -> Result<Vec<f64>> {
    check_len(w.n(), p.n())?;
    let sq: Vec<f64> = p.x.iter().zip(&p.z).map(|(x, z)| x.norm_sqr() - z.norm_sqr()).collect();
    Ok(weighted_sum(w, &sq))
}

/// `(μ_I, Re 𝓜, Im 𝓜)`, length `3k`.
pub fn mu_hyperkahler(w: &WeightSystem, p: &CotangentPoint) -> Result<Vec<f64>> {
    let mut out = mu_i(w, p)?;
    let m = hol_moment(w, p)?;
    out.extend(m.iter().map(|c| c.re));
    out.extend(m.iter().map(|c| c.im));
    Ok(out)
}

/// `ψ = -½ ‖z‖²`.
pub fn psi(p: &CotangentPoint) -> f64 {
    -0.5 * p.z.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

pub fn psi_exact(p: &ExactCotangentPoint) -> Q {
    q_frac(-1, 2) * p.z.iter().fold(Q::zero(), |acc, c| acc + crate::rational::qc_norm_sqr(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JWeight {
    Zero,
    Infinite,
}

pub const J_WEIGHT_TOL: f64 = 1e-10;

/// J-weight of `(p, ξ)`: zero iff `x_i = sgn(λ_i)·√-1·y_i` whenever
/// `λ_i = β^i(ξ) ≠ 0`.
pub fn j_mu_weight(w: &WeightSystem, p: &CotangentPoint, xi: &Cocharacter) -> Result<JWeight> {
    w.check_xi(xi.len())?;
    check_len(w.n(), p.n())?;
    let lam = w.lambdas(&xi.to_f64());
    let ok = lam.iter().zip(p.x.iter().zip(&p.z)).all(|(l, (x, z))| {
        if *l == 0.0 {
            return true;
        }
        let target = Complex64::i() * z.conj() * l.signum();
        (x - target).norm() <= J_WEIGHT_TOL
    });
    Ok(if ok { JWeight::Zero } else { JWeight::Infinite })
}

pub fn j_mu_weight_exact(w: &WeightSystem, p: &ExactCotangentPoint, xi: &[Q]) -> Result<JWeight> {
    w.check_xi(xi.len())?;
    check_len(w.n(), p.n())?;
    let lam = w.lambdas_exact(xi);
    let ok = lam.iter().zip(p.x.iter().zip(&p.z)).all(|(l, (x, z))| {
        if l.is_zero() {
            return true;
        }
        // √-1 · conj(z) = im + √-1 re
        let iy = QComplex::new(z.im.clone(), z.re.clone());
        let target = if l.is_positive() { iy } else { -iy };
        *x == target
    });
    Ok(if ok { JWeight::Zero } else { JWeight::Infinite })
}

/// Horizon and cap for [`flow_trace`] and [`flow_limit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub horizon: f64,
    pub cap: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { horizon: 30.0, cap: 1e6 }
    }
}

fn flow_value(lam: &[f64], sq: &[f64], theta_xi: f64, t: f64, cap: f64) -> f64 {
    let v = -0.5 * lam.iter().zip(sq).map(|(l, s)| l * s * (-2.0 * l * t).exp()).sum::<f64>() + theta_xi;
    if !v.is_finite() || v > cap {
        f64::INFINITY
    } else {
        v
    }
}

/// Samples `t ↦ ⟨μ(exp(√-1 tξ) v), ξ⟩`. Values beyond `cap` (or overflowing)
/// are reported as `+∞`.
pub fn flow_trace(w: &WeightSystem, v: &AmbientPoint, xi: &[f64], t_grid: &[f64], cfg: FlowConfig) -> Result<Vec<f64>> {
    w.check_xi(xi.len())?;
    check_len(w.n(), v.len())?;
    if t_grid.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Precondition("t_grid must be increasing".into()));
    }
    let lam = w.lambdas(xi);
    let sq: Vec<f64> = v.coords.iter().map(|c| c.norm_sqr()).collect();
    let theta_xi = w.theta_pairing_f64(xi);
    Ok(t_grid.iter().map(|&t| flow_value(&lam, &sq, theta_xi, t, cfg.cap)).collect())
}

/// Tail estimate of the μ-weight: the flow value at the horizon.
pub fn flow_limit(w: &WeightSystem, v: &AmbientPoint, xi: &[f64], cfg: FlowConfig) -> Result<f64> {
    Ok(flow_trace(w, v, xi, &[cfg.horizon], cfg)?[0])
}

/// The real `J`-moment pairing `⟨Re 𝓜, ξ⟩` along the `Jξ` flow at time `t`.
/// Per coordinate the flow is `(x,y) ↦ cosh(λt)(x,y) + sinh(λt)(-√-1 y, √-1 x)`.
pub fn j_flow_value(w: &WeightSystem, p: &CotangentPoint, xi: &[f64], t: f64) -> Result<f64> {
    w.check_xi(xi.len())?;
    check_len(w.n(), p.n())?;
    let lam = w.lambdas(xi);
    let i = Complex64::i();
    let mut total = 0.0;
    for (l, (x, z)) in lam.iter().zip(p.x.iter().zip(&p.z)) {
        let y = z.conj();
        let (c, s) = ((l * t).cosh(), (l * t).sinh());
        let xt = x * c - i * y * s;
        let yt = y * c + i * x * s;
        // g(√-1 x, y) = Re(√-1 x conj y)
        total += l * (i * xt * yt.conj()).re;
    }
    Ok(total)
}
