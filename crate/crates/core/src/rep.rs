//! Weight systems, points of `V = C^n` and `T*V`, the torus action, and the
//! flat quaternionic structure on the real model `V_R ⊕ V_R`.
//!
//! Coordinate `i` of `V` carries the character `β^i ∈ Z^k`; a Lie algebra
//! element `ξ` acts on it by `√-1·β^i(ξ)`. Fiber coordinates `z_i` of `T*V`
//! carry `-β^i`. The real model of a cotangent point `(x, z)` is the vector
//! `(x, y)` with `y = conj(z)`, laid out as `4n` reals
//! `[Re x_0, Im x_0, .., Re x_{n-1}, Im x_{n-1}, Re y_0, Im y_0, ..]`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rational::{dot_int_f64, dot_int_q, primitive_integer, to_f64, QComplex, Q};

/// Numeric coordinates with modulus below this count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

pub type IndexSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    rank: usize,
    weights: Vec<Vec<i64>>,
    theta: Vec<Q>,
}

impl WeightSystem {
    pub fn new(rank: usize, weights: Vec<Vec<i64>>, theta: Vec<Q>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidWeightSystem("rank must be at least 1".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidWeightSystem("at least one weight is required".into()));
        }
        if let Some(i) = weights.iter().position(|w| w.len() != rank) {
            return Err(Error::InvalidWeightSystem(format!(
                "weight {i} has length {} but rank is {rank}",
                weights[i].len()
            )));
        }
        if theta.len() != rank {
            return Err(Error::InvalidWeightSystem(format!("theta has length {} but rank is {rank}", theta.len())));
        }
        Ok(Self { rank, weights, theta })
    }

    /// Torus dimension `k`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of coordinates `n`.
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize) -> &[i64] {
        &self.weights[i]
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn theta(&self) -> &[Q] {
        &self.theta
    }

    pub fn theta_f64(&self) -> Vec<f64> {
        self.theta.iter().map(to_f64).collect()
    }

    /// The weight system of `T*V = V ⊕ V*`: weights `(β, -β)`, same `θ`.
    pub fn doubled(&self) -> WeightSystem {
        let mut weights = self.weights.clone();
        weights.extend(self.weights.iter().map(|w| w.iter().map(|b| -b).collect::<Vec<_>>()));
        WeightSystem { rank: self.rank, weights, theta: self.theta.clone() }
    }

    /// Eigenvalues `λ_i = β^i(ξ)`.
    pub fn lambdas(&self, xi: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| dot_int_f64(w, xi)).collect()
    }

    pub fn lambdas_exact(&self, xi: &[Q]) -> Vec<Q> {
        self.weights.iter().map(|w| dot_int_q(w, xi)).collect()
    }

    pub fn theta_pairing(&self, xi: &[Q]) -> Q {
        self.theta.iter().zip(xi).fold(Q::zero(), |acc, (t, x)| acc + t * x)
    }

    pub fn theta_pairing_f64(&self, xi: &[f64]) -> f64 {
        self.theta.iter().zip(xi).map(|(t, x)| to_f64(t) * x).sum()
    }

    pub(crate) fn check_xi(&self, len: usize) -> Result<()> {
        check_len(self.rank, len)
    }
}

/// Free function form of [`WeightSystem::doubled`].
pub fn doubled_weights(w: &WeightSystem) -> WeightSystem {
    w.doubled()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CocharacterRepr", from = "CocharacterRepr")]
pub enum Cocharacter {
    Exact(Vec<Q>),
    Numeric(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum CocharacterRepr {
    Exact {
        #[serde(with = "crate::rational::q_vec")]
        xi: Vec<Q>,
    },
    Numeric {
        xi: Vec<f64>,
    },
}

impl From<Cocharacter> for CocharacterRepr {
    fn from(c: Cocharacter) -> Self {
        match c {
            Cocharacter::Exact(xi) => CocharacterRepr::Exact { xi },
            Cocharacter::Numeric(xi) => CocharacterRepr::Numeric { xi },
        }
    }
}

impl From<CocharacterRepr> for Cocharacter {
    fn from(c: CocharacterRepr) -> Self {
        match c {
            CocharacterRepr::Exact { xi } => Cocharacter::Exact(xi),
            CocharacterRepr::Numeric { xi } => Cocharacter::Numeric(xi),
        }
    }
}

impl Cocharacter {
    pub fn integer(v: &[i64]) -> Self {
        Cocharacter::Exact(v.iter().map(|&x| Q::from_integer(x.into())).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Cocharacter::Exact(v) => v.len(),
            Cocharacter::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Cocharacter::Exact(v) => v.iter().map(to_f64).collect(),
            Cocharacter::Numeric(v) => v.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&[Q]> {
        match self {
            Cocharacter::Exact(v) => Some(v),
            Cocharacter::Numeric(_) => None,
        }
    }

    /// Primitive integer representative; `None` for numeric or zero cocharacters.
    pub fn to_integer(&self) -> Option<Vec<i64>> {
        self.as_exact().and_then(primitive_integer)
    }
}

/// A coordinate scalar: floating complex or exact Gaussian rational.
pub trait Coordinate: Clone {
    fn is_zero_within(&self, threshold: f64) -> bool;
    fn modulus_sqr_f64(&self) -> f64;
}

impl Coordinate for Complex64 {
    fn is_zero_within(&self, threshold: f64) -> bool {
        self.norm() < threshold
    }
    fn modulus_sqr_f64(&self) -> f64 {
        self.norm_sqr()
    }
}

impl Coordinate for QComplex {
    fn is_zero_within(&self, _threshold: f64) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn modulus_sqr_f64(&self) -> f64 {
        to_f64(&(&self.re * &self.re + &self.im * &self.im))
    }
}

fn support_of<C: Coordinate>(coords: &[C], threshold: f64) -> IndexSet {
    coords.iter().enumerate().filter(|(_, c)| !c.is_zero_within(threshold)).map(|(i, _)| i).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint<C = Complex64> {
    pub coords: Vec<C>,
}

pub type ExactAmbientPoint = AmbientPoint<QComplex>;

impl<C: Coordinate> AmbientPoint<C> {
    pub fn new(coords: Vec<C>) -> Self {
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> IndexSet {
        support_of(&self.coords, ZERO_THRESHOLD)
    }

    pub fn support_within(&self, threshold: f64) -> IndexSet {
        support_of(&self.coords, threshold)
    }
}

impl AmbientPoint<Complex64> {
    pub fn from_real_parts(re_im: &[(f64, f64)]) -> Self {
        Self::new(re_im.iter().map(|&(r, i)| Complex64::new(r, i)).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Real model `[Re v_0, Im v_0, ..]` of length `2n`.
    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|c| [c.re, c.im]).collect()
    }
}

impl ExactAmbientPoint {
    pub fn to_f64(&self) -> AmbientPoint {
        AmbientPoint::new(self.coords.iter().map(crate::rational::qc_to_f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint<C = Complex64> {
    /// Base coordinates, weights `β`.
    pub x: Vec<C>,
    /// Fiber coordinates, weights `-β`.
    pub z: Vec<C>,
}

pub type ExactCotangentPoint = CotangentPoint<QComplex>;

impl<C: Coordinate> CotangentPoint<C> {
    pub fn new(x: Vec<C>, z: Vec<C>) -> Result<Self> {
        check_len(x.len(), z.len())?;
        Ok(Self { x, z })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `(supp x, supp z)`.
    pub fn support(&self) -> (IndexSet, IndexSet) {
        self.support_within(ZERO_THRESHOLD)
    }

    pub fn support_within(&self, threshold: f64) -> (IndexSet, IndexSet) {
        (support_of(&self.x, threshold), support_of(&self.z, threshold))
    }

    /// Support as a single index set of the doubled system (`z_i` ↦ `n + i`).
    pub fn doubled_support(&self) -> IndexSet {
        let (sx, sz) = self.support();
        let n = self.n();
        sx.into_iter().chain(sz.into_iter().map(|i| i + n)).collect()
    }

    /// The concatenation `(x, z)` as a point of the doubled system.
    pub fn as_doubled(&self) -> AmbientPoint<C> {
        AmbientPoint::new(self.x.iter().chain(&self.z).cloned().collect())
    }

    pub fn from_doubled(p: &AmbientPoint<C>) -> Result<Self> {
        if !p.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: p.len() + 1, got: p.len() });
        }
        let n = p.len() / 2;
        Ok(Self { x: p.coords[..n].to_vec(), z: p.coords[n..].to_vec() })
    }
}

impl CotangentPoint<Complex64> {
    pub fn zero_section(x: &AmbientPoint) -> Self {
        Self { x: x.coords.clone(), z: vec![Complex64::zero(); x.len()] }
    }

    /// `y = conj(z)`.
    pub fn y(&self) -> Vec<Complex64> {
        self.z.iter().map(|c| c.conj()).collect()
    }

    /// Real model `(x, y)` as `4n` reals.
    pub fn to_real(&self) -> Vec<f64> {
        self.x.iter().chain(self.y().iter()).flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        if !v.len().is_multiple_of(4) {
            return Err(Error::DimensionMismatch { expected: v.len() - v.len() % 4, got: v.len() });
        }
        let n = v.len() / 4;
        let c = |j: usize| Complex64::new(v[2 * j], v[2 * j + 1]);
        let x = (0..n).map(c).collect();
        let z = (n..2 * n).map(|j| c(j).conj()).collect();
        Ok(Self { x, z })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.iter().chain(&self.z).map(|c| c.norm_sqr()).sum()
    }
}

impl ExactCotangentPoint {
    pub fn to_f64(&self) -> CotangentPoint {
        let f = |v: &[QComplex]| v.iter().map(crate::rational::qc_to_f64).collect();
        CotangentPoint { x: f(&self.x), z: f(&self.z) }
    }
}

/// Points on which the torus acts.
pub trait TorusPoint: Sized {
    fn coordinate_count(&self) -> usize;
    /// Multiplies coordinate `i` (of the base) by `factor(β^i)`, and fiber
    /// coordinates by the factor for `-β^i`.
    fn scale_by(&self, factors: &[Complex64], fiber_factors: &[Complex64]) -> Self;
}

impl TorusPoint for AmbientPoint {
    fn coordinate_count(&self) -> usize {
        self.len()
    }
    fn scale_by(&self, factors: &[Complex64], _fiber: &[Complex64]) -> Self {
        AmbientPoint::new(self.coords.iter().zip(factors).map(|(c, f)| c * f).collect())
    }
}

impl TorusPoint for CotangentPoint {
    fn coordinate_count(&self) -> usize {
        self.n()
    }
    fn scale_by(&self, factors: &[Complex64], fiber: &[Complex64]) -> Self {
        CotangentPoint {
            x: self.x.iter().zip(factors).map(|(c, f)| c * f).collect(),
            z: self.z.iter().zip(fiber).map(|(c, f)| c * f).collect(),
        }
    }
}

/// `exp(√-1·t·ξ)·p`: base coordinate `i` scales by `exp(-β^i(ξ) t)`, fiber
/// coordinate `i` by `exp(+β^i(ξ) t)`.
pub fn act_imaginary<P: TorusPoint>(w: &WeightSystem, xi: &Cocharacter, t: f64, p: &P) -> Result<P> {
    w.check_xi(xi.len())?;
    check_len(w.n(), p.coordinate_count())?;
    let lam = w.lambdas(&xi.to_f64());
    let base: Vec<Complex64> = lam.iter().map(|l| Complex64::from((-l * t).exp())).collect();
    let fiber: Vec<Complex64> = lam.iter().map(|l| Complex64::from((l * t).exp())).collect();
    Ok(p.scale_by(&base, &fiber))
}

/// The compact torus element `exp(ξ)`: base coordinate `i` picks up the phase
/// `exp(√-1 β^i(ξ))`, fiber coordinate the inverse phase.
pub fn act_compact<P: TorusPoint>(w: &WeightSystem, angles: &[f64], p: &P) -> Result<P> {
    w.check_xi(angles.len())?;
    check_len(w.n(), p.coordinate_count())?;
    let lam = w.lambdas(angles);
    let base: Vec<Complex64> = lam.iter().map(|l| Complex64::from_polar(1.0, *l)).collect();
    let fiber: Vec<Complex64> = base.iter().map(|c| c.conj()).collect();
    Ok(p.scale_by(&base, &fiber))
}

/// Exact action of the torus element `(t_1, .., t_k) ∈ (Q^×)^k`: coordinate
/// `i` scales by `Π t_a^{β^i_a}`.
pub fn act_torus_exact(w: &WeightSystem, element: &[Q], p: &ExactCotangentPoint) -> Result<ExactCotangentPoint> {
    w.check_xi(element.len())?;
    check_len(w.n(), p.n())?;
    if element.iter().any(Zero::is_zero) {
        return Err(Error::Precondition("torus element has a zero entry".into()));
    }
    let chars: Vec<Q> = w.weights().iter().map(|b| character_value(b, element)).collect();
    let scale = |c: &QComplex, f: &Q| QComplex::new(&c.re * f, &c.im * f);
    Ok(CotangentPoint {
        x: p.x.iter().zip(&chars).map(|(c, f)| scale(c, f)).collect(),
        z: p.z.iter().zip(&chars).map(|(c, f)| scale(c, &f.recip())).collect(),
    })
}

/// `Π t_a^{b_a}` for an integer character `b`.
pub fn character_value(b: &[i64], t: &[Q]) -> Q {
    b.iter().zip(t).fold(Q::one(), |acc, (e, ta)| {
        let p = num_traits::pow(ta.clone(), e.unsigned_abs() as usize);
        if *e >= 0 {
            acc * p
        } else {
            acc / p
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quaternion {
    I,
    J,
    K,
}

impl Quaternion {
    pub const ALL: [Quaternion; 3] = [Quaternion::I, Quaternion::J, Quaternion::K];
}

/// Multiplication by `√-1` on a block of complex coordinates in real layout.
fn mul_i(block: &[f64], sign: f64, out: &mut [f64]) {
    for j in 0..block.len() / 2 {
        out[2 * j] = -sign * block[2 * j + 1];
        out[2 * j + 1] = sign * block[2 * j];
    }
}

/// `I(x,y) = (Ix, -Iy)`, `J(x,y) = (-y, x)`, `K = IJ`, on real `4n`-vectors.
pub fn apply_quaternion(op: Quaternion, v: &[f64]) -> Result<Vec<f64>> {
    if !v.len().is_multiple_of(4) {
        return Err(Error::DimensionMismatch { expected: v.len() - v.len() % 4, got: v.len() });
    }
    let h = v.len() / 2;
    let (x, y) = v.split_at(h);
    let mut out = vec![0.0; v.len()];
    match op {
        Quaternion::I => {
            let (ox, oy) = out.split_at_mut(h);
            mul_i(x, 1.0, ox);
            mul_i(y, -1.0, oy);
        }
        Quaternion::J => {
            for j in 0..h {
                out[j] = -y[j];
                out[h + j] = x[j];
            }
        }
        Quaternion::K => {
            // K(x,y) = I(-y, x) = (-Iy, -Ix)
            let (ox, oy) = out.split_at_mut(h);
            mul_i(y, -1.0, ox);
            mul_i(x, -1.0, oy);
        }
    }
    Ok(out)
}

/// The triple `(I, J, K)` acting on the real model of `T*C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuaternionFrame {
    pub n: usize,
}

impl QuaternionFrame {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn apply(&self, op: Quaternion, v: &[f64]) -> Result<Vec<f64>> {
        check_len(4 * self.n, v.len())?;
        apply_quaternion(op, v)
    }

    pub fn matrix(&self, op: Quaternion) -> nalgebra::DMatrix<f64> {
        let d = 4 * self.n;
        let mut m = nalgebra::DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        for c in 0..d {
            e[c] = 1.0;
            let col = apply_quaternion(op, &e).expect("length is a multiple of 4");
            for (r, val) in col.into_iter().enumerate() {
                m[(r, c)] = val;
            }
            e[c] = 0.0;
        }
        m
    }
}
