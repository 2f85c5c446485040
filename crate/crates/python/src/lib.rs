//! Python bindings. Weight systems are exact; points are lists of Python
//! complex numbers; reports come back as plain dicts and lists.

use hkquot::git::{self, Locus};
use hkquot::json as hj;
use hkquot::kn::{self, KnConfig};
use hkquot::moment;
use hkquot::reduction::{self, ReducedFrame};
use hkquot::rep::{self, AmbientPoint, CotangentPoint, IndexSet, Quaternion};
use hkquot::strata;
use hkquot::{parse_rational, Error};
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(hkquot_py, HkquotError, PyException, "Base class for workbench errors.");
create_exception!(hkquot_py, PreconditionError, HkquotError, "Invalid input or violated precondition.");
create_exception!(hkquot_py, UndecidedError, HkquotError, "The numerical solver could not decide.");

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Undecided { .. } => UndecidedError::new_err(e.to_string()),
        other => PreconditionError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for hkquot::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

fn value_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any().unbind(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(value_to_py(py, x)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, value_to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn serde_to_py<T: serde::Serialize>(py: Python<'_>, t: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(t).map_err(|e| PyValueError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn support_of(s: Vec<usize>) -> IndexSet {
    s.into_iter().collect()
}

fn parse_op(op: &str) -> PyResult<Quaternion> {
    match op {
        "I" | "i" => Ok(Quaternion::I),
        "J" | "j" => Ok(Quaternion::J),
        "K" | "k" => Ok(Quaternion::K),
        other => Err(PyValueError::new_err(format!("unknown complex structure {other:?}; use I, J or K"))),
    }
}

/// Weights `β^i ∈ Z^k` with an exact rational character `θ ∈ Q^k`.
#[pyclass(name = "WeightSystem", module = "hkquot_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWeightSystem {
    inner: rep::WeightSystem,
}

#[pymethods]
impl PyWeightSystem {
    /// `theta` entries may be ints, floats (read as their decimal text) or strings like "1/2".
    #[new]
    fn new(rank: usize, weights: Vec<Vec<i64>>, theta: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let theta = theta
            .iter()
            .map(|t| {
                let text = if let Ok(s) = t.extract::<String>() { s } else { t.str()?.to_string() };
                parse_rational(&text).map_err(to_py_err)
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: rep::WeightSystem::new(rank, weights, theta).py_err()? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: hj::parse_weight_system(text).py_err()? })
    }

    fn to_json(&self) -> String {
        hj::weight_system_to_json(&self.inner).to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn weights(&self) -> Vec<Vec<i64>> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn theta(&self) -> Vec<String> {
        self.inner.theta().iter().map(hkquot::format_rational).collect()
    }

    /// Weights of the cotangent bundle: `β` followed by `-β`.
    fn doubled(&self) -> Self {
        Self { inner: self.inner.doubled() }
    }

    fn __repr__(&self) -> String {
        format!("WeightSystem(rank={}, weights={:?}, theta={:?})", self.rank(), self.weights(), self.theta())
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }
}

fn ambient(coords: Vec<Complex64>) -> AmbientPoint {
    AmbientPoint::new(coords)
}

fn cotangent(x: Vec<Complex64>, z: Option<Vec<Complex64>>) -> PyResult<CotangentPoint> {
    let z = z.unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); x.len()]);
    CotangentPoint::new(x, z).py_err()
}

/// Stability of a point of `C^n`, or of `T*C^n` when `z` is given.
#[pyfunction]
#[pyo3(signature = (w, x, z=None))]
fn classify(py: Python<'_>, w: &PyWeightSystem, x: Vec<Complex64>, z: Option<Vec<Complex64>>) -> PyResult<Py<PyAny>> {
    let verdict = match z {
        None => git::classify_point(&w.inner, &ambient(x)),
        Some(z) => git::classify_point(&w.inner.doubled(), &cotangent(x, Some(z))?.as_doubled()),
    }
    .py_err()?;
    value_to_py(py, &hj::verdict_json(&verdict))
}

#[pyfunction]
fn classify_support(py: Python<'_>, w: &PyWeightSystem, support: Vec<usize>) -> PyResult<Py<PyAny>> {
    let v = git::classify_support(&w.inner, &support_of(support)).py_err()?;
    value_to_py(py, &hj::verdict_json(&v))
}

/// Distinct nonzero unstable coordinate subspaces, as index lists.
#[pyfunction]
#[pyo3(signature = (w, bound=git::DEFAULT_ENUMERATION_BOUND))]
fn unstable_subspaces(w: &PyWeightSystem, bound: usize) -> PyResult<Vec<Vec<usize>>> {
    let s = git::destabilizing_subspaces(&w.inner, Locus::Unstable, bound).py_err()?;
    Ok(s.into_iter().filter(|s| !s.is_empty()).map(|s| s.into_iter().collect()).collect())
}

/// Inclusion-maximal supports of unstable points.
#[pyfunction]
#[pyo3(signature = (w, bound=git::DEFAULT_ENUMERATION_BOUND))]
fn unstable_maximal_supports(w: &PyWeightSystem, bound: usize) -> PyResult<Vec<Vec<usize>>> {
    let s = git::unstable_maximal_supports(&w.inner, bound).py_err()?;
    Ok(s.into_iter().map(|s| s.into_iter().collect()).collect())
}

#[pyfunction]
fn stabilizer(py: Python<'_>, w: &PyWeightSystem, support: Vec<usize>) -> PyResult<Py<PyAny>> {
    let st = git::stabilizer(&w.inner, &support_of(support)).py_err()?;
    value_to_py(py, &hj::stabilizer_json(&st))
}

#[pyfunction]
fn quotient_compact(py: Python<'_>, w: &PyWeightSystem) -> PyResult<Py<PyAny>> {
    serde_to_py(py, &git::quotient_compact(&w.inner))
}

#[pyfunction]
#[pyo3(signature = (w, bound=git::DEFAULT_ENUMERATION_BOUND))]
fn quotient_smooth(py: Python<'_>, w: &PyWeightSystem, bound: usize) -> PyResult<Py<PyAny>> {
    serde_to_py(py, &git::quotient_smooth(&w.inner, bound).py_err()?)
}

#[pyfunction]
#[pyo3(signature = (w, bound=git::DEFAULT_ENUMERATION_BOUND))]
fn kahler_strata(py: Python<'_>, w: &PyWeightSystem, bound: usize) -> PyResult<Py<PyAny>> {
    value_to_py(py, &hj::strata_json(&git::kahler_strata(&w.inner, bound).py_err()?))
}

/// Real moment map `μ = -½ Σ β^i |v_i|² + θ`.
#[pyfunction]
fn mu(w: &PyWeightSystem, coords: Vec<Complex64>) -> PyResult<Vec<f64>> {
    moment::mu(&w.inner, &ambient(coords)).py_err()
}

/// Holomorphic moment map `√-1 Σ β^i x_i z_i`.
#[pyfunction]
fn hol_moment(w: &PyWeightSystem, x: Vec<Complex64>, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    moment::hol_moment(&w.inner, &cotangent(x, Some(z))?).py_err()
}

/// `(μ_I, Re 𝓜, Im 𝓜)` concatenated.
#[pyfunction]
fn mu_hyperkahler(w: &PyWeightSystem, x: Vec<Complex64>, z: Vec<Complex64>) -> PyResult<Vec<f64>> {
    moment::mu_hyperkahler(&w.inner, &cotangent(x, Some(z))?).py_err()
}

fn config(tol: f64, max_iter: usize) -> KnConfig {
    KnConfig { tol, max_iter, ..KnConfig::default() }
}

/// Kempf–Ness on `C^n`. Returns a dict; raises `UndecidedError` when the
/// solver cannot conclude.
#[pyfunction]
#[pyo3(signature = (w, coords, tol=1e-10, max_iter=200))]
fn kempf_ness(
    py: Python<'_>,
    w: &PyWeightSystem,
    coords: Vec<Complex64>,
    tol: f64,
    max_iter: usize,
) -> PyResult<Py<PyAny>> {
    let out = kn::solve_kahler(&w.inner, &ambient(coords), &config(tol, max_iter)).py_err()?;
    value_to_py(py, &hj::kn_outcome_json(&out, hj::ambient_point_json))
}

/// Kempf–Ness on `T*C^n` for a point with `𝓜 = 0`.
#[pyfunction]
#[pyo3(signature = (w, x, z, tol=1e-10, max_iter=200))]
fn kempf_ness_hyperkahler(
    py: Python<'_>,
    w: &PyWeightSystem,
    x: Vec<Complex64>,
    z: Vec<Complex64>,
    tol: f64,
    max_iter: usize,
) -> PyResult<Py<PyAny>> {
    let out = kn::solve_hyperkahler(&w.inner, &cotangent(x, Some(z))?, &config(tol, max_iter)).py_err()?;
    value_to_py(py, &hj::kn_outcome_json(&out, hj::cotangent_point_json))
}

/// Primitive integer cocharacter with negative μ-weight; raises for stable points.
#[pyfunction]
fn instability_certificate(w: &PyWeightSystem, coords: Vec<Complex64>) -> PyResult<Vec<i64>> {
    let c = kn::instability_certificate(&w.inner, &ambient(coords)).py_err()?;
    c.to_integer().ok_or_else(|| PyValueError::new_err("certificate is not integral"))
}

/// Horizontal frame at a point of `μ_hk^{-1}(0)`.
#[pyclass(name = "ReducedFrame", module = "hkquot_py", frozen)]
struct PyReducedFrame {
    inner: ReducedFrame,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[pymethods]
impl PyReducedFrame {
    #[new]
    #[pyo3(signature = (w, x, z=None))]
    fn new(w: &PyWeightSystem, x: Vec<Complex64>, z: Option<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self { inner: reduction::horizontal_frame(&w.inner, &cotangent(x, z)?).py_err()? })
    }

    /// Real dimension of the horizontal space, `4n - 4k`.
    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    /// Orthonormal horizontal basis, one real vector of length `4n` per entry.
    fn basis(&self) -> Vec<Vec<f64>> {
        let h = &self.inner.horizontal;
        (0..h.ncols()).map(|j| h.column(j).iter().copied().collect()).collect()
    }

    fn project(&self, u: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.project(&u).py_err()
    }

    fn metric(&self, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        self.inner.reduced_metric(&u, &v).py_err()
    }

    /// `ω̃_A(u, v) = g̃(Au, v)` for `A` one of "I", "J", "K".
    fn form(&self, op: &str, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
        self.inner.reduced_form(parse_op(op)?, &u, &v).py_err()
    }

    fn metric_gram(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.inner.metric_gram())
    }

    fn form_gram(&self, op: &str) -> PyResult<Vec<Vec<f64>>> {
        Ok(matrix_rows(&self.inner.form_gram(parse_op(op)?)))
    }

    /// Largest deviation from the quaternion relations on the reduced operators.
    fn quaternion_check(&self) -> f64 {
        reduction::quaternion_check(&self.inner)
    }

    fn circle_action_check(&self, py: Python<'_>, lam: Complex64) -> PyResult<Py<PyAny>> {
        serde_to_py(py, &reduction::circle_action_check(&self.inner, lam).py_err()?)
    }

    fn __repr__(&self) -> String {
        format!("ReducedFrame(dimension={})", self.inner.dimension())
    }
}

/// Support pairs passing the exact necessary conditions for hyperkähler strata.
#[pyfunction]
#[pyo3(signature = (w, bound=strata::HK_ENUMERATION_BOUND, certify=false, seed=0))]
fn hk_candidate_strata(
    py: Python<'_>,
    w: &PyWeightSystem,
    bound: usize,
    certify: bool,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let mut cands = strata::hk_candidate_strata(&w.inner, bound).py_err()?;
    if certify {
        cands = cands
            .iter()
            .enumerate()
            .map(|(i, c)| strata::certify_stratum(&w.inner, c, seed.wrapping_add(i as u64)))
            .collect::<hkquot::Result<_>>()
            .py_err()?;
    }
    value_to_py(py, &Value::Array(cands.iter().map(hj::candidate_json).collect()))
}

/// Runs the Hirzebruch surface verification suite; returns the report dict.
#[pyfunction]
#[pyo3(signature = (n, c0="1", c1="1", seed=0))]
fn hirzebruch_suite(py: Python<'_>, n: i64, c0: &str, c1: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let c0 = parse_rational(c0).py_err()?;
    let c1 = parse_rational(c1).py_err()?;
    let r = strata::hirzebruch_suite(n, &c0, &c1, seed).py_err()?;
    let passed = r.passed();
    let mut v = serde_json::to_value(&r).map_err(|e| PyValueError::new_err(e.to_string()))?;
    v["passed"] = Value::Bool(passed);
    value_to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (n, c0="1", c1="1"))]
fn hirzebruch_weights(n: i64, c0: &str, c1: &str) -> PyResult<PyWeightSystem> {
    let c0 = parse_rational(c0).py_err()?;
    let c1 = parse_rational(c1).py_err()?;
    Ok(PyWeightSystem { inner: strata::hirzebruch_weights(n, &c0, &c1).py_err()? })
}

#[pymodule]
fn hkquot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("HkquotError", py.get_type::<HkquotError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("UndecidedError", py.get_type::<UndecidedError>())?;
    m.add_class::<PyWeightSystem>()?;
    m.add_class::<PyReducedFrame>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_support, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_subspaces, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_maximal_supports, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizer, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_compact, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_smooth, m)?)?;
    m.add_function(wrap_pyfunction!(kahler_strata, m)?)?;
    m.add_function(wrap_pyfunction!(mu, m)?)?;
    m.add_function(wrap_pyfunction!(hol_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mu_hyperkahler, m)?)?;
    m.add_function(wrap_pyfunction!(kempf_ness, m)?)?;
    m.add_function(wrap_pyfunction!(kempf_ness_hyperkahler, m)?)?;
    m.add_function(wrap_pyfunction!(instability_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(hk_candidate_strata, m)?)?;
    m.add_function(wrap_pyfunction!(hirzebruch_suite, m)?)?;
    m.add_function(wrap_pyfunction!(hirzebruch_weights, m)?)?;
    Ok(())
}
