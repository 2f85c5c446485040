//! JSON input and output. Rationals travel as `"p/q"` strings, complex
//! numbers as `["re", "im"]` pairs, and every document carries `"schema": 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::git::{StabilityVerdict, StratumRecord};
use crate::kn::KnOutcome;
use crate::rational::{format_rational, parse_rational, QComplex, Q};
use crate::rep::{AmbientPoint, CotangentPoint, ExactAmbientPoint, ExactCotangentPoint, WeightSystem};
use crate::strata::HkStratumCandidate;

pub const SCHEMA_VERSION: u32 = 1;

fn json_err(e: serde_json::Error) -> Error {
    // serde_json already reports "at line L column C".
    Error::Json(e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightSystemDoc {
    #[serde(default)]
    schema: Option<u32>,
    rank: usize,
    weights: Vec<Vec<i64>>,
    theta: Vec<Scalar>,
}

/// A scalar given either as a string (`"p/q"`, decimal) or a JSON number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Scalar {
    fn to_q(&self) -> Result<Q> {
        match self {
            Scalar::Text(s) => parse_rational(s),
            Scalar::Int(i) => Ok(Q::from_integer((*i).into())),
            // Decimal text of the double, so 0.1 means 1/10.
            Scalar::Float(f) => parse_rational(&format!("{f:e}")),
        }
    }
}

fn check_schema(v: Option<u32>) -> Result<()> {
    match v {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(Error::Json(format!("unsupported schema version {other}"))),
    }
}

pub fn parse_weight_system(text: &str) -> Result<WeightSystem> {
    let doc: WeightSystemDoc = serde_json::from_str(text).map_err(json_err)?;
    check_schema(doc.schema)?;
    let theta = doc.theta.iter().map(Scalar::to_q).collect::<Result<Vec<_>>>()?;
    WeightSystem::new(doc.rank, doc.weights, theta)
}

pub fn weight_system_to_json(w: &WeightSystem) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "rank": w.rank(),
        "weights": w.weights(),
        "theta": w.theta().iter().map(format_rational).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    #[serde(default)]
    schema: Option<u32>,
    #[serde(default)]
    coords: Option<Vec<[Scalar; 2]>>,
    #[serde(default)]
    x: Option<Vec<[Scalar; 2]>>,
    #[serde(default)]
    z: Option<Vec<[Scalar; 2]>>,
}

fn to_qc(v: &[[Scalar; 2]]) -> Result<Vec<QComplex>> {
    v.iter().map(|[re, im]| Ok(QComplex::new(re.to_q()?, im.to_q()?))).collect()
}

/// A parsed point: ambient (`{"coords": …}`) or cotangent (`{"x": …, "z": …}`).
#[derive(Debug, Clone, PartialEq)]
pub enum PointInput {
    Ambient(ExactAmbientPoint),
    Cotangent(ExactCotangentPoint),
}

pub fn parse_point(text: &str) -> Result<PointInput> {
    let doc: PointDoc = serde_json::from_str(text).map_err(json_err)?;
    check_schema(doc.schema)?;
    match (doc.coords, doc.x, doc.z) {
        (Some(c), None, None) => Ok(PointInput::Ambient(AmbientPoint::new(to_qc(&c)?))),
        (None, Some(x), z) => {
            let x = to_qc(&x)?;
            let z = match z {
                Some(z) => to_qc(&z)?,
                None => vec![QComplex::new(Q::from_integer(0.into()), Q::from_integer(0.into())); x.len()],
            };
            Ok(PointInput::Cotangent(CotangentPoint::new(x, z)?))
        }
        _ => Err(Error::Json("a point needs either \"coords\" or \"x\" (with optional \"z\")".into())),
    }
}

pub fn complex_json(c: &Complex64) -> Value {
    json!([c.re, c.im])
}

pub fn complex_list(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(complex_json).collect())
}

pub fn exact_complex_list(v: &[QComplex]) -> Value {
    Value::Array(v.iter().map(|c| json!([format_rational(&c.re), format_rational(&c.im)])).collect())
}

pub fn ambient_point_json(p: &AmbientPoint) -> Value {
    json!({ "coords": complex_list(&p.coords) })
}

pub fn cotangent_point_json(p: &CotangentPoint) -> Value {
    json!({ "x": complex_list(&p.x), "z": complex_list(&p.z) })
}

pub fn verdict_json(v: &StabilityVerdict) -> Value {
    json!({
        "status": v.status.as_str(),
        "certificate": v.certificate.as_ref().and_then(|c| c.to_integer()),
    })
}

/// Finite floats as numbers; non-finite ones as strings.
pub fn float_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("+inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

pub fn kn_outcome_json<P>(o: &KnOutcome<P>, rep: impl Fn(&P) -> Value) -> Value {
    json!({
        "status": o.status,
        "iterations": o.iterations,
        "xi_star": o.xi_star,
        "residual": o.residual.map(float_json),
        "representative": o.representative.as_ref().map(rep),
        "certificate": o.certificate.as_ref().and_then(|c| c.to_integer()),
    })
}

pub fn strata_json(s: &[StratumRecord]) -> Value {
    Value::Array(
        s.iter()
            .map(|r| {
                json!({
                    "stabilizer": stabilizer_json(&r.stabilizer),
                    "open": r.open,
                    "supports": r.supports,
                })
            })
            .collect(),
    )
}

pub fn stabilizer_json(s: &crate::git::StabilizerInfo) -> Value {
    json!({
        "subtorus_rank": s.subtorus_rank,
        "finite_invariants": s.finite_invariants,
        "order": s.order(),
        "description": s.describe(),
    })
}

pub fn candidate_json(c: &HkStratumCandidate) -> Value {
    json!({
        "support_x": c.support_pair.0,
        "support_z": c.support_pair.1,
        "stabilizer": stabilizer_json(&c.stabilizer),
        "status": c.status,
        "attempts": c.attempts,
        "witness": c.witness.as_ref().map(cotangent_point_json),
    })
}

/// Rounds to 12 significant digits for stable report output.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{x:.11e}");
    s.parse().unwrap_or(x)
}

pub fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| json!(round12(m[(r, c)]))).collect())).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_frac};

    #[test]
    fn weight_system_round_trip() {
        let text = r#"{"rank": 2, "weights": [[1,0],[1,0],[0,1],[-1,1]], "theta": ["1/2", "1/2"]}"#;
        let w = parse_weight_system(text).unwrap();
        assert_eq!(w.theta(), &[q_frac(1, 2), q_frac(1, 2)]);
        let back = parse_weight_system(&weight_system_to_json(&w).to_string()).unwrap();
        assert_eq!(back, w);
        let w = parse_weight_system(r#"{"rank": 1, "weights": [[1]], "theta": [0.25]}"#).unwrap();
        assert_eq!(w.theta(), &[q_frac(1, 4)]);
    }

    #[test]
    fn bad_inputs() {
        let e = parse_weight_system(r#"{"rank": 1, "weights": [[1]], "theta": ["1/0"]}"#).unwrap_err();
        assert!(matches!(e, Error::ParseRational(_)));
        let e = parse_weight_system("{\n  \"rank\": 1,\n  \"weights\": [[1]\n}").unwrap_err();
        match e {
            Error::Json(m) => assert!(m.contains("line 4"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_weight_system(r#"{"rank": 2, "weights": [[1]], "theta": ["1","1"]}"#).is_err());
        assert!(parse_weight_system(r#"{"schema": 2, "rank": 1, "weights": [[1]], "theta": ["1"]}"#).is_err());
    }

    #[test]
    fn points() {
        match parse_point(r#"{"coords": [["1","0"], ["0.5", "-1/3"]]}"#).unwrap() {
            PointInput::Ambient(p) => assert_eq!(p.coords[1], QComplex::new(q_frac(1, 2), q_frac(-1, 3))),
            other => panic!("{other:?}"),
        }
        match parse_point(r#"{"x": [["1","0"]]}"#).unwrap() {
            PointInput::Cotangent(p) => assert_eq!(p.z[0], QComplex::new(q(0), q(0))),
            other => panic!("{other:?}"),
        }
        assert!(parse_point(r#"{"x": [["1","0"]], "z": []}"#).is_err());
    }
}
