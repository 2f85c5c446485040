use std::fs;

use hkquot::git::{
    classify_point, classify_support, destabilizing_subspaces, kahler_strata, quotient_compact, quotient_smooth,
    unstable_maximal_supports, Locus,
};
use hkquot::json::{
    ambient_point_json, candidate_json, cotangent_point_json, kn_outcome_json, matrix_json, parse_point,
    parse_weight_system, round12, stabilizer_json, strata_json, verdict_json, weight_system_to_json, PointInput,
    SCHEMA_VERSION,
};
use hkquot::kn::{solve_hyperkahler, solve_kahler, KnConfig, KnOutcome};
use hkquot::moment::{flow_trace, hol_moment, mu_hyperkahler, norm, FlowConfig};
use hkquot::reduction::{
    circle_action_check, horizontal_frame, quaternion_check, zero_section_check, FRAME_MOMENT_TOL,
};
use hkquot::rep::{AmbientPoint, CotangentPoint, IndexSet, Quaternion, WeightSystem};
use hkquot::strata::{certify_stratum, group_by_stabilizer, hirzebruch_suite, hk_candidate_strata};
use hkquot::{parse_rational, Error};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{Cli, Command, Failure, Mode, RunConfig};

pub struct Output {
    pub document: Value,
    /// Set when the document was produced but the run still failed.
    pub failure: Option<Failure>,
}

impl Output {
    fn ok(document: Value) -> Self {
        Output { document, failure: None }
    }
}

type CmdResult = Result<Output, Failure>;

pub fn run(cli: &Cli) -> CmdResult {
    let run = &cli.run;
    if !(run.tol > 0.0 && run.tol.is_finite()) {
        return Err(Failure::Precondition(format!("--tol must be positive, got {}", run.tol)));
    }
    match &cli.command {
        Command::Analyze { weights, certify } => analyze(&load_weights(weights)?, *certify, run),
        Command::Classify { weights, point } => classify(&load_weights(weights)?, &load_point(point)?, run),
        Command::Kn { weights, point, hyperkahler, trace } => {
            kn(&load_weights(weights)?, &load_point(point)?, *hyperkahler, trace.as_deref(), run)
        }
        Command::Metric { weights, point, pairs } => {
            let pairs = pairs.as_deref().map(load_pairs).transpose()?;
            metric(&load_weights(weights)?, &load_point(point)?, pairs, run)
        }
        Command::Hirzebruch { n, c0, c1 } => hirzebruch(*n, c0, c1, run),
    }
}

/// Inline JSON when the argument starts with `{` or `[`, a file path otherwise.
fn read_input(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Precondition(format!("cannot read {arg}: {e}")))
}

fn load_weights(arg: &str) -> Result<WeightSystem, Failure> {
    Ok(parse_weight_system(&read_input(arg)?)?)
}

fn load_point(arg: &str) -> Result<PointInput, Failure> {
    Ok(parse_point(&read_input(arg)?)?)
}

fn load_pairs(arg: &str) -> Result<Vec<[Vec<f64>; 2]>, Failure> {
    serde_json::from_str(&read_input(arg)?).map_err(|e| Failure::Precondition(format!("pairs: {e}")))
}

fn with_schema(mut v: Value, command: &str) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(command));
    }
    v
}

fn supports(v: &[IndexSet]) -> Value {
    json!(v)
}

fn analyze(w: &WeightSystem, certify: bool, run: &RunConfig) -> CmdResult {
    let d = w.doubled();
    let nonzero = |v: Vec<IndexSet>| -> Vec<IndexSet> { v.into_iter().filter(|s| !s.is_empty()).collect() };
    let unstable = nonzero(destabilizing_subspaces(w, Locus::Unstable, run.bound)?);
    let maximal = unstable_maximal_supports(w, run.bound)?;
    let d_unstable = nonzero(destabilizing_subspaces(&d, Locus::Unstable, 2 * run.bound)?);
    let d_maximal = unstable_maximal_supports(&d, 2 * run.bound)?;
    let compact = quotient_compact(w);
    let smooth = quotient_smooth(w, run.bound)?;
    let strata = kahler_strata(w, run.bound)?;
    let mut candidates = hk_candidate_strata(w, run.bound)?;
    if certify {
        candidates = candidates
            .par_iter()
            .enumerate()
            .map(|(i, c)| certify_stratum(w, c, run.seed.wrapping_add(i as u64)))
            .collect::<hkquot::Result<_>>()?;
    }
    let groups: Vec<Value> = group_by_stabilizer(&candidates)
        .into_iter()
        .map(|(st, cs)| {
            json!({
                "stabilizer": stabilizer_json(&st),
                "candidates": cs.into_iter().map(candidate_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "weights": weight_system_to_json(w),
        "unstable_subspaces": supports(&unstable),
        "unstable_maximal": supports(&maximal),
        "cotangent_unstable_subspaces": supports(&d_unstable),
        "cotangent_unstable_maximal": supports(&d_maximal),
        "compactness": serde_json::to_value(&compact).expect("serializable"),
        "smoothness": serde_json::to_value(&smooth).expect("serializable"),
        "kahler_strata": strata_json(&strata),
        "hyperkahler_candidates": groups,
        "hyperkahler_candidate_count": candidates.len(),
        "certified": certify,
    });
    Ok(Output::ok(with_schema(doc, "analyze")))
}

fn classify(w: &WeightSystem, p: &PointInput, run: &RunConfig) -> CmdResult {
    let (space, support, verdict) = match (p, run.mode) {
        (PointInput::Ambient(a), Mode::Exact) => ("V", a.support(), classify_point(w, a)?),
        (PointInput::Ambient(a), Mode::Numeric) => {
            let s = a.to_f64().support_within(run.tol);
            ("V", s.clone(), classify_support(w, &s)?)
        }
        (PointInput::Cotangent(c), Mode::Exact) => {
            let d = c.as_doubled();
            ("T*V", d.support(), classify_point(&w.doubled(), &d)?)
        }
        (PointInput::Cotangent(c), Mode::Numeric) => {
            let s = c.as_doubled().to_f64().support_within(run.tol);
            ("T*V", s.clone(), classify_support(&w.doubled(), &s)?)
        }
    };
    let mut doc = verdict_json(&verdict);
    doc["space"] = json!(space);
    doc["support"] = json!(support);
    Ok(Output::ok(with_schema(doc, "classify")))
}

fn kn_config(run: &RunConfig) -> KnConfig {
    let mut cfg = KnConfig { tol: run.tol, ..KnConfig::default() };
    if run.mode == Mode::Numeric {
        cfg.support_threshold = run.tol;
    }
    cfg
}

fn as_cotangent(p: &PointInput) -> CotangentPoint {
    match p {
        PointInput::Ambient(a) => CotangentPoint::zero_section(&a.to_f64()),
        PointInput::Cotangent(c) => c.to_f64(),
    }
}

/// Ray to trace: the solution direction, or the certificate when diverged.
fn trace_ray<P>(o: &KnOutcome<P>) -> Option<(Vec<f64>, f64)> {
    if let Some(xi) = &o.xi_star {
        return Some((xi.clone(), 2.0));
    }
    o.certificate.as_ref().map(|c| (c.to_f64(), FlowConfig::default().horizon))
}

fn write_trace(path: &str, w: &WeightSystem, v: &AmbientPoint, ray: Option<(Vec<f64>, f64)>) -> Result<(), Failure> {
    let mut out = String::from("t,pairing\n");
    if let Some((xi, end)) = ray {
        let grid: Vec<f64> = (0..=60).map(|i| end * i as f64 / 60.0).collect();
        let values = flow_trace(w, v, &xi, &grid, FlowConfig::default())?;
        for (t, val) in grid.iter().zip(values) {
            out.push_str(&format!("{t},{val:e}\n"));
        }
    }
    fs::write(path, out).map_err(|e| Failure::Precondition(format!("cannot write {path}: {e}")))
}

fn kn(w: &WeightSystem, p: &PointInput, hyperkahler: bool, trace: Option<&str>, run: &RunConfig) -> CmdResult {
    let cfg = kn_config(run);
    let doc = if hyperkahler {
        let c = as_cotangent(p);
        let out = solve_hyperkahler(w, &c, &cfg)?;
        if let Some(path) = trace {
            write_trace(path, &w.doubled(), &c.as_doubled(), trace_ray(&out))?;
        }
        let mut doc = kn_outcome_json(&out, cotangent_point_json);
        doc["space"] = json!("T*V");
        doc
    } else {
        let v = match p {
            PointInput::Ambient(a) => a.to_f64(),
            PointInput::Cotangent(_) => {
                return Err(Failure::Precondition("a cotangent point needs --hyperkahler".into()));
            }
        };
        let out = solve_kahler(w, &v, &cfg)?;
        if let Some(path) = trace {
            write_trace(path, w, &v, trace_ray(&out))?;
        }
        let mut doc = kn_outcome_json(&out, ambient_point_json);
        doc["space"] = json!("V");
        doc
    };
    Ok(Output::ok(with_schema(doc, "kn")))
}

fn metric(w: &WeightSystem, p: &PointInput, pairs: Option<Vec<[Vec<f64>; 2]>>, run: &RunConfig) -> CmdResult {
    let mut base = as_cotangent(p);
    let mut normalized = false;
    if norm(&mu_hyperkahler(w, &base)?) >= FRAME_MOMENT_TOL {
        let hol = hol_moment(w, &base)?;
        if hol.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() >= FRAME_MOMENT_TOL {
            return Err(
                Error::MomentResidual { residual: norm(&mu_hyperkahler(w, &base)?), tol: FRAME_MOMENT_TOL }.into()
            );
        }
        // Move along the complexified orbit onto μ_I = 0.
        let out = solve_hyperkahler(w, &base, &kn_config(run))?;
        base = out
            .representative
            .ok_or_else(|| Failure::Precondition("point is unstable; its orbit does not meet the level set".into()))?;
        normalized = true;
    }
    let frame = horizontal_frame(w, &base)?;
    let eig = frame.metric_gram().symmetric_eigen().eigenvalues;
    let mut grams = serde_json::Map::new();
    grams.insert("metric".into(), matrix_json(&frame.metric_gram()));
    for (name, op) in [("omega_I", Quaternion::I), ("omega_J", Quaternion::J), ("omega_K", Quaternion::K)] {
        grams.insert(name.into(), matrix_json(&frame.form_gram(op)));
    }
    let circle = circle_action_check(&frame, Complex64::i())?;
    let zero_section = if base.z.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        Some(zero_section_check(w, &AmbientPoint::new(base.x.clone()))?)
    } else {
        None
    };
    let mut pair_values = Vec::new();
    for [u, v] in pairs.unwrap_or_default() {
        let (pu, pv) = (frame.project(&u)?, frame.project(&v)?);
        let offset = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let mut entry = json!({
            "metric": round12(frame.reduced_metric(&pu, &pv)?),
            "vertical_u": round12(offset(&u, &pu)),
            "vertical_v": round12(offset(&v, &pv)),
        });
        for (name, op) in [("omega_I", Quaternion::I), ("omega_J", Quaternion::J), ("omega_K", Quaternion::K)] {
            entry[name] = json!(round12(frame.reduced_form(op, &pu, &pv)?));
        }
        pair_values.push(entry);
    }
    let doc = json!({
        "base": cotangent_point_json(&base),
        "normalized": normalized,
        "dimension": frame.dimension(),
        "expected_dimension": 4 * w.n() - 4 * w.rank(),
        "ambient_dimension": frame.ambient_dimension(),
        "quaternion_deviation": round12(quaternion_check(&frame)),
        "orthogonality_defect": round12(frame.orthogonality_defect()),
        "metric_min_eigenvalue": round12(eig.min()),
        "gram": Value::Object(grams),
        "circle_action": serde_json::to_value(&circle).expect("serializable"),
        "zero_section": zero_section.map(|z| serde_json::to_value(&z).expect("serializable")),
        "pairs": pair_values,
    });
    Ok(Output::ok(with_schema(doc, "metric")))
}

fn hirzebruch(n: i64, c0: &str, c1: &str, run: &RunConfig) -> CmdResult {
    let c0 = parse_rational(c0)?;
    let c1 = parse_rational(c1)?;
    let report = hirzebruch_suite(n, &c0, &c1, run.seed)?;
    let passed = report.passed();
    let mut doc = serde_json::to_value(&report).expect("serializable");
    doc["passed"] = json!(passed);
    let failure = (!passed).then(|| {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Failure::Assertion(format!("failed checks: {}", failed.join(", ")))
    });
    Ok(Output { document: with_schema(doc, "hirzebruch"), failure })
}
