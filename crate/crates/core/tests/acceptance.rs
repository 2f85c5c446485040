//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness; exits nonzero if anything fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hkquot::git::{
    classify_point, classify_support, destabilizing_subspaces, mu_weight, polystable_support, quotient_compact,
    unstable_maximal_supports, Locus, MuWeight, Status,
};
use hkquot::kn::{instability_certificate, solve_hyperkahler, solve_kahler, KnConfig, KnStatus};
use hkquot::moment::{flow_limit, hol_moment_exact, j_mu_weight, j_mu_weight_exact, FlowConfig, JWeight};
use hkquot::rational::{q, q_frac, QComplex, Q};
use hkquot::reduction::{
    ambient_potential_check, fubini_study, horizontal_frame, kahler_horizontal_basis, quaternion_check,
};
use hkquot::rep::{AmbientPoint, Cocharacter, CotangentPoint, IndexSet, WeightSystem};
use hkquot::strata::{
    hirzebruch_suite, hirzebruch_table1, hirzebruch_table2, hirzebruch_weights, nonzero_unstable_subspaces, seed_point,
};
use hkquot::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failure message for one criterion.
struct Fail(String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e.to_string())
    }
}

impl From<String> for Fail {
    fn from(s: String) -> Self {
        Fail(s)
    }
}

impl From<&str> for Fail {
    fn from(s: &str) -> Self {
        Fail(s.to_string())
    }
}

type Outcome = Result<String, Fail>;

fn set(v: &[usize]) -> IndexSet {
    v.iter().copied().collect()
}

fn sorted(mut v: Vec<IndexSet>) -> Vec<IndexSet> {
    v.sort();
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Fail> {
    if cond {
        Ok(())
    } else {
        Err(Fail(msg()))
    }
}

fn half() -> Q {
    q_frac(1, 2)
}

fn random_weights(rng: &mut ChaCha8Rng, n_max: usize, k_max: usize) -> WeightSystem {
    loop {
        let k = rng.random_range(1..=k_max);
        let n = rng.random_range(1..=n_max);
        let weights: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(-2..=2)).collect()).collect();
        let theta: Vec<Q> = (0..k).map(|_| q_frac(rng.random_range(-3..=3), rng.random_range(1..=3))).collect();
        if let Ok(w) = WeightSystem::new(k, weights, theta) {
            return w;
        }
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
}

/// Random point whose support is a random subset.
fn random_point(rng: &mut ChaCha8Rng, n: usize) -> AmbientPoint {
    AmbientPoint::new(
        (0..n).map(|_| if rng.random_bool(0.25) { Complex64::new(0.0, 0.0) } else { random_complex(rng) }).collect(),
    )
}

fn table1() -> Outcome {
    let expected_rows = sorted(hirzebruch_table1());
    for n in 1..=3 {
        let w = hirzebruch_weights(n, &q(1), &q(1))?;
        let rows = sorted(nonzero_unstable_subspaces(&w, 20)?);
        ensure(rows == expected_rows, || format!("n={n}: unstable subspaces {rows:?}"))?;
        let max = unstable_maximal_supports(&w, 20)?;
        ensure(max == vec![set(&[0, 1]), set(&[2, 3])], || format!("n={n}: inclusion-maximal {max:?}"))?;
    }
    Ok("rows {x0,x1} {y0,y1} {y1} for n=1,2,3; inclusion-maximal {x0,x1} {y0,y1}".into())
}

fn table2() -> Outcome {
    let expected = sorted(hirzebruch_table2());
    for n in 1..=3 {
        let d = hirzebruch_weights(n, &q(1), &q(1))?.doubled();
        let rows: Vec<IndexSet> =
            destabilizing_subspaces(&d, Locus::Unstable, 20)?.into_iter().filter(|s| !s.is_empty()).collect();
        let rows = sorted(rows);
        ensure(rows == expected, || format!("n={n}: {rows:?}"))?;
    }
    Ok(format!("{} rows reproduced for n=1,2,3", expected.len()))
}

fn stable_probe() -> Outcome {
    let w = hirzebruch_weights(2, &q(1), &q(1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let p = random_point(&mut rng, 4);
        let s = p.support();
        let x_nonzero = s.contains(&0) || s.contains(&1);
        let y_nonzero = s.contains(&2) || s.contains(&3);
        let v = classify_point(&w, &p)?;
        let stable = v.status == Status::Stable;
        ensure(stable == (x_nonzero && y_nonzero), || format!("{s:?} classified {:?}", v.status))?;
        ensure(v.status != Status::StrictlySemistable, || format!("{s:?} strictly semistable"))?;
        if !stable {
            ensure(v.certificate_valid(&w, &s), || format!("{s:?}: invalid certificate"))?;
        }
    }
    Ok("200 points".into())
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    q_frac(rng.random_range(-20..=20), rng.random_range(1..=7))
}

fn hol_formula() -> Outcome {
    // 𝓜 = √-1 (x0 z0 + x1 z1 - n x3 z3, y0 w0 + y1 w1) for x = (x0,x1,y0,y1), z = (z0,z1,w0,w1).
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..50 {
        let n = rng.random_range(1..=5i64);
        let w = hirzebruch_weights(n, &q(1), &q(1))?;
        let mut pt =
            || -> Vec<QComplex> { (0..4).map(|_| QComplex::new(random_q(&mut rng), random_q(&mut rng))).collect() };
        let (x, z) = (pt(), pt());
        let p = CotangentPoint::new(x.clone(), z.clone())?;
        let got = hol_moment_exact(&w, &p)?;
        let i = QComplex::new(q(0), q(1));
        let nq = QComplex::new(q(n), q(0));
        let first = &i * (&x[0] * &z[0] + &x[1] * &z[1] - &nq * &x[3] * &z[3]);
        let second = &i * (&x[2] * &z[2] + &x[3] * &z[3]);
        ensure(got == vec![first, second], || format!("trial {trial}: {got:?}"))?;
    }
    Ok("50 exact points, identical".into())
}

fn mu_weight_flow() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut finite, mut infinite) = (0, 0);
    for trial in 0..100 {
        let w = random_weights(&mut rng, 6, 3);
        let v = random_point(&mut rng, w.n());
        let xi: Vec<i64> = (0..w.rank()).map(|_| rng.random_range(-2..=2)).collect();
        let comb = mu_weight(&w, &v, &Cocharacter::integer(&xi))?;
        let xf: Vec<f64> = xi.iter().map(|&a| a as f64).collect();
        let tail = flow_limit(&w, &v, &xf, FlowConfig::default())?;
        match comb {
            MuWeight::Infinite => {
                infinite += 1;
                ensure(tail == f64::INFINITY, || format!("trial {trial}: combinatorial +inf, flow tail {tail}"))?;
            }
            MuWeight::Finite(val) => {
                finite += 1;
                let val = hkquot::rational::to_f64(&val);
                ensure((tail - val).abs() < 1e-9, || format!("trial {trial}: {val} vs flow tail {tail}"))?;
            }
        }
    }
    Ok(format!("{finite} finite, {infinite} infinite"))
}

fn kempf_ness() -> Outcome {
    let cfg = KnConfig::default();
    let w = WeightSystem::new(1, vec![vec![1]], vec![half()])?;
    let r = solve_kahler(&w, &AmbientPoint::new(vec![Complex64::new(2.0, 0.0)]), &cfg)?;
    let xi = r.xi_star.clone().ok_or("scalar case did not converge")?;
    ensure((xi[0] - 2f64.ln()).abs() < 1e-10, || format!("xi* = {}", xi[0]))?;
    ensure(r.residual.unwrap_or(1.0) < 1e-10, || format!("residual {:?}", r.residual))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut conv, mut div, mut undecided) = (0, 0, 0);
    for trial in 0..200 {
        let w = random_weights(&mut rng, 6, 3);
        let v = random_point(&mut rng, w.n());
        let verdict = classify_point(&w, &v)?;
        match solve_kahler(&w, &v, &cfg) {
            Ok(o) if o.status == KnStatus::Diverged => {
                div += 1;
                ensure(verdict.status == Status::Unstable, || {
                    format!("trial {trial}: diverged on {:?}", verdict.status)
                })?;
                let c = o.certificate.ok_or_else(|| format!("trial {trial}: no certificate"))?;
                match mu_weight(&w, &v, &c)? {
                    MuWeight::Finite(m) if m < q(0) => {}
                    other => return Err(Fail(format!("trial {trial}: certificate mu-weight {other:?}"))),
                }
                let again = instability_certificate(&w, &v)?;
                ensure(matches!(mu_weight(&w, &v, &again)?, MuWeight::Finite(m) if m < q(0)), || {
                    format!("trial {trial}: instability_certificate invalid")
                })?;
            }
            Ok(o) => {
                conv += 1;
                ensure(verdict.status != Status::Unstable, || format!("trial {trial}: converged on unstable point"))?;
                ensure(o.residual.unwrap_or(1.0) < 1e-9, || format!("trial {trial}: residual {:?}", o.residual))?;
            }
            Err(Error::Undecided { .. }) => {
                undecided += 1;
                ensure(verdict.status == Status::StrictlySemistable && !polystable_support(&w, &v.support())?, || {
                    format!("trial {trial}: undecided on {:?}", verdict.status)
                })?;
            }
            Err(e) => return Err(Fail(format!("trial {trial}: {e}"))),
        }
    }
    Ok(format!(
        "ln 2 case ok; random: {conv} converged, {div} diverged, {undecided} undecided (semistable, orbit not closed)"
    ))
}

fn fs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for n in 1..=2usize {
        let w = WeightSystem::new(1, vec![vec![1]; n + 1], vec![half()])?;
        for _ in 0..10 {
            let raw: Vec<Complex64> = (0..=n).map(|_| random_complex(&mut rng)).collect();
            let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let v: Vec<Complex64> = raw.iter().map(|c| c / norm).collect();
            let x = AmbientPoint::new(v.clone());
            let frame = horizontal_frame(&w, &CotangentPoint::zero_section(&x))?;
            ensure(frame.dimension() == 4 * n, || format!("dimension {}", frame.dimension()))?;
            let basis = kahler_horizontal_basis(&w, &x)?;
            let cols: Vec<Vec<f64>> = (0..basis.ncols()).map(|j| basis.column(j).iter().copied().collect()).collect();
            let as_complex =
                |u: &[f64]| -> Vec<Complex64> { u.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect() };
            let lifted: Vec<Vec<f64>> = cols
                .iter()
                .map(|u| {
                    let mut l = u.clone();
                    l.extend(std::iter::repeat_n(0.0, u.len()));
                    frame.project(&l)
                })
                .collect::<hkquot::Result<_>>()?;
            for a in 0..cols.len() {
                for b in 0..cols.len() {
                    let (g, om) = fubini_study(&v, &as_complex(&cols[a]), &as_complex(&cols[b]));
                    let gr = frame.reduced_metric(&lifted[a], &lifted[b])?;
                    let wr = frame.reduced_form(hkquot::rep::Quaternion::I, &lifted[a], &lifted[b])?;
                    worst = worst.max((g - gr).abs()).max((om - wr).abs());
                }
            }
        }
    }
    ensure(worst < 1e-8, || format!("max discrepancy {worst:e}"))?;
    Ok(format!("20 points, max discrepancy {worst:.1e}"))
}

fn quaternionic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = KnConfig::default();
    let full = set(&[0, 1, 2, 3]);
    let mut worst = 0.0f64;
    let mut produced = 0;
    let mut tries = 0;
    while produced < 50 {
        tries += 1;
        ensure(tries < 500, || format!("only {produced} points after {tries} seeds"))?;
        let n = rng.random_range(1..=4i64);
        let c0 = q_frac(rng.random_range(1..=6), rng.random_range(1..=3));
        let c1 = q_frac(rng.random_range(1..=6), rng.random_range(1..=3));
        let w = hirzebruch_weights(n, &c0, &c1)?;
        let p = seed_point(&w, &full, &full, &mut rng);
        let Ok(out) = solve_hyperkahler(&w, &p, &cfg) else { continue };
        let Some(rep) = out.representative else { continue };
        let frame = horizontal_frame(&w, &rep)?;
        ensure(frame.dimension() == 8, || format!("dimension {}", frame.dimension()))?;
        worst = worst.max(quaternion_check(&frame));
        produced += 1;
    }
    ensure(worst < 1e-9, || format!("quaternion_check {worst:e}"))?;
    Ok(format!("50 points, dimension 8, max deviation {worst:.1e}"))
}

fn potential() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let coarse = ambient_potential_check(&pts, 1e-2)?;
    let fine = ambient_potential_check(&pts, 1e-4)?;
    ensure(fine < 1e-5 && coarse < 1e-9, || format!("h=1e-4: {fine:e}, h=1e-2: {coarse:e}"))?;
    Ok(format!("h=1e-4: {fine:.1e}, h=1e-2: {coarse:.1e}"))
}

fn j_semistability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut zero, mut inf) = (0, 0);
    for trial in 0..1000 {
        let w = random_weights(&mut rng, 6, 3);
        let n = w.n();
        let xi: Vec<i64> = (0..w.rank()).map(|_| rng.random_range(-2..=2)).collect();
        let lam = w.lambdas(&xi.iter().map(|&a| a as f64).collect::<Vec<_>>());
        let z: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
        let x: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
        let random = CotangentPoint::new(x.clone(), z.clone())?;
        match j_mu_weight(&w, &random, &Cocharacter::integer(&xi))? {
            JWeight::Zero => zero += 1,
            JWeight::Infinite => inf += 1,
        }
        // x_i = sgn(λ_i)·√-1·y_i with y = conj z; free where λ_i = 0.
        let built: Vec<Complex64> =
            (0..n).map(|i| if lam[i] == 0.0 { x[i] } else { Complex64::i() * z[i].conj() * lam[i].signum() }).collect();
        let p = CotangentPoint::new(built, z)?;
        let jw = j_mu_weight(&w, &p, &Cocharacter::integer(&xi))?;
        ensure(jw == JWeight::Zero, || format!("trial {trial}: constructed point has weight {jw:?}"))?;
        if trial % 10 == 0 {
            let xe: Vec<QComplex> = (0..n).map(|_| QComplex::new(random_q(&mut rng), random_q(&mut rng))).collect();
            let lq = w.lambdas_exact(&xi.iter().map(|&a| q(a)).collect::<Vec<_>>());
            let ye: Vec<QComplex> = xe
                .iter()
                .zip(&lq)
                .map(|(x, l)| {
                    // x = ±√-1 conj z  ⇔  z = ±√-1 conj x
                    let t = QComplex::new(x.im.clone(), x.re.clone());
                    if *l < q(0) {
                        -t
                    } else {
                        t
                    }
                })
                .collect();
            let pe = CotangentPoint::new(xe, ye)?;
            let je = j_mu_weight_exact(&w, &pe, &xi.iter().map(|&a| q(a)).collect::<Vec<_>>())?;
            ensure(je == JWeight::Zero, || format!("trial {trial}: exact constructed point has weight {je:?}"))?;
        }
    }
    Ok(format!("1000 random: {zero} zero, {inf} infinite; all constructed points zero"))
}

fn completion_stratum() -> Outcome {
    let mut lines = Vec::new();
    for n in [1i64, 2, 3, 5] {
        let r = hirzebruch_suite(n, &q(1), &q(1), 11)?;
        let failed: Vec<String> =
            r.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        ensure(failed.is_empty(), || format!("n={n}: {failed:?}"))?;
        ensure(r.residual_order == Some(n as u64), || format!("n={n}: order {:?}", r.residual_order))?;
        lines.push(format!("n={n} order {n}"));
    }
    Ok(lines.join(", "))
}

fn compactness() -> Outcome {
    let h = hirzebruch_weights(2, &q(1), &q(1))?;
    ensure(quotient_compact(&h).compact, || "Hirzebruch not compact".into())?;
    let pm = WeightSystem::new(1, vec![vec![1], vec![-1]], vec![half()])?;
    ensure(!quotient_compact(&pm).compact, || "{(1),(-1)} compact".into())?;
    let one = WeightSystem::new(1, vec![vec![1]], vec![half()])?;
    ensure(quotient_compact(&one).compact, || "{(1)} not compact".into())?;
    // Exact classification sanity: the single weight has a stable point.
    ensure(classify_support(&one, &set(&[0]))?.status == Status::Stable, || "{(1)} no stable point".into())?;
    Ok("Hirzebruch compact, {(1),(-1)} non-compact, {(1)} compact".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("hirzebruch_table1", table1),
        ("hirzebruch_table2", table2),
        ("stable_set_probe", stable_probe),
        ("holomorphic_moment_formula", hol_formula),
        ("mu_weight_vs_flow", mu_weight_flow),
        ("kempf_ness", kempf_ness),
        ("zero_section_fubini_study", fs_oracle),
        ("quaternionic_algebra", quaternionic),
        ("potential_identity", potential),
        ("j_semistability", j_semistability),
        ("completion_stratum", completion_stratum),
        ("compactness", compactness),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (idx, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(Fail(format!("panic: {msg}")))
        });
        let ms = t.elapsed().as_millis();
        match res {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{ms} ms]", idx + 1),
            Err(Fail(d)) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {d} [{ms} ms]", idx + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("{} of {} criteria passed in {total:.1} s", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
