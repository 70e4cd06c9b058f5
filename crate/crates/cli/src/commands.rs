use std::fs;
use std::path::Path;

use homspace::classify::{self, aw_equivalence_big, aw_search as search, fingerprint_invariants, isometry_test};
use homspace::coordinates::{metric_jet, split_metric_jet};
use homspace::fingerprint::{fingerprint, invariant_distance};
use homspace::flow::{integrate, integrate_from, FlowStatus, StepControl};
use homspace::io::{self, bracket_to_json, fmt_f64, jet_to_json, read_bracket, trajectory_csv};
use homspace::{families, Bracket, Error, Result};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise") + "\n"
}

pub fn check(path: &Path, tol: Option<f64>, out: Option<&Path>) -> Result<u8> {
    let mu = read_bracket(path)?;
    let tol = tol.unwrap_or_else(|| mu.default_tolerance());
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let rep = mu.check_membership(tol)?;
    let reason = rep.failure_reason();
    let mut v = serde_json::to_value(&rep)?;
    v["q"] = mu.q().into();
    v["n"] = mu.n().into();
    v["member"] = rep.passes().into();
    v["failure"] = reason.clone().map_or(Value::Null, Value::from);
    emit(out, &pretty(&v))?;
    if let Some(r) = reason {
        eprintln!("not a member: {r}");
        return Ok(1);
    }
    Ok(0)
}

pub fn curvature(path: &Path, out: Option<&Path>) -> Result<()> {
    let mu = read_bracket(path)?;
    let c = homspace::curvature::curvature(&mu)?;
    emit(out, &pretty(&serde_json::to_value(&c)?))
}

pub fn invariants(path: &Path, order: usize, out: Option<&Path>) -> Result<()> {
    let mu = read_bracket(path)?;
    let fp = fingerprint(&mu, order)?;
    let mut inv = Map::new();
    for (name, x) in fingerprint_invariants(&fp) {
        inv.insert(name, x.into());
    }
    let v = json!({
        "q": mu.q(),
        "n": mu.n(),
        "order": order,
        "invariants": inv,
        "fingerprint_norm": fp.norm(),
        "fingerprint": fp,
    });
    emit(out, &pretty(&v))
}

pub fn distance(a: &Path, b: &Path, order: usize, restarts: usize, seed: u64, tol: f64, out: Option<&Path>) -> Result<()> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be positive".into()));
    }
    let (mu, lam) = (read_bracket(a)?, read_bracket(b)?);
    let verdict = isometry_test(&mu, &lam, order, tol)?;
    let d = invariant_distance(&mu, &lam, order, restarts, seed)?;
    let v = json!({
        "order": order,
        "restarts": restarts,
        "seed": seed,
        "distance": d,
        "invariant_test": verdict,
    });
    emit(out, &pretty(&v))
}

pub struct JetOptions {
    pub degree: usize,
    pub exact: bool,
    pub split: Option<usize>,
    pub grid: Option<usize>,
    pub radius: f64,
    pub seed: u64,
}

pub fn jet(path: &Path, o: &JetOptions, out: Option<&Path>) -> Result<()> {
    let mu = read_bracket(path)?;
    if o.exact {
        if o.grid.is_some() {
            return Err(Error::InvalidParameter("--grid evaluates in floating point; drop --exact".into()));
        }
        let tag = mu.tag().ok_or_else(|| Error::InvalidParameter("--exact needs a bracket file with a family tag".into()))?;
        let vals: Vec<String> = tag.params.iter().map(|(_, v)| v.clone()).collect();
        let ex = families::exact_from_params(&tag.name, &vals)?.with_h2(mu.h2());
        let jet = match o.split {
            Some(s) => split_metric_jet(&ex, s, o.degree)?,
            None => metric_jet(&ex, o.degree)?,
        };
        return emit(out, &jet_to_json(&jet));
    }
    let jet = match o.split {
        Some(s) => split_metric_jet(&mu, s, o.degree)?,
        None => metric_jet(&mu, o.degree)?,
    };
    match o.grid {
        None => emit(out, &jet_to_json(&jet)),
        Some(count) => {
            if !(o.radius > 0.0 && o.radius.is_finite()) {
                return Err(Error::InvalidParameter("radius must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
            let points: Vec<Vec<f64>> =
                (0..count).map(|_| (0..mu.n()).map(|_| rng.random_range(-o.radius..o.radius)).collect()).collect();
            emit(out, &io::jet_grid_csv(&jet, &points))
        }
    }
}

pub struct FlowOptions {
    pub t_end: f64,
    pub normalized: bool,
    pub constants: bool,
    pub sample_dt: f64,
    pub rtol: f64,
    pub atol: f64,
}

pub fn flow(bracket: Option<&Path>, resume: Option<&Path>, o: &FlowOptions, out: Option<&Path>) -> Result<u8> {
    let ctrl = StepControl { rtol: o.rtol, atol: o.atol, sample_dt: o.sample_dt, ..StepControl::default() };
    let res = match (bracket, resume) {
        (Some(b), None) => integrate(&read_bracket(b)?, o.t_end, o.normalized, &ctrl),
        (None, Some(r)) => {
            let rp = io::resume_point(&fs::read_to_string(r)?)?;
            if o.normalized && !rp.normalized {
                return Err(Error::InvalidParameter("--normalized given but the saved trajectory is not normalised".into()));
            }
            integrate_from(&rp.mu, rp.t, o.t_end, rp.normalized, rp.scale, &ctrl)
        }
        _ => return Err(Error::InvalidParameter("give either a bracket file or --resume".into())),
    };
    match res {
        Ok(traj) => {
            emit(out, &trajectory_csv(&traj, o.constants))?;
            match traj.status {
                FlowStatus::Completed => Ok(0),
                FlowStatus::BlowUpDetected => {
                    eprintln!("norm exceeded the blow-up threshold at t = {}", traj.last().t);
                    Ok(0)
                }
                FlowStatus::MaxSteps => {
                    eprintln!("step budget exhausted at t = {}", traj.last().t);
                    Ok(2)
                }
            }
        }
        Err(Error::StepUnderflow { t, partial }) => {
            emit(out, &trajectory_csv(&partial, o.constants))?;
            Err(Error::StepUnderflow { t, partial })
        }
        Err(e) => Err(e),
    }
}

fn split_params(s: &str) -> Vec<String> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    s.split(',').map(|x| x.trim().to_string()).collect()
}

pub fn family(name: &str, params: &str, out: Option<&Path>) -> Result<()> {
    let mu = families::from_params(name, &split_params(params))?;
    if let Err(e) = mu.require_member() {
        eprintln!("warning: {e}");
    }
    emit(out, &bracket_to_json(&mu))
}

fn big(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse(format!("'{s}' is not an integer")))
}

pub fn aw(args: &[String; 4], as_json: bool, out: Option<&Path>) -> Result<()> {
    let [p, q, pt, qt] = [big(&args[0])?, big(&args[1])?, big(&args[2])?, big(&args[3])?];
    let r = aw_equivalence_big(&p, &q, &pt, &qt)?;
    let yn = |b: bool| if b { "yes" } else { "no" };
    let text = if as_json {
        pretty(&json!({
            "first": [p.to_string(), q.to_string()],
            "second": [pt.to_string(), qt.to_string()],
            "r": r.r.to_string(),
            "s": r.s.to_string(),
            "r_tilde": r.r_tilde.to_string(),
            "s_tilde": r.s_tilde.to_string(),
            "homotopy_equivalent": r.homotopy_equivalent,
            "homeomorphic": r.homeomorphic,
            "diffeomorphic": r.diffeomorphic,
            "equivariantly_diffeomorphic": r.equivariantly_diffeomorphic,
        }))
    } else {
        format!(
            "W({p},{q}): r = {}, s = {}\nW({pt},{qt}): r = {}, s = {}\n\
             {:<28}{}\n{:<28}{}\n{:<28}{}\n{:<28}{}\n",
            r.r,
            r.s,
            r.r_tilde,
            r.s_tilde,
            "homotopy equivalent",
            yn(r.homotopy_equivalent),
            "homeomorphic",
            yn(r.homeomorphic),
            "diffeomorphic",
            yn(r.diffeomorphic),
            "equivariantly diffeomorphic",
            yn(r.equivariantly_diffeomorphic),
        )
    };
    emit(out, &text)
}

pub fn aw_search(r_max: u64, out: Option<&Path>) -> Result<()> {
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be positive".into()));
    }
    let s = search(r_max);
    type Pair = ((i64, i64), (i64, i64));
    let pairs = |v: &[Pair]| -> Value { v.iter().map(|(a, b)| json!([[a.0, a.1], [b.0, b.1]])).collect() };
    let v = json!({
        "r_max": s.r_max,
        "classes": s.classes,
        "candidate_pairs": s.candidate_pairs,
        "homotopy_not_homeomorphic": pairs(&s.homotopy_not_homeomorphic),
        "homeomorphic_not_diffeomorphic": pairs(&s.homeomorphic_not_diffeomorphic),
    });
    emit(out, &pretty(&v))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

pub fn sequence_csv(report: &classify::SequenceReport) -> String {
    let n = report.rows.first().map_or(0, |r| r.ricci_eigenvalues.len());
    let mut head: Vec<String> = ["index", "params", "bracket_distance", "gap_f1", "gap_f2", "gap_f3"].map(String::from).into();
    head.extend((1..=n).map(|i| format!("ric_{i}")));
    head.extend(["inj_lower", "inj_heuristic", "inj_upper", "aw_p", "aw_q", "homeomorphic_to_earlier"].map(String::from));
    let mut s = head.join(",") + "\n";
    for r in &report.rows {
        let mut row = vec![r.index.to_string(), r.params.join(";"), opt(r.bracket_distance)];
        row.extend(r.invariant_gaps.iter().map(|x| fmt_f64(*x)));
        row.extend(r.ricci_eigenvalues.iter().map(|x| fmt_f64(*x)));
        row.push(fmt_f64(r.injectivity_lower));
        row.push(r.injectivity_heuristic.to_string());
        row.push(opt(r.injectivity_upper));
        let (ap, aq) = r.aw_pair.clone().unwrap_or_default();
        row.extend([ap, aq, opt_bool(r.aw_homeomorphic_to_earlier)]);
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn sequence(family: &str, members: &[String], limit: &Path, limit_q: Option<usize>, out: Option<&Path>) -> Result<()> {
    if members.is_empty() {
        return Err(Error::InvalidParameter("give --sweep or at least one --member".into()));
    }
    let mut lam: Bracket = read_bracket(limit)?;
    if let Some(q) = limit_q {
        lam = lam.resplit(q)?;
    }
    let params: Vec<Vec<String>> = members.iter().map(|m| split_params(m)).collect();
    let report = classify::sequence_diagnostics(family, &params, &lam)?;
    emit(out, &sequence_csv(&report))?;
    if let Some(b) = report.aw_pairwise_non_homeomorphic {
        eprintln!("pairwise non-homeomorphic: {b}");
    }
    Ok(())
}
