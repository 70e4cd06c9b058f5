//! File formats: JSON documents for brackets, curvature, fingerprints and
//! jets; CSV for flow trajectories.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bracket::{Bracket, FamilyTag, H2Status};
use crate::coordinates::MetricJet;
use crate::error::{Error, Result};
use crate::families;
use crate::flow::FlowTrajectory;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BracketDoc {
    q: usize,
    n: usize,
    entries: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h2: Option<H2Status>,
}

pub fn bracket_to_json(mu: &Bracket) -> String {
    let doc = BracketDoc {
        q: mu.q(),
        n: mu.n(),
        entries: mu.entries(),
        family: mu.tag().map(|t| t.name.clone()),
        params: mu.tag().map(|t| t.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()),
        h2: Some(mu.h2()),
    };
    serde_json::to_string_pretty(&doc).expect("bracket serialises") + "\n"
}

fn param_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(x) => Ok(x.to_string()),
        other => Err(Error::Parse(format!("parameter value {other} is neither a string nor a number"))),
    }
}

/// Parses a bracket document. A family tag is accepted only if the stored
/// constants agree with the family constructor; the tag then determines (h2).
pub fn bracket_from_json(text: &str) -> Result<Bracket> {
    let doc: BracketDoc = serde_json::from_str(text)?;
    if doc.entries.iter().any(|e| !e.3.is_finite()) {
        return Err(Error::Parse("non-finite structure constant".into()));
    }
    let mu = Bracket::from_entries(doc.q, doc.n, &doc.entries)?;
    if let Some(name) = doc.family {
        let params = doc.params.unwrap_or_default();
        let tag = FamilyTag {
            name,
            params: params.iter().map(|(k, v)| Ok((k.clone(), param_text(v)?))).collect::<Result<_>>()?,
        };
        let rebuilt = families::from_tag(&tag)?;
        if rebuilt.q() != mu.q() || rebuilt.n() != mu.n() {
            return Err(Error::Parse(format!("family {} does not live on (q, n) = ({}, {})", tag.name, mu.q(), mu.n())));
        }
        let gap = rebuilt.max_abs_diff(&mu);
        if gap > 1e-12 * (1.0 + rebuilt.norm()) {
            return Err(Error::Parse(format!("entries differ from family {} by {gap:e}", tag.name)));
        }
        let h2 = rebuilt.h2();
        return Ok(mu.with_tag(rebuilt.tag().cloned().unwrap_or(tag), h2));
    }
    Ok(mu.with_h2(doc.h2.unwrap_or(H2Status::Unknown)))
}

pub fn read_bracket(path: &Path) -> Result<Bracket> {
    bracket_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_bracket(path: &Path, mu: &Bracket) -> Result<()> {
    std::fs::write(path, bracket_to_json(mu))?;
    Ok(())
}

fn scalar_value<T: Scalar>(x: &T) -> Value {
    let s = x.repr();
    if let Ok(v) = s.parse::<i64>() {
        return Value::from(v);
    }
    let float_like = s.contains(['.', 'e', 'E']);
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && float_like => Value::from(v),
        _ => Value::String(s),
    }
}

/// `{"n", "degree", "entries": [[i, j, alpha_1..alpha_n, value], ...]}` with
/// `i <= j`. Rational coefficients that are not integers are written as
/// strings `"p/q"`.
pub fn jet_to_json<T: Scalar>(jet: &MetricJet<T>) -> String {
    let entries: Vec<Value> = jet
        .entries()
        .into_iter()
        .map(|(i, j, alpha, v)| {
            let mut row = vec![Value::from(i), Value::from(j)];
            row.extend(alpha.iter().map(|&a| Value::from(a)));
            row.push(scalar_value(&v));
            Value::Array(row)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("n".into(), jet.n.into());
    doc.insert("degree".into(), jet.degree.into());
    doc.insert("entries".into(), Value::Array(entries));
    serde_json::to_string_pretty(&Value::Object(doc)).expect("jet serialises") + "\n"
}

/// `x_1..x_n, g_11, g_12, ..., g_nn` at each point.
pub fn jet_grid_csv(jet: &MetricJet<f64>, points: &[Vec<f64>]) -> String {
    let n = jet.n;
    let mut out = String::new();
    let head: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).flat_map(|i| (1..=n).map(move |j| format!("g{i}{j}"))))
        .collect();
    out.push_str(&head.join(","));
    out.push('\n');
    for x in points {
        let g = jet.eval(x);
        let row: Vec<String> =
            x.iter().copied().chain((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)])).map(fmt_f64).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// 17 significant digits, '.' separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV row `k, x_1, ..., x_m`.
pub fn csv_row(k: impl std::fmt::Display, xs: &[f64]) -> String {
    let mut s = k.to_string();
    for x in xs {
        let _ = write!(s, ",{}", fmt_f64(*x));
    }
    s
}

fn constant_columns(q: usize, n: usize) -> Vec<(usize, usize, usize)> {
    let d = q + n;
    let mut cols = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                cols.push((i, j, k));
            }
        }
    }
    cols
}

/// Trajectory CSV. The first line `# q=.. n=.. normalized=..` carries the
/// shape; structure constants (`c_i_j_k`, `i < j`) are needed for resuming.
pub fn trajectory_csv(traj: &FlowTrajectory, with_constants: bool) -> String {
    let first = &traj.samples[0].mu;
    let (q, n) = (first.q(), first.n());
    let cols = constant_columns(q, n);
    let mut out = format!("# q={q} n={n} normalized={}\n", traj.normalized);
    let mut head = vec!["t".to_string(), "norm".into(), "scale".into(), "soliton_residual".into()];
    head.extend((1..=n).map(|i| format!("ric_{i}")));
    if with_constants {
        head.extend(cols.iter().map(|(i, j, k)| format!("c_{i}_{j}_{k}")));
    }
    out.push_str(&head.join(","));
    out.push('\n');
    for s in &traj.samples {
        let mut row = vec![s.t, s.norm, s.scale, s.soliton_residual];
        row.extend(&s.ricci_eigs);
        if with_constants {
            row.extend(cols.iter().map(|&(i, j, k)| *s.mu.get(i, j, k)));
        }
        out.push_str(&row.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// State needed to continue a saved trajectory.
#[derive(Debug, Clone)]
pub struct ResumePoint {
    pub t: f64,
    pub scale: f64,
    pub normalized: bool,
    pub mu: Bracket,
}

/// Reads the last sample of a trajectory CSV written with constants.
pub fn resume_point(text: &str) -> Result<ResumePoint> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let meta = lines.next().ok_or_else(|| Error::Parse("empty trajectory file".into()))?;
    let meta = meta.strip_prefix('#').ok_or_else(|| Error::Parse("missing '# q= n=' line".into()))?;
    let (mut q, mut n, mut normalized) = (None, None, None);
    for kv in meta.split_whitespace() {
        match kv.split_once('=') {
            Some(("q", v)) => q = v.parse::<usize>().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("normalized", v)) => normalized = v.parse::<bool>().ok(),
            _ => {}
        }
    }
    let (q, n, normalized) = match (q, n, normalized) {
        (Some(q), Some(n), Some(b)) => (q, n, b),
        _ => return Err(Error::Parse(format!("malformed metadata line '#{meta}'"))),
    };
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?.split(',').collect();
    let last = lines.last().ok_or_else(|| Error::Parse("trajectory has no samples".into()))?;
    let vals: Vec<f64> = last
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'"))))
        .collect::<Result<_>>()?;
    if vals.len() != header.len() {
        return Err(Error::Parse("row length differs from header".into()));
    }
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let t = vals[col("t").ok_or_else(|| Error::Parse("no t column".into()))?];
    let scale = vals[col("scale").ok_or_else(|| Error::Parse("no scale column".into()))?];
    let mut entries = Vec::new();
    for (i, j, k) in constant_columns(q, n) {
        let c = col(&format!("c_{i}_{j}_{k}"))
            .ok_or_else(|| Error::Parse("trajectory was saved without structure constants".into()))?;
        if vals[c] != 0.0 {
            entries.push((i, j, k, vals[c]));
        }
    }
    Ok(ResumePoint { t, scale, normalized, mu: Bracket::from_entries(q, n, &entries)? })
}
