//! Scripted experiments on the example families.

use std::fs;
use std::path::{Path, PathBuf};

use homspace::classify::{isometry_test, sequence_diagnostics, IsometryVerdict};
use homspace::coordinates::{injectivity_bound, is_completely_solvable, metric_jet, split_metric_jet, MetricJet};
use homspace::curvature::{ricci_eigenvalues, ricci_operator, trace_powers};
use homspace::families::{mu_aw, mu_ex03, mu_ex13, mu_ex15};
use homspace::fingerprint::invariant_distance;
use homspace::io::{csv_row, fmt_f64};
use homspace::{Bracket, Error, Param, Result};

use crate::commands::sequence_csv;

pub const EXAMPLES: [&str; 5] = ["ex0-3", "berger", "hyp", "aw3", "coll"];

pub fn run(example: &str, dir: &Path, seed: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let written = match example {
        "ex0-3" => ex03(dir)?,
        "berger" => berger(dir)?,
        "hyp" => hyp(dir, seed)?,
        "aw3" => aw3(dir)?,
        "coll" => coll(dir)?,
        _ => {
            return Err(Error::InvalidParameter(format!("unknown example '{example}', expected one of {}", EXAMPLES.join(", "))))
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn write(dir: &Path, name: &str, text: String) -> Result<PathBuf> {
    let p = dir.join(name);
    fs::write(&p, text)?;
    Ok(p)
}

fn desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn jet_gap(a: &MetricJet, b: &MetricJet) -> f64 {
    let n = a.n;
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max(max_gap(a.entry(i, j), b.entry(i, j)));
        }
    }
    m
}

/// The six Lie algebras of the three-dimensional unimodular family.
fn ex03(dir: &Path) -> Result<Vec<PathBuf>> {
    let cases: [(&str, f64, f64, f64); 6] = [
        ("su(2)", 1.0, 1.0, 1.0),
        ("sl2(R)", 1.0, 1.0, -1.0),
        ("e(2)", 1.0, 1.0, 0.0),
        ("e(1,1)", 1.0, 0.0, -1.0),
        ("h3", 1.0, 0.0, 0.0),
        ("R3", 0.0, 0.0, 0.0),
    ];
    let mut s = String::from("algebra,a,b,c,norm,ric_1,ric_2,ric_3,f1,f2,f3,inj_lower,completely_solvable\n");
    for (name, a, b, c) in cases {
        let mu = mu_ex03(a, b, c)?;
        let mut xs = vec![a, b, c, mu.norm()];
        xs.extend(ricci_eigenvalues(&mu)?);
        xs.extend(trace_powers(&ricci_operator(&mu)?, 3));
        xs.push(injectivity_bound(&mu)?.lower);
        let cs = format!("{:?}", is_completely_solvable(&mu)?).to_lowercase();
        s.push_str(&format!("{},{}\n", csv_row(name, &xs), cs));
    }
    Ok(vec![write(dir, "ex0-3.csv", s)?])
}

fn powers_of_two(max: u32) -> impl Iterator<Item = f64> {
    (0..=max).map(|e| f64::from(1u32 << e))
}

/// Chart convergence of `mu_{+-1/k,1,1}` to `mu_{0,1,1}`, and the Ricci
/// eigenvalues of the divergent `mu_{+-1/sqrt k, sqrt k, sqrt k}`.
fn berger(dir: &Path) -> Result<Vec<PathBuf>> {
    const DEGREE: usize = 4;
    let lam = mu_ex03(0.0, 1.0, 1.0)?;
    let lam_split = split_metric_jet(&lam, 1, DEGREE)?;
    let lam_canon = metric_jet(&lam, DEGREE)?;
    let mut jets = String::from("k,sign,bracket_distance,split_jet_gap,canonical_jet_gap\n");
    for k in powers_of_two(10) {
        for sign in [1.0, -1.0] {
            let mu = mu_ex03(sign / k, 1.0, 1.0)?;
            let xs = [
                mu.distance(&lam),
                jet_gap(&split_metric_jet(&mu, 1, DEGREE)?, &lam_split),
                jet_gap(&metric_jet(&mu, DEGREE)?, &lam_canon),
            ];
            jets.push_str(&csv_row(format!("{k},{sign}"), &xs));
            jets.push('\n');
        }
    }
    let mut ric = String::from("k,sign,ric_1,ric_2,ric_3,expected_1,expected_2,expected_3,max_error,norm\n");
    for k in powers_of_two(10) {
        for sign in [1.0, -1.0] {
            let mu = mu_ex03(sign / k.sqrt(), k.sqrt(), k.sqrt())?;
            let got = ricci_eigenvalues(&mu)?;
            let h = 1.0 / (2.0 * k);
            let want = desc(vec![h, sign - h, sign - h]);
            let mut xs = got.clone();
            xs.extend(&want);
            xs.push(max_gap(&got, &want));
            xs.push(mu.norm());
            ric.push_str(&csv_row(format!("{k},{sign}"), &xs));
            ric.push('\n');
        }
    }
    Ok(vec![write(dir, "berger_jets.csv", jets)?, write(dir, "berger_ricci.csv", ric)?])
}

/// `mu_{-1/sqrt k, -1 + 1/sqrt k, 1, 1}` in H_{1,3} against
/// `mu_{-1/sqrt k, sqrt k, sqrt k}` in H_{0,3}.
fn hyp(dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let lam = mu_ex13(0.0, -1.0, 1.0, 1.0)?;
    let mut s = String::from(
        "k,ric_h_1,ric_h_2,ric_h_3,ric_b_1,ric_b_2,ric_b_3,fingerprint_distance,distance_to_limit,norm_b,invariant_test\n",
    );
    for k in powers_of_two(8) {
        let r = k.sqrt();
        let h = mu_ex13(-1.0 / r, -1.0 + 1.0 / r, 1.0, 1.0)?;
        let b = mu_ex03(-1.0 / r, r, r)?;
        let mut xs = ricci_eigenvalues(&h)?;
        xs.extend(ricci_eigenvalues(&b)?);
        xs.push(invariant_distance(&h, &b, 1, 8, seed)?);
        xs.push(h.distance(&lam));
        xs.push(b.norm());
        let verdict = match isometry_test(&h, &b, 2, 1e-8)? {
            IsometryVerdict::Distinct { invariant, .. } => format!("distinct ({invariant})"),
            IsometryVerdict::IndistinguishableAtOrder { order } => format!("indistinguishable at order {order}"),
        };
        s.push_str(&format!("{},{verdict}\n", csv_row(k, &xs)));
    }
    Ok(vec![write(dir, "hyp.csv", s)?])
}

/// `mu_{1, 1+1/k}` against `mu_{1,1}` for `k = 1..20`.
fn aw3(dir: &Path) -> Result<Vec<PathBuf>> {
    let lam = mu_aw(Param::int(1), Param::int(1), 1.0, 1.0, 1.0, 1.0)?;
    let params: Vec<Vec<String>> =
        (1..=20).map(|k| ["1".to_string(), format!("{}/{k}", k + 1), "1".into(), "1".into(), "1".into(), "1".into()].into()).collect();
    let report = sequence_diagnostics("aw", &params, &lam)?;
    if let Some(b) = report.aw_pairwise_non_homeomorphic {
        eprintln!("pairwise non-homeomorphic: {b}");
    }
    Ok(vec![write(dir, "aw3.csv", sequence_csv(&report))?])
}

/// Continued-fraction convergents `x/y` of sqrt 2.
fn sqrt2_convergents(count: usize) -> Vec<(i64, i64)> {
    let mut v = vec![(1, 1)];
    while v.len() < count {
        let (x, y) = *v.last().expect("non-empty");
        v.push((x + 2 * y, x + y));
    }
    v
}

fn coll_member(p: Param) -> Result<Bracket> {
    mu_ex15(p, Param::int(1), 1.0, -1.0, 0.0, 1.0, 0.0, 1.0)
}

/// `mu_{p_k,1,1,-1,0,1,0,1}` with `p_k -> sqrt 2`, which leaves H_{1,5} in
/// the limit but lands in H_{2,4}.
fn coll(dir: &Path) -> Result<Vec<PathBuf>> {
    let lam = coll_member(Param::Irrational(2f64.sqrt()))?;
    let mut s = String::from(
        "k,p,p_value,ric_1,ric_2,ric_3,ric_4,ric_5,expected_1,expected_2,expected_3,expected_4,expected_5,max_error,distance_to_limit\n",
    );
    for (k, (x, y)) in sqrt2_convergents(12).into_iter().enumerate() {
        let p = Param::ratio(x, y)?;
        let mu = coll_member(p)?;
        let pv = p.value();
        let got = ricci_eigenvalues(&mu)?;
        let want = desc(vec![1.0, pv - 0.5, pv - 0.5, 0.5, 0.5]);
        let mut xs = vec![pv];
        xs.extend(&got);
        xs.extend(&want);
        xs.push(max_gap(&got, &want));
        xs.push(mu.distance(&lam));
        s.push_str(&csv_row(format!("{},{p}", k + 1), &xs));
        s.push('\n');
    }
    let split = lam.resplit(2)?;
    let member = split.require_member().is_ok();
    eprintln!("limit in H_1,5: {}", lam.require_member().is_ok());
    eprintln!("limit in H_2,4: {member}");
    if member {
        let eigs: Vec<String> = ricci_eigenvalues(&split)?.into_iter().map(fmt_f64).collect();
        eprintln!("limit Ricci eigenvalues in H_2,4: {}", eigs.join(", "));
    }
    Ok(vec![write(dir, "coll.csv", s)?])
}
