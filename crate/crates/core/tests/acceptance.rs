//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use homspace::classify::{aw_equivalence, aw_search, sequence_diagnostics};
use homspace::coordinates::{coordinate_curvature_oracle, injectivity_bound, metric_jet, BoundMethod};
use homspace::curvature::{ricci_eigenvalues, riemann_origin, scalar_invariants};
use homspace::families::{self, heisenberg3, mu_aw, mu_ex03, mu_ex03_exact, mu_ex13, mu_ex13_exact};
use homspace::fingerprint::{fingerprint, invariant_distance};
use homspace::flow::{integrate, StepControl};
use homspace::{Bracket, Param};
use num::{BigRational, Integer, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_h0, random_h1, random_orthogonal, rel_err};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn coll_ricci() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for p in ["1", "1.2", "1.4"] {
        let params: Vec<String> = [p, "1", "1", "-1", "0", "1", "0", "1"].iter().map(|s| s.to_string()).collect();
        let mu = families::from_params("ex1-5", &params).unwrap();
        let pk: f64 = p.parse().unwrap();
        let mut want = vec![1.0, pk - 0.5, pk - 0.5, 0.5, 0.5];
        want.sort_by(|a, b| b.total_cmp(a));
        worst = worst.max(max_abs_diff(&ricci_eigenvalues(&mu).unwrap(), &want));
    }
    let el = start.elapsed();
    outcome(worst <= 1e-9 && el < Duration::from_secs(1), format!("max error {worst:.2e}, {el:.2?}"))
}

fn berger_ricci() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut limit_ok = true;
    for k in [1.0f64, 4.0, 16.0, 64.0] {
        for sign in [1.0, -1.0] {
            let ev = ricci_eigenvalues(&mu_ex03(sign / k.sqrt(), k.sqrt(), k.sqrt()).unwrap()).unwrap();
            let e = 1.0 / (2.0 * k);
            let mut want = vec![e, sign - e, sign - e];
            want.sort_by(|a, b| b.total_cmp(a));
            worst = worst.max(max_abs_diff(&ev, &want));
            let mut lim = vec![0.0, sign, sign];
            lim.sort_by(|a, b| b.total_cmp(a));
            limit_ok &= max_abs_diff(&ev, &lim) <= e + 1e-9;
        }
    }
    outcome(worst <= 1e-9 && limit_ok, format!("max error {worst:.2e}, within 1/(2k) of the limit: {limit_ok}"))
}

fn flatness() -> Outcome {
    let flat = mu_ex03(1.0, 1.0, 0.0).unwrap();
    let f2 = scalar_invariants(&flat, 2).unwrap()[1].abs();
    let fp = fingerprint(&flat, 2).unwrap().norm();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1a7);
    let (mut worst_f2, mut worst_fp): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let mu = match i % 3 {
            0 => random_h0(&mut rng, 3),
            1 => random_h0(&mut rng, 4),
            _ => random_h1(&mut rng, 3),
        };
        let lam = mu.flat_degeneration().unwrap();
        worst_f2 = worst_f2.max(scalar_invariants(&lam, 2).unwrap()[1].abs());
        worst_fp = worst_fp.max(fingerprint(&lam, 2).unwrap().norm());
    }
    outcome(
        f2 <= 1e-12 && fp <= 1e-10 && worst_f2 <= 1e-12 && worst_fp <= 1e-10,
        format!("E(2): f2 {f2:.1e}, |w| {fp:.1e}; degenerations: f2 {worst_f2:.1e}, |w| {worst_fp:.1e}"),
    )
}

/// Degree <= 2 coefficients from the closed form, as `(i, j, alpha, value)`.
fn closed_form_coefficient(mu: &Bracket<BigRational>, i: usize, j: usize, alpha: &[u8]) -> BigRational {
    let (q, n, d) = (mu.q(), mu.n(), mu.dim());
    let c = |a: usize, b: usize, e: usize| mu.get(a, b, e).clone();
    let half = BigRational::new(1.into(), 2.into());
    let quarter = BigRational::new(1.into(), 4.into());
    let sixth = BigRational::new(1.into(), 6.into());
    let vars: Vec<usize> = alpha.iter().enumerate().flat_map(|(v, &m)| std::iter::repeat_n(v, m as usize)).collect();
    match vars.len() {
        0 => {
            if i == j {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            }
        }
        1 => {
            let k = vars[0];
            -(half * (c(q + k, q + j, q + i) + c(q + k, q + i, q + j)))
        }
        2 => {
            let term = |k: usize, l: usize| {
                let mut s = BigRational::zero();
                for t in 0..n {
                    s += quarter.clone() * c(q + k, q + i, q + t) * c(q + l, q + j, q + t);
                }
                for r in 0..d {
                    s += sixth.clone()
                        * (c(q + k, r, q + i) * c(q + l, q + j, r) + c(q + k, r, q + j) * c(q + l, q + i, r));
                }
                s
            };
            let (k, l) = (vars[0], vars[1]);
            if k == l {
                term(k, k)
            } else {
                term(k, l) + term(l, k)
            }
        }
        _ => unreachable!(),
    }
}

fn jet_matches_closed_form(mu: &Bracket<BigRational>) -> (usize, usize) {
    let jet = metric_jet(mu, 2).unwrap();
    let n = mu.n();
    let (mut checked, mut bad) = (0, 0);
    for idx in 0..jet.basis().len() {
        let alpha = jet.basis().exponents(idx).to_vec();
        for i in 0..n {
            for j in 0..n {
                checked += 1;
                if jet.coeff(i, j, &alpha) != closed_form_coefficient(mu, i, j, &alpha) {
                    bad += 1;
                }
            }
        }
    }
    (checked, bad)
}

fn jet_closed_form() -> Outcome {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let su2 = mu_ex03_exact(r(1, 1), r(2, 1), r(3, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut rr = || r(rng.random_range(-9..10), rng.random_range(1..8));
    let h13 = loop {
        let (a, b, c, d) = (rr(), rr(), rr(), rr());
        if !d.is_zero() {
            break mu_ex13_exact(a, b, c, d);
        }
    };
    let (c1, b1) = jet_matches_closed_form(&su2);
    let (c2, b2) = jet_matches_closed_form(&h13);
    outcome(b1 == 0 && b2 == 0, format!("{} coefficients compared exactly, {} mismatches", c1 + c2, b1 + b2))
}

fn dual_path_curvature() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [3, 4] {
        for _ in 0..200 {
            let mu = random_h0(&mut rng, n);
            let oracle = coordinate_curvature_oracle(&metric_jet(&mu, 2).unwrap(), 0).unwrap();
            worst = worst.max(rel_err(&oracle.data, &riemann_origin(&mu).unwrap().data));
            count += 1;
        }
    }
    let el = start.elapsed();
    outcome(
        worst <= 1e-8 && el < Duration::from_secs(60),
        format!("{count} brackets, max relative error {worst:.2e}, {el:.2?}"),
    )
}

fn distance_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let mu = random_h0(&mut rng, 3);
        let h = random_orthogonal(&mut rng, 3, i % 2 == 1);
        let d = invariant_distance(&mu, &mu.gl_action(&h).unwrap(), 1, 16, 0).unwrap();
        worst = worst.max(d);
    }
    outcome(worst <= 1e-6, format!("max d(mu, h.mu) = {worst:.2e} over 50 pairs"))
}

/// Largest Jacobi residual and isotropy drift `|c_iso(t) - scale(t) c_iso(0)|`.
fn flow_structure(mu0: &Bracket, t_end: f64) -> (f64, f64) {
    let tr = integrate(mu0, t_end, true, &StepControl::default()).unwrap();
    let (q, d) = (mu0.q(), mu0.dim());
    let mut jac: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for s in &tr.samples {
        jac = jac.max(s.mu.jacobi_residual());
        for z in 0..q {
            for j in 0..d {
                for k in 0..d {
                    drift = drift.max((s.mu.get(z, j, k) - s.scale * mu0.get(z, j, k)).abs());
                }
            }
        }
    }
    (jac, drift)
}

fn flow_structure_preservation() -> Outcome {
    let (j0, d0) = flow_structure(&mu_ex03(1.0, 0.5, 0.25).unwrap(), 20.0);
    let (j1, d1) = flow_structure(&mu_ex13(1.0, 0.5, 0.25, 1.0).unwrap(), 20.0);
    outcome(
        j0.max(j1) <= 1e-8 && d0.max(d1) <= 1e-8,
        format!("q=0: jacobi {j0:.1e}, drift {d0:.1e}; q=1: jacobi {j1:.1e}, drift {d1:.1e}"),
    )
}

fn nilsoliton() -> Outcome {
    let tr = integrate(&heisenberg3(), 51.0, true, &StepControl::default()).unwrap();
    match tr.fixed_point_time(1e-6, 10) {
        Some(t) => {
            let stays = tr.samples.iter().filter(|s| s.t >= t).all(|s| s.soliton_residual < 1e-6);
            outcome(t <= 50.0 && stays, format!("residual < 1e-6 from t = {t:.1} on, stays: {stays}"))
        }
        None => outcome(false, "residual never below 1e-6 for 10 samples"),
    }
}

fn invariant_convergence() -> Outcome {
    let lim = scalar_invariants(&mu_ex03(1.0, 0.0, 0.0).unwrap(), 3).unwrap();
    let ks: Vec<u32> = (2..=64).collect();
    let gaps: Vec<Vec<f64>> = ks
        .iter()
        .map(|&k| {
            let e = 1.0 / k as f64;
            let f = scalar_invariants(&mu_ex03(1.0, e, e).unwrap(), 3).unwrap();
            f.iter().zip(&lim).map(|(a, b)| (a - b).abs()).collect()
        })
        .collect();
    // fit on k <= 8, validate on all k
    let c = ks
        .iter()
        .zip(&gaps)
        .filter(|(&k, _)| k <= 8)
        .flat_map(|(&k, g)| g.iter().map(move |x| x * k as f64))
        .fold(0.0, f64::max);
    let bound_ok = ks.iter().zip(&gaps).all(|(&k, g)| g.iter().all(|x| *x <= c / k as f64 + 1e-15));
    let monotone = (0..3).all(|j| gaps.windows(2).all(|w| w[1][j] <= w[0][j] + 1e-15));
    outcome(bound_ok && monotone, format!("fitted C = {c:.4}, bound holds: {bound_ok}, monotone: {monotone}"))
}

fn aw_arithmetic() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pair = || loop {
        let (p, q) = (rng.random_range(-100_000i64..100_000), rng.random_range(-100_000i64..100_000));
        if p.gcd(&q) == 1 {
            break (p, q);
        }
    };
    let mut chain = true;
    for _ in 0..10_000 {
        let ((p, q), (pt, qt)) = (pair(), pair());
        let r = aw_equivalence(p, q, pt, qt).unwrap();
        chain &= (!r.diffeomorphic || r.homeomorphic)
            && (!r.homeomorphic || r.homotopy_equivalent)
            && (!r.equivariantly_diffeomorphic || r.diffeomorphic);
    }
    let res = aw_search(100_000);
    let el = start.elapsed();
    let hd = res.homeomorphic_not_diffeomorphic.first().map(|w| format!("{w:?}")).unwrap_or("none".into());
    let ht = res.homotopy_not_homeomorphic.first().map(|w| format!("{w:?}")).unwrap_or("none".into());
    outcome(
        chain
            && !res.homeomorphic_not_diffeomorphic.is_empty()
            && !res.homotopy_not_homeomorphic.is_empty()
            && el < Duration::from_secs(300),
        format!(
            "chain holds: {chain}; {} classes, {} same-r pairs; homeo-not-diffeo: {hd}; homotopy-not-homeo: {ht}; {el:.2?}",
            res.classes, res.candidate_pairs
        ),
    )
}

fn aw_sequence() -> Outcome {
    let params: Vec<Vec<String>> = (1..=20)
        .map(|k| {
            let mut v = vec!["1".to_string(), format!("{}/{}", k + 1, k)];
            v.extend(["1", "1", "1", "1"].iter().map(|s| s.to_string()));
            v
        })
        .collect();
    let limit = mu_aw(Param::int(1), Param::int(1), 1.0, 1.0, 1.0, 1.0).unwrap();
    let rep = sequence_diagnostics("aw", &params, &limit).unwrap();
    let dist: Vec<f64> = rep.rows.iter().map(|r| r.bracket_distance.unwrap()).collect();
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    // slopes (1, (k+1)/k) reduce to the integer pair (k, k+1)
    let pairs_ok = rep.rows.iter().enumerate().all(|(i, r)| r.aw_pair == Some(((i + 1).to_string(), (i + 2).to_string())));
    // brute-force pairwise check on the integer pairs (k, k+1)
    let mut pairwise = true;
    for a in 1..=20i64 {
        for b in a + 1..=20 {
            pairwise &= !aw_equivalence(a, a + 1, b, b + 1).unwrap().homeomorphic;
        }
    }
    let upper = rep.rows.last().unwrap().injectivity_upper.unwrap();
    outcome(
        decreasing && pairs_ok && pairwise && rep.aw_pairwise_non_homeomorphic == Some(true),
        format!(
            "|mu_k - mu_(1,1)|: {:.3e} -> {:.3e} decreasing: {decreasing}; pairwise non-homeomorphic: {pairwise}; injectivity upper bound at k=20: {upper:.3e}",
            dist[0],
            dist[19]
        ),
    )
}

fn injectivity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut methods_ok = true;
    for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (0.5, -1.0, 2.0), (1.0, 1.0, 0.0), (2.0, -0.3, 0.7)] {
        let ib = injectivity_bound(&mu_ex03(a, b, c).unwrap()).unwrap();
        let want = PI / (2.0f64 * (a * a + b * b + c * c)).sqrt();
        worst = worst.max((ib.lower - want).abs());
        methods_ok &= ib.method == BoundMethod::NormBound;
    }
    let h3 = injectivity_bound(&heisenberg3()).unwrap();
    outcome(
        worst <= 1e-12 && methods_ok && h3.lower == f64::INFINITY,
        format!("max |bound - pi/|mu|| = {worst:.1e}; h3 bound = {}", h3.lower),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("collapsing family Ricci eigenvalues", coll_ricci),
        ("Berger sphere Ricci eigenvalues and limit", berger_ricci),
        ("flatness of E(2) and flat degenerations", flatness),
        ("metric jet closed form through degree 2", jet_closed_form),
        ("coordinate vs algebraic curvature", dual_path_curvature),
        ("invariant distance on O(n)-orbits", distance_sanity),
        ("bracket flow structure preservation", flow_structure_preservation),
        ("Heisenberg nilsoliton fixed point", nilsoliton),
        ("convergence of Ricci invariants", invariant_convergence),
        ("Aloff-Wallach arithmetic and witness search", aw_arithmetic),
        ("Aloff-Wallach sequence without topological limit", aw_sequence),
        ("injectivity radius bounds", injectivity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
