//! Equivalence diagnostics: intertwiners of the isotropy representation,
//! non-isometry certificates from curvature invariants, and the
//! Aloff-Wallach congruences.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num::{BigInt, Integer, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bracket::Bracket;
use crate::coordinates::{aw_injectivity_upper_bound, injectivity_bound};
use crate::curvature::trace_powers;
use crate::error::{Error, Result};
use crate::families::{self, Param};
use crate::fingerprint::{fingerprint, Fingerprint};

/// Intertwining operators of `z -> ad z|R^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Commutant {
    /// No isotropy: every operator commutes, `gl(n)`.
    Full { n: usize },
    /// Orthonormal (Frobenius) basis.
    Basis(Vec<DMatrix<f64>>),
}

impl Commutant {
    pub fn dim(&self) -> usize {
        match self {
            Commutant::Full { n } => n * n,
            Commutant::Basis(b) => b.len(),
        }
    }
}

/// Basis of `{T : [T, ad z|R^n] = 0 for all z in R^q}`.
pub fn commutant(mu: &Bracket) -> Result<Commutant> {
    mu.require_member()?;
    let (q, n) = (mu.q(), mu.n());
    if q == 0 {
        return Ok(Commutant::Full { n });
    }
    let nn = n * n;
    // column-major vec(T); vec(TM - MT) = (M^T (x) I - I (x) M) vec(T)
    let mut sys = DMatrix::zeros(q * nn, nn);
    for z in 0..q {
        let m = mu.isotropy_ad(z);
        for col in 0..nn {
            let (ti, tj) = (col % n, col / n);
            // T = E_{ti,tj}: (TM - MT)_{ab} = delta_{a,ti} M_{tj,b} - M_{a,ti} delta_{tj,b}
            for b in 0..n {
                sys[(z * nn + b * n + ti, col)] += m[(tj, b)];
            }
            for a in 0..n {
                sys[(z * nn + tj * n + a, col)] -= m[(a, ti)];
            }
        }
    }
    let svd = sys.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = f64::max(svd.singular_values.max(), 1.0);
    let mut basis = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= 1e-10 * smax {
            let v: Vec<f64> = vt.row(i).iter().copied().collect();
            basis.push(DMatrix::from_column_slice(n, n, &v));
        }
    }
    Ok(Commutant::Basis(basis))
}

/// Max of `|[T, ad z|R^n]|` over basis elements and basis `z`.
pub fn commutant_residual(mu: &Bracket, basis: &[DMatrix<f64>]) -> f64 {
    let mut r: f64 = 0.0;
    for z in 0..mu.q() {
        let m = mu.isotropy_ad(z);
        for t in basis {
            r = r.max((t * &m - &m * t).amax());
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryVerdict {
    /// A curvature invariant differs: not isometric.
    Distinct { invariant: String, left: f64, right: f64 },
    /// No tested invariant separates them. Not a proof of isometry.
    IndistinguishableAtOrder { order: usize },
}

/// O(n)-invariant scalars built from a fingerprint: `tr Ric^k`, traces of
/// powers of the curvature operator on 2-vectors, and `|nabla^k Riem|^2`.
pub fn fingerprint_invariants(fp: &Fingerprint) -> Vec<(String, f64)> {
    let riem = &fp.tensors[0];
    let n = riem.dim;
    let mut out = Vec::new();
    let ric = DMatrix::from_fn(n, n, |y, z| (0..n).map(|i| riem.get(&[i, y, z, i])).sum());
    for (k, v) in trace_powers(&ric, n).into_iter().enumerate() {
        out.push((format!("tr Ric^{}", k + 1), v));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let op = DMatrix::from_fn(pairs.len(), pairs.len(), |x, y| {
        let ((a, b), (c, d)) = (pairs[x], pairs[y]);
        riem.get(&[a, b, c, d])
    });
    for (k, v) in trace_powers(&op, pairs.len()).into_iter().enumerate() {
        out.push((format!("tr Rop^{}", k + 1), v));
    }
    for (k, t) in fp.tensors.iter().enumerate() {
        out.push((format!("|nabla^{k} Riem|^2"), t.norm().powi(2)));
    }
    out
}

/// Compares invariants with relative tolerance `tol`.
pub fn isometry_test(mu: &Bracket, lam: &Bracket, order: usize, tol: f64) -> Result<IsometryVerdict> {
    if mu.n() != lam.n() {
        return Err(Error::DimensionMismatch(format!("n = {} vs n = {}", mu.n(), lam.n())));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let a = fingerprint_invariants(&fingerprint(mu, order)?);
    let b = fingerprint_invariants(&fingerprint(lam, order)?);
    for ((name, x), (_, y)) in a.into_iter().zip(b) {
        if (x - y).abs() > tol * 1f64.max(x.abs()).max(y.abs()) {
            return Ok(IsometryVerdict::Distinct { invariant: name, left: x, right: y });
        }
    }
    Ok(IsometryVerdict::IndistinguishableAtOrder { order })
}

/// Topological comparison of two Aloff-Wallach spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AWReport {
    pub r: BigInt,
    pub s: BigInt,
    pub r_tilde: BigInt,
    pub s_tilde: BigInt,
    pub homotopy_equivalent: bool,
    pub homeomorphic: bool,
    pub diffeomorphic: bool,
    pub equivariantly_diffeomorphic: bool,
}

/// `r = p^2 + pq + q^2`, `s = pq(p+q)`.
pub fn aw_invariants(p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    let r = p * p + p * q + q * q;
    let s = p * q * (p + q);
    (r, s)
}

fn congruent_pm(s: &BigInt, st: &BigInt, m: &BigInt) -> bool {
    ((s - st) % m).is_zero() || ((s + st) % m).is_zero()
}

fn triple(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let mut t = vec![p.clone(), q.clone(), -(p + q)];
    t.sort();
    t
}

fn check_pair(p: &BigInt, q: &BigInt) -> Result<()> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::InvalidParameter("(p, q) = (0, 0)".into()));
    }
    if !p.gcd(q).abs().eq(&BigInt::from(1)) {
        return Err(Error::InvalidParameter(format!("({p}, {q}) is not a coprime pair")));
    }
    Ok(())
}

pub fn aw_equivalence_big(p: &BigInt, q: &BigInt, pt: &BigInt, qt: &BigInt) -> Result<AWReport> {
    check_pair(p, q)?;
    check_pair(pt, qt)?;
    let (r, s) = aw_invariants(p, q);
    let (rt, st) = aw_invariants(pt, qt);
    let same_r = r == rt;
    let homotopy = same_r && congruent_pm(&s, &st, &r);
    let homeo = same_r && congruent_pm(&s, &st, &(BigInt::from(24) * &r));
    let diff_mod = if (&r % 7i32).is_zero() { BigInt::from(96) * &r } else { BigInt::from(672) * &r };
    let diffeo = same_r && congruent_pm(&s, &st, &diff_mod);
    let t1 = triple(p, q);
    let t2 = triple(pt, qt);
    let neg: Vec<BigInt> = {
        let mut v: Vec<BigInt> = t2.iter().map(|x| -x).collect();
        v.sort();
        v
    };
    let equiv = t1 == t2 || t1 == neg;
    Ok(AWReport {
        r,
        s,
        r_tilde: rt,
        s_tilde: st,
        homotopy_equivalent: homotopy,
        homeomorphic: homeo,
        diffeomorphic: diffeo,
        equivariantly_diffeomorphic: equiv,
    })
}

pub fn aw_equivalence(p: i64, q: i64, pt: i64, qt: i64) -> Result<AWReport> {
    aw_equivalence_big(&p.into(), &q.into(), &pt.into(), &qt.into())
}

/// Witnesses found by an exhaustive search over canonical pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AwSearchResult {
    pub r_max: u64,
    /// Canonical coprime pairs `p >= q >= 0` with `r <= r_max`.
    pub classes: usize,
    /// Pairs of distinct classes with equal `r`.
    pub candidate_pairs: usize,
    pub homotopy_not_homeomorphic: Vec<((i64, i64), (i64, i64))>,
    pub homeomorphic_not_diffeomorphic: Vec<((i64, i64), (i64, i64))>,
}

/// Every Aloff-Wallach space is `W_{p,q}` for a unique coprime `p >= q >= 0`;
/// compares all such classes sharing `r <= r_max`.
pub fn aw_search(r_max: u64) -> AwSearchResult {
    let mut groups: BTreeMap<u64, Vec<(i64, i64)>> = BTreeMap::new();
    let mut p: i64 = 1;
    while (p as u64) * (p as u64) <= r_max {
        for q in 0..=p {
            let r = (p * p + p * q + q * q) as u64;
            if r > r_max {
                break;
            }
            if p.gcd(&q) == 1 {
                groups.entry(r).or_default().push((p, q));
            }
        }
        p += 1;
    }
    let classes = groups.values().map(Vec::len).sum();
    let multi: Vec<Vec<(i64, i64)>> = groups.into_values().filter(|g| g.len() > 1).collect();
    let per_group: Vec<(usize, Vec<_>, Vec<_>)> = multi
        .par_iter()
        .map(|g| {
            let mut ht = Vec::new();
            let mut hd = Vec::new();
            let mut pairs = 0;
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    pairs += 1;
                    let rep = aw_equivalence(g[i].0, g[i].1, g[j].0, g[j].1).expect("canonical pairs are coprime");
                    if rep.homotopy_equivalent && !rep.homeomorphic {
                        ht.push((g[i], g[j]));
                    }
                    if rep.homeomorphic && !rep.diffeomorphic {
                        hd.push((g[i], g[j]));
                    }
                }
            }
            (pairs, ht, hd)
        })
        .collect();
    let mut out = AwSearchResult { r_max, classes, ..Default::default() };
    for (pairs, ht, hd) in per_group {
        out.candidate_pairs += pairs;
        out.homotopy_not_homeomorphic.extend(ht);
        out.homeomorphic_not_diffeomorphic.extend(hd);
    }
    out
}

/// Coprime integer pair representing the slope ratio `p : q`.
pub fn integer_slopes(p: &Param, q: &Param) -> Option<(BigInt, BigInt)> {
    let (pb, qb) = (p.to_big()?, q.to_big()?);
    if pb.is_zero() && qb.is_zero() {
        return None;
    }
    let l = pb.denom().lcm(qb.denom());
    let a = pb.numer() * (&l / pb.denom());
    let b = qb.numer() * (&l / qb.denom());
    let g = a.gcd(&b);
    Some((a / &g, b / &g))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRow {
    pub index: usize,
    pub params: Vec<String>,
    /// `|mu_k - lambda|` when both live on the same R^{q+n}.
    pub bracket_distance: Option<f64>,
    /// `|f_j(mu_k) - f_j(lambda)|` for `j = 1..=3`.
    pub invariant_gaps: Vec<f64>,
    pub ricci_eigenvalues: Vec<f64>,
    pub injectivity_lower: f64,
    pub injectivity_heuristic: bool,
    /// Certified upper bound for Aloff-Wallach members with rational slopes.
    pub injectivity_upper: Option<f64>,
    /// Coprime `(p, q)` of the Aloff-Wallach space, if applicable.
    pub aw_pair: Option<(String, String)>,
    /// Homeomorphic to some earlier member of the sequence.
    pub aw_homeomorphic_to_earlier: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub family: String,
    pub rows: Vec<SequenceRow>,
    /// For Aloff-Wallach sequences: no two members are homeomorphic.
    pub aw_pairwise_non_homeomorphic: Option<bool>,
}

fn gaps(mu: &Bracket, lam: &Bracket) -> Result<Vec<f64>> {
    let a = trace_powers(&crate::curvature::ricci_operator(mu)?, 3);
    let b = trace_powers(&crate::curvature::ricci_operator(lam)?, 3);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect())
}

/// Per-member comparison of a family sequence with a limit bracket.
pub fn sequence_diagnostics(family: &str, params: &[Vec<String>], limit: &Bracket) -> Result<SequenceReport> {
    if params.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    limit.require_member()?;
    let members: Vec<Bracket> = params.iter().map(|p| families::from_params(family, p)).collect::<Result<_>>()?;
    for (i, m) in members.iter().enumerate() {
        m.require_member().map_err(|e| Error::NotMember(format!("sequence member {i}: {e}")))?;
    }
    let aw_pairs: Vec<Option<(BigInt, BigInt)>> = params
        .iter()
        .map(|p| {
            if family != "aw" {
                return None;
            }
            let (a, b) = (p[0].parse::<Param>().ok()?, p[1].parse::<Param>().ok()?);
            integer_slopes(&a, &b)
        })
        .collect();

    let rows: Vec<SequenceRow> = members
        .par_iter()
        .enumerate()
        .map(|(i, mu)| -> Result<SequenceRow> {
            let dist = (mu.dim() == limit.dim()).then(|| mu.distance(limit));
            let ib = injectivity_bound(mu)?;
            let upper = if family == "aw" {
                let (a, b) = (params[i][0].parse::<Param>()?, params[i][1].parse::<Param>()?);
                aw_injectivity_upper_bound(a, b)
            } else {
                None
            };
            let homeo_earlier = aw_pairs[i].as_ref().map(|(p, q)| {
                aw_pairs[..i].iter().flatten().any(|(pp, qq)| {
                    aw_equivalence_big(p, q, pp, qq).map(|r| r.homeomorphic).unwrap_or(false)
                })
            });
            Ok(SequenceRow {
                index: i,
                params: params[i].clone(),
                bracket_distance: dist,
                invariant_gaps: gaps(mu, limit)?,
                ricci_eigenvalues: crate::curvature::ricci_eigenvalues(mu)?,
                injectivity_lower: ib.lower,
                injectivity_heuristic: ib.heuristic,
                injectivity_upper: upper,
                aw_pair: aw_pairs[i].as_ref().map(|(p, q)| (p.to_string(), q.to_string())),
                aw_homeomorphic_to_earlier: homeo_earlier,
            })
        })
        .collect::<Result<_>>()?;
    let aw_all = (family == "aw").then(|| rows.iter().all(|r| r.aw_homeomorphic_to_earlier == Some(false)));
    Ok(SequenceReport { family: family.into(), rows, aw_pairwise_non_homeomorphic: aw_all })
}

/// Frobenius-orthonormalises a set of matrices (for comparing spans).
pub fn span_dim(mats: &[DMatrix<f64>]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let len = mats[0].len();
    let m = DMatrix::from_fn(len, mats.len(), |r, c| mats[c].as_slice()[r]);
    let sv: DVector<f64> = m.singular_values();
    let smax = sv.max();
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}
