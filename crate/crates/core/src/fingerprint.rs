//! The stack `(Riem, nabla Riem, ..., nabla^K Riem)` at the origin and the
//! distance between O(n)-orbits of such stacks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::Bracket;
use crate::coordinates::{coordinate_curvature_stack, metric_jet_unchecked};
use crate::curvature::riemann_unchecked;
use crate::error::{Error, Result};
use crate::tensor::CovariantTensor;

pub const DEFAULT_ORDER: usize = 2;
pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    /// Entry `k` has rank `4 + k`.
    pub tensors: Vec<CovariantTensor>,
}

impl Fingerprint {
    pub fn n(&self) -> usize {
        self.tensors[0].dim
    }

    pub fn norm(&self) -> f64 {
        self.tensors.iter().map(|t| t.norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn rotated(&self, h: &DMatrix<f64>) -> Self {
        Self { order: self.order, tensors: self.tensors.iter().map(|t| t.rotated(h)).collect() }
    }

    /// Euclidean distance between stacks of equal shape.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sq_distance(other).sqrt()
    }

    fn sq_distance(&self, other: &Self) -> f64 {
        self.tensors
            .iter()
            .zip(&other.tensors)
            .map(|(a, b)| a.data.iter().zip(&b.data).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .sum()
    }
}

/// `m = n(n-1)/2 - 1`, the order at which the stack determines the
/// local geometry.
pub fn max_order(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64 - 1
}

pub fn fingerprint(mu: &Bracket, order: usize) -> Result<Fingerprint> {
    let m = max_order(mu.n());
    if order > 0 && order as i64 > m {
        return Err(Error::OrderTooLarge { order, max: m });
    }
    mu.require_member()?;
    let mut tensors = vec![riemann_unchecked(mu)];
    if order > 0 {
        let jet = metric_jet_unchecked(mu, order + 2);
        let stack = coordinate_curvature_stack(&jet, order)?;
        tensors.extend(stack.into_iter().skip(1));
    }
    Ok(Fingerprint { order, tensors })
}

fn skew_from(theta: &[f64], n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    let mut t = 0;
    for i in 0..n {
        for j in i + 1..n {
            s[(i, j)] = theta[t];
            s[(j, i)] = -theta[t];
            t += 1;
        }
    }
    s
}

fn reflection(n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n, n);
    r[(0, 0)] = -1.0;
    r
}

fn residual(a: &Fingerprint, b: &Fingerprint, h: &DMatrix<f64>) -> DVector<f64> {
    let rot = a.rotated(h);
    let data: Vec<f64> =
        rot.tensors.iter().zip(&b.tensors).flat_map(|(x, y)| x.data.iter().zip(&y.data).map(|(u, v)| u - v)).collect();
    DVector::from_vec(data)
}

/// Coordinate pattern search on `h = h0 exp(S)`; returns the best `h` and
/// the squared objective.
fn pattern_search(a: &Fingerprint, b: &Fingerprint, h0: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let n = a.n();
    let p = n * (n - 1) / 2;
    let f = |theta: &[f64]| {
        let h = h0 * skew_from(theta, n).exp();
        a.rotated(&h).sq_distance(b)
    };
    let mut theta = vec![0.0; p];
    let mut best = f(&theta);
    let mut step = 0.5;
    let mut evals = 0usize;
    while step >= 1e-6 && evals < 50_000 && best > 0.0 {
        let mut improved = false;
        for i in 0..p {
            for dir in [1.0, -1.0] {
                let mut trial = theta.clone();
                trial[i] += dir * step;
                let v = f(&trial);
                evals += 1;
                if v < best {
                    best = v;
                    theta = trial;
                    improved = true;
                    let mut s = step;
                    loop {
                        s *= 2.0;
                        let mut t2 = theta.clone();
                        t2[i] += dir * s;
                        let v2 = f(&t2);
                        evals += 1;
                        if v2 < best && s < 8.0 {
                            best = v2;
                            theta = t2;
                        } else {
                            break;
                        }
                    }
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (h0 * skew_from(&theta, n).exp(), best)
}

/// Levenberg-Marquardt on `h exp(S)` with a central-difference Jacobian.
fn polish(a: &Fingerprint, b: &Fingerprint, mut h: DMatrix<f64>, mut best: f64) -> f64 {
    let n = a.n();
    let p = n * (n - 1) / 2;
    let eps = 1e-6;
    let mut damping = 1e-3;
    for _ in 0..60 {
        if best == 0.0 {
            break;
        }
        let r = residual(a, b, &h);
        let mut jac = DMatrix::zeros(r.len(), p);
        for k in 0..p {
            let mut e = vec![0.0; p];
            e[k] = eps;
            let plus = residual(a, b, &(&h * skew_from(&e, n).exp()));
            e[k] = -eps;
            let minus = residual(a, b, &(&h * skew_from(&e, n).exp()));
            jac.set_column(k, &((plus - minus) / (2.0 * eps)));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut accepted = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for k in 0..p {
                m[(k, k)] += damping * (1.0 + jtj[(k, k)]);
            }
            let Some(delta) = m.lu().solve(&(-&g)) else { break };
            let cand = &h * skew_from(delta.as_slice(), n).exp();
            let v = a.rotated(&cand).sq_distance(b);
            if v < best {
                h = cand;
                best = v;
                damping = (damping * 0.3).max(1e-12);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    best
}

fn local_search(a: &Fingerprint, b: &Fingerprint, h0: &DMatrix<f64>) -> f64 {
    let (h, best) = pattern_search(a, b, h0);
    polish(a, b, h, best)
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng, reflect: bool) -> DMatrix<f64> {
    let theta: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    let r = skew_from(&theta, n).exp();
    if reflect {
        reflection(n) * r
    } else {
        r
    }
}

/// Starting point of restart `r`: the identity for `r = 0`, otherwise a
/// seeded random element of O(n), in the reflected component for odd `r`.
fn start_point(n: usize, seed: u64, r: usize) -> DMatrix<f64> {
    if r == 0 {
        return DMatrix::identity(n, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    random_orthogonal(n, &mut rng, r % 2 == 1)
}

/// Upper bound on `min_{h in O(n)} |h.w_mu - w_lam|` between precomputed
/// fingerprints.
pub fn fingerprint_distance(a: &Fingerprint, b: &Fingerprint, restarts: usize, seed: u64) -> Result<f64> {
    if a.n() != b.n() || a.order != b.order {
        return Err(Error::DimensionMismatch(format!(
            "fingerprints of shape (n={}, K={}) and (n={}, K={})",
            a.n(),
            a.order,
            b.n(),
            b.order
        )));
    }
    let n = a.n();
    if n == 1 {
        return Ok(a.distance(b).min(a.rotated(&reflection(1)).distance(b)));
    }
    let restarts = restarts.max(1);
    let results: Vec<(usize, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| (r, local_search(a, b, &start_point(n, seed, r))))
        .collect();
    let best = results
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
        .map(|x| x.1)
        .unwrap_or(f64::INFINITY);
    Ok(best.max(0.0).sqrt())
}

/// `d(mu, lam)` at fingerprint order `order`, estimated from above.
pub fn invariant_distance(mu: &Bracket, lam: &Bracket, order: usize, restarts: usize, seed: u64) -> Result<f64> {
    if mu.n() != lam.n() {
        return Err(Error::DimensionMismatch(format!("n = {} vs n = {}", mu.n(), lam.n())));
    }
    let a = fingerprint(mu, order)?;
    let b = fingerprint(lam, order)?;
    fingerprint_distance(&a, &b, restarts, seed)
}
