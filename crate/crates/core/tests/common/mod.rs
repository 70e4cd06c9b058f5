#![allow(dead_code)]

use homspace::families::{mu_ex03, mu_ex13, mu_ex15};
use homspace::{Bracket, Param};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Random invertible matrix with condition number below 50.
pub fn random_gl(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let h = DMatrix::from_fn(n, n, |i, j| uniform(rng, -1.0, 1.0) + if i == j { 1.5 } else { 0.0 });
        if homspace::bracket::condition_number(&h) < 50.0 {
            return h;
        }
    }
}

/// Random orthogonal matrix; `reflect` picks the det = -1 component.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize, reflect: bool) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| uniform(rng, -1.0, 1.0));
    let mut q = a.qr().q();
    if (q.determinant() < 0.0) != reflect {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// `R x_A R^m`: `mu(e_0, e_i) = A e_i`.
fn semidirect(a: &DMatrix<f64>) -> Bracket {
    let m = a.nrows();
    let mut entries = Vec::new();
    for i in 0..m {
        for k in 0..m {
            if a[(k, i)] != 0.0 {
                entries.push((0, 1 + i, 1 + k, a[(k, i)]));
            }
        }
    }
    Bracket::from_entries(0, m + 1, &entries).unwrap()
}

/// A Lie bracket on R^3 or R^4 drawn from the unimodular, solvable and
/// product types, moved by a random element of GL(n); rejection-sampled
/// for membership.
pub fn random_h0(rng: &mut ChaCha8Rng, n: usize) -> Bracket {
    assert!(n == 3 || n == 4);
    loop {
        let kind = rng.random_range(0..3);
        let base = if kind == 0 {
            let s = mu_ex03(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)).unwrap();
            Bracket::from_entries(0, n, &s.entries()).unwrap()
        } else {
            semidirect(&DMatrix::from_fn(n - 1, n - 1, |_, _| uniform(rng, -1.5, 1.5)))
        };
        let mu = base.gl_action(&random_gl(rng, n)).unwrap();
        if mu.require_member().is_ok() {
            return mu;
        }
    }
}

/// A member of H_{1,3} or H_{1,5}, rotated by a random O(n) element.
pub fn random_h1(rng: &mut ChaCha8Rng, n: usize) -> Bracket {
    assert!(n == 3 || n == 5);
    loop {
        let base = if n == 3 {
            let d = uniform(rng, 0.3, 2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            mu_ex13(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), d).unwrap()
        } else {
            let (p, q) = (rng.random_range(1..4), rng.random_range(1..4));
            let (a, c) = (uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
            let (e, f) = (uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
            // aq + bf = 0 and cp + de = 0
            let b = -a * q as f64 / f;
            let d = -c * p as f64 / e;
            mu_ex15(Param::int(p), Param::int(q), a, b, c, d, e, f).unwrap()
        };
        let mut h = DMatrix::identity(n + 1, n + 1);
        h[(0, 0)] = uniform(rng, 0.5, 2.0);
        let reflect = rng.random_bool(0.5);
        h.view_mut((1, 1), (n, n)).copy_from(&random_orthogonal(rng, n, reflect));
        let mu = base.gl_action(&h).unwrap();
        if mu.require_member().is_ok() {
            return mu;
        }
    }
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den > 1e-12 {
        num / den
    } else {
        num
    }
}
