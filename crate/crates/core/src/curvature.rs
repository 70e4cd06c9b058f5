//! Curvature at the origin computed from the bracket.
//!
//! Conventions: `Lambda(x) y = 1/2 [x,y]_p + U(x,y)` with
//! `<U(x,y), z> = 1/2 (<[z,x]_p, y> + <x, [z,y]_p>)`,
//! `R(x,y) = [Lambda x, Lambda y] - Lambda([x,y]_p) - ad([x,y]_k)|_p` and
//! `Riem(x,y,z,w) = <R(x,y) z, w>`, so that `Riem(x,y,y,x)` is the
//! (unnormalised) sectional curvature and `Ric(y,z) = sum_i Riem(e_i,y,z,e_i)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bracket::Bracket;
use crate::error::Result;
use crate::tensor::CovariantTensor;

/// Curvature of a bracket at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub n: usize,
    pub riem: CovariantTensor,
    /// Row-major n x n.
    pub ricci_op: Vec<f64>,
    /// `f_k = tr Ric^k` for `k = 1..=n`.
    pub scalar_invariants: Vec<f64>,
    /// Ricci eigenvalues, sorted descending.
    pub ricci_eigenvalues: Vec<f64>,
}

impl CurvatureData {
    pub fn ricci_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.ricci_op)
    }
}

/// Tangent component `T[i][j][k] = mu(e_{q+i}, e_{q+j})` along `e_{q+k}`.
fn tangent_part(mu: &Bracket) -> impl Fn(usize, usize, usize) -> f64 + '_ {
    let q = mu.q();
    move |i, j, k| *mu.get(q + i, q + j, q + k)
}

pub(crate) fn levi_civita_unchecked(mu: &Bracket) -> Vec<DMatrix<f64>> {
    let n = mu.n();
    let t = tangent_part(mu);
    (0..n)
        .map(|r| DMatrix::from_fn(n, n, |i, j| 0.5 * t(r, j, i) + 0.5 * (t(i, r, j) + t(i, j, r))))
        .collect()
}

/// `Lambda(e_r)` for each tangent basis vector, as matrices `[out, in]`:
/// entry `(i, j)` is `<Lambda(e_r) e_j, e_i>`.
pub fn levi_civita(mu: &Bracket) -> Result<Vec<DMatrix<f64>>> {
    mu.require_member()?;
    Ok(levi_civita_unchecked(mu))
}

pub(crate) fn riemann_unchecked(mu: &Bracket) -> CovariantTensor {
    let (q, n) = (mu.q(), mu.n());
    let lam = levi_civita_unchecked(mu);
    let ads: Vec<DMatrix<f64>> = (0..q).map(|z| mu.isotropy_ad(z)).collect();
    let mut riem = CovariantTensor::zeros(n, 4);
    for x in 0..n {
        for y in 0..n {
            let mut m = &lam[x] * &lam[y] - &lam[y] * &lam[x];
            for s in 0..n {
                let c = *mu.get(q + x, q + y, q + s);
                if c != 0.0 {
                    m -= &lam[s] * c;
                }
            }
            for (z, adz) in ads.iter().enumerate() {
                let c = *mu.get(q + x, q + y, z);
                if c != 0.0 {
                    m -= adz * c;
                }
            }
            for z in 0..n {
                for w in 0..n {
                    riem.set(&[x, y, z, w], m[(w, z)]);
                }
            }
        }
    }
    riem
}

/// `Riem(e_x, e_y, e_z, e_w)` at the origin.
pub fn riemann_origin(mu: &Bracket) -> Result<CovariantTensor> {
    mu.require_member()?;
    Ok(riemann_unchecked(mu))
}

pub(crate) fn ricci_from_riem(riem: &CovariantTensor) -> DMatrix<f64> {
    let n = riem.dim;
    DMatrix::from_fn(n, n, |y, z| (0..n).map(|i| riem.get(&[i, y, z, i])).sum())
}

/// Ricci operator without the membership check (used inside the flow).
pub(crate) fn ricci_unchecked(mu: &Bracket) -> DMatrix<f64> {
    ricci_from_riem(&riemann_unchecked(mu))
}

pub fn ricci_operator(mu: &Bracket) -> Result<DMatrix<f64>> {
    mu.require_member()?;
    Ok(ricci_unchecked(mu))
}

/// `tr A^k` for `k = 1..=kmax`.
pub fn trace_powers(a: &DMatrix<f64>, kmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax);
    let mut p = a.clone();
    for k in 1..=kmax {
        if k > 1 {
            p = &p * a;
        }
        out.push(p.trace());
    }
    out
}

/// `f_k = tr Ric^k` for `k = 1..=kmax`.
pub fn scalar_invariants(mu: &Bracket, kmax: usize) -> Result<Vec<f64>> {
    Ok(trace_powers(&ricci_operator(mu)?, kmax))
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let sym = (a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

pub fn ricci_eigenvalues(mu: &Bracket) -> Result<Vec<f64>> {
    Ok(sorted_eigenvalues(&ricci_operator(mu)?))
}

pub fn curvature(mu: &Bracket) -> Result<CurvatureData> {
    mu.require_member()?;
    let n = mu.n();
    let riem = riemann_unchecked(mu);
    let ric = ricci_from_riem(&riem);
    let ricci_op = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| ric[(i, j)]).collect();
    Ok(CurvatureData {
        n,
        scalar_invariants: trace_powers(&ric, n),
        ricci_eigenvalues: sorted_eigenvalues(&ric),
        ricci_op,
        riem,
    })
}

/// Max violation of the algebraic curvature tensor identities:
/// antisymmetry in both pairs, pair symmetry and the first Bianchi identity.
pub fn symmetry_residual(riem: &CovariantTensor) -> f64 {
    let n = riem.dim;
    let mut r: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let v = riem.get(&[x, y, z, w]);
                    r = r.max((v + riem.get(&[y, x, z, w])).abs());
                    r = r.max((v + riem.get(&[x, y, w, z])).abs());
                    r = r.max((v - riem.get(&[z, w, x, y])).abs());
                    let b = v + riem.get(&[y, z, x, w]) + riem.get(&[z, x, y, w]);
                    r = r.max(b.abs());
                }
            }
        }
    }
    r
}

/// `Riem(x,y,y,x)` for orthonormal `x, y`.
pub fn sectional_curvature(riem: &CovariantTensor, x: &[f64], y: &[f64]) -> f64 {
    let n = riem.dim;
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    s += x[a] * y[b] * y[c] * x[d] * riem.get(&[a, b, c, d]);
                }
            }
        }
    }
    s
}
