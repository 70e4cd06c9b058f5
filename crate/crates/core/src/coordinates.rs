//! Canonical coordinates `x -> exp(x) K` on R^n: the metric jet, curvature
//! of the polynomial metric by exact differentiation at `x = 0`, and bounds
//! on the Lie injectivity radius.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bracket::Bracket;
use crate::error::{Error, Result};
use crate::families::Param;
use crate::poly::{self, MonomialBasis};
use crate::scalar::{exact_rational, Scalar};
use crate::tensor::CovariantTensor;

pub const DEFAULT_JET_DEGREE: usize = 8;

/// `ad x = sum_s x_s ad e_s` on R^{q+n}, `x` of length `q + n`.
pub fn ad_vector(mu: &Bracket, x: &[f64]) -> DMatrix<f64> {
    let d = mu.dim();
    DMatrix::from_fn(d, d, |a, b| (0..d).map(|s| x[s] * mu.get(s, b, a)).sum())
}

/// Partial sum `sum_{k < terms} (-1)^k / (k+1)! (ad x)^k`.
pub fn dexp_series(mu: &Bracket, x: &[f64], terms: usize) -> Result<DMatrix<f64>> {
    let d = mu.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!("x has length {}, expected {d}", x.len())));
    }
    if terms == 0 {
        return Err(Error::InvalidParameter("terms must be at least 1".into()));
    }
    let ad = ad_vector(mu, x);
    let mut pow = DMatrix::identity(d, d);
    let mut out = DMatrix::zeros(d, d);
    let mut fact = 1.0;
    for k in 0..terms {
        fact *= (k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out += &pow * (sign / fact);
        pow = &pow * &ad;
    }
    Ok(out)
}

/// Truncated power series of the metric in canonical coordinates:
/// `g_ij(x) = sum_alpha a^{ij}_alpha x^alpha`, `|alpha| <= degree`.
#[derive(Debug, Clone)]
pub struct MetricJet<T: Scalar = f64> {
    pub n: usize,
    pub degree: usize,
    basis: Arc<MonomialBasis>,
    /// Row-major n x n; each entry has `basis.len()` coefficients.
    g: Vec<Vec<T>>,
}

impl<T: Scalar> MetricJet<T> {
    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn entry(&self, i: usize, j: usize) -> &[T] {
        &self.g[i * self.n + j]
    }

    /// `a^{ij}_alpha`; zero for `|alpha| > degree`.
    pub fn coeff(&self, i: usize, j: usize, alpha: &[u8]) -> T {
        match self.basis.index_of(alpha) {
            Some(idx) => self.g[i * self.n + j][idx].clone(),
            None => T::zero(),
        }
    }

    /// Nonzero coefficients as `(i, j, alpha, value)` with `i <= j`.
    pub fn entries(&self) -> Vec<(usize, usize, Vec<u8>, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                for (idx, v) in self.entry(i, j).iter().enumerate() {
                    if !v.is_zero() {
                        out.push((i, j, self.basis.exponents(idx).to_vec(), v.clone()));
                    }
                }
            }
        }
        out
    }

    /// The jet of degree `d <= self.degree` obtained by truncation.
    pub fn truncate(&self, d: usize) -> Self {
        let d = d.min(self.degree);
        let basis = Arc::new(MonomialBasis::new(self.n, d));
        let len = basis.len();
        Self { n: self.n, degree: d, basis, g: self.g.iter().map(|p| poly::truncated(p, len)).collect() }
    }
}

impl MetricJet<f64> {
    /// Metric matrix at a point.
    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.basis.eval(self.entry(i, j), x))
    }
}

/// Metric jet of degree `degree`, built from the tangent rows of
/// `A = (I - e^{-ad x}) / ad x` as `g_ij = sum_s A_{s i} A_{s j}`.
pub fn metric_jet<T: Scalar>(mu: &Bracket<T>, degree: usize) -> Result<MetricJet<T>> {
    if degree > 20 {
        return Err(Error::InvalidParameter("jet degree above 20 is not supported".into()));
    }
    mu.to_f64().require_member()?;
    Ok(metric_jet_unchecked(mu, degree))
}

pub(crate) fn metric_jet_unchecked<T: Scalar>(mu: &Bracket<T>, degree: usize) -> MetricJet<T> {
    let (q, n, d) = (mu.q(), mu.n(), mu.dim());
    let basis = Arc::new(MonomialBasis::new(n, degree));
    let a_rows = series_rows(mu, &basis, 0..n, q..d, 1);
    let cols: Vec<&Vec<Vec<T>>> = a_rows.iter().collect();
    let g = gram(&basis, &cols, |s, i| &cols[s][q + i], n, degree);
    MetricJet { n, degree, basis, g }
}

/// Metric jet of the chart `(u, v) -> exp(u) exp(v) K`, where `u` holds the
/// first `split` coordinates and `v` the remaining ones. Needs
/// `0 < split < n`.
pub fn split_metric_jet<T: Scalar>(mu: &Bracket<T>, split: usize, degree: usize) -> Result<MetricJet<T>> {
    let (q, n, d) = (mu.q(), mu.n(), mu.dim());
    if split == 0 || split >= n {
        return Err(Error::InvalidParameter(format!("split must lie in 1..{n}, got {split}")));
    }
    if degree > 20 {
        return Err(Error::InvalidParameter("jet degree above 20 is not supported".into()));
    }
    mu.to_f64().require_member()?;
    let basis = Arc::new(MonomialBasis::new(n, degree));
    let len = basis.len();
    // d/du: e^{-ad v} A(u); d/dv: A(v)
    let a_u = series_rows(mu, &basis, 0..split, 0..d, 1);
    let e_v = series_rows(mu, &basis, split..n, q..d, 0);
    let a_v = series_rows(mu, &basis, split..n, q..d, 1);
    let mut cols: Vec<Vec<Vec<T>>> = vec![vec![Vec::new(); n]; n];
    for s in 0..n {
        for i in 0..n {
            cols[s][i] = if i < split {
                let mut p = vec![T::zero(); len];
                for c in 0..d {
                    basis.mul_acc(&e_v[s][c], &a_u[c][q + i], degree, &mut p);
                }
                p
            } else {
                a_v[s][q + i].clone()
            };
        }
    }
    let refs: Vec<&Vec<Vec<T>>> = cols.iter().collect();
    let g = gram(&basis, &refs, |s, i| &refs[s][i], n, degree);
    Ok(MetricJet { n, degree, basis, g })
}

/// `g_ij = sum_s B_si B_sj` over tangent rows `s`.
fn gram<'a, T: Scalar>(
    basis: &MonomialBasis,
    rows: &[&'a Vec<Vec<T>>],
    col: impl Fn(usize, usize) -> &'a Vec<T>,
    n: usize,
    degree: usize,
) -> Vec<Vec<T>> {
    let len = basis.len();
    let mut g = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i..n {
            let mut p = vec![T::zero(); len];
            for s in 0..rows.len() {
                basis.mul_acc(col(s, i), col(s, j), degree, &mut p);
            }
            g[j * n + i] = p.clone();
            g[i * n + j] = p;
        }
    }
    g
}

/// Rows `rows` of `sum_k (-1)^k / (k + shift)! (ad x)^k`, where `x` only has
/// the coordinates in `vars`, as polynomials in all `n` tangent coordinates.
fn series_rows<T: Scalar>(
    mu: &Bracket<T>,
    basis: &MonomialBasis,
    vars: std::ops::Range<usize>,
    rows: std::ops::Range<usize>,
    shift: i64,
) -> Vec<Vec<Vec<T>>> {
    let (q, d) = (mu.q(), mu.dim());
    let len = basis.len();
    let degree = basis.degree();
    let mut pow: Vec<Vec<Vec<T>>> = rows
        .clone()
        .map(|r| {
            (0..d)
                .map(|b| {
                    let mut p = vec![T::zero(); len];
                    if b == r {
                        p[0] = T::one();
                    }
                    p
                })
                .collect()
        })
        .collect();
    let mut coef = T::one();
    for k in 1..=shift {
        coef = coef / T::from_ratio(k, 1);
    }
    let mut acc: Vec<Vec<Vec<T>>> =
        pow.iter().map(|row| row.iter().map(|p| p.iter().map(|x| x.clone() * coef.clone()).collect()).collect()).collect();
    for k in 1..=degree as i64 {
        let mut next = vec![vec![vec![T::zero(); len]; d]; pow.len()];
        for (s, row) in pow.iter().enumerate() {
            for (a, src) in row.iter().enumerate() {
                if src.iter().all(Zero::is_zero) {
                    continue;
                }
                for b in 0..d {
                    for v in vars.clone() {
                        let c = mu.get(q + v, b, a);
                        if !c.is_zero() {
                            basis.var_mul_acc(v, c, src, &mut next[s][b]);
                        }
                    }
                }
            }
        }
        pow = next;
        coef = coef * T::from_ratio(-1, k + shift);
        for (dst_row, src_row) in acc.iter_mut().zip(&pow) {
            for (dst, src) in dst_row.iter_mut().zip(src_row) {
                for (x, y) in dst.iter_mut().zip(src) {
                    if !y.is_zero() {
                        *x = x.clone() + coef.clone() * y.clone();
                    }
                }
            }
        }
    }
    acc
}

type PolyMat<T> = Vec<Vec<T>>;

fn mat_mul<T: Scalar>(b: &MonomialBasis, x: &PolyMat<T>, y: &PolyMat<T>, n: usize, e: usize) -> PolyMat<T> {
    let len = b.count(e);
    let mut out = vec![vec![T::zero(); len]; n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                b.mul_acc(&x[i * n + k], &y[k * n + j], e, &mut out[i * n + j]);
            }
        }
    }
    out
}

/// Christoffel symbols `Gamma^l_{ij}` (index `(l * n + i) * n + j`) and the
/// inverse metric, both truncated to degree `e - 1` resp. `e`.
fn christoffel<T: Scalar>(jet: &MetricJet<T>, e: usize) -> (Vec<Vec<T>>, PolyMat<T>, PolyMat<T>) {
    let (n, b) = (jet.n, jet.basis());
    let len = b.count(e);
    let g: PolyMat<T> = jet.g.iter().map(|p| poly::truncated(p, len)).collect();

    // g^{-1} = sum_m (I - g)^m, since g(0) = I
    let mut ident = vec![vec![T::zero(); len]; n * n];
    for i in 0..n {
        ident[i * n + i][0] = T::one();
    }
    let mut defect = ident.clone();
    for (dp, gp) in defect.iter_mut().zip(&g) {
        poly::sub_assign(dp, gp);
    }
    let mut ginv = ident.clone();
    let mut pow = ident;
    for _ in 0..e {
        pow = mat_mul(b, &pow, &defect, n, e);
        for (acc, p) in ginv.iter_mut().zip(&pow) {
            poly::add_assign(acc, p);
        }
    }

    // dg[(m * n + i) * n + j] = d_m g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for m in 0..n {
        for gp in &g {
            dg.push(b.deriv(m, gp));
        }
    }
    let el = if e == 0 { 1 } else { b.count(e - 1) };
    let half = T::from_ratio(1, 2);
    let idx = |a: usize, i: usize, j: usize| (a * n + i) * n + j;
    // first kind: Gamma_{m,ij}
    let mut first = vec![vec![T::zero(); el]; n * n * n];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let p = &mut first[idx(m, i, j)];
                poly::add_assign(p, &dg[idx(i, m, j)]);
                poly::add_assign(p, &dg[idx(j, m, i)]);
                poly::sub_assign(p, &dg[idx(m, i, j)]);
                for c in p.iter_mut() {
                    *c = c.clone() * half.clone();
                }
            }
        }
    }
    let ee = e.saturating_sub(1);
    let mut gamma = vec![vec![T::zero(); el]; n * n * n];
    for l in 0..n {
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    b.mul_acc(&ginv[l * n + m], &first[idx(m, i, j)], ee, &mut gamma[idx(l, i, j)]);
                }
            }
        }
    }
    (gamma, ginv, g)
}

/// `Gamma^l_{ij}(0)` with index `(l * n + i) * n + j`.
pub fn christoffel_at_origin<T: Scalar>(jet: &MetricJet<T>) -> Result<Vec<T>> {
    if jet.degree < 1 {
        return Err(Error::JetDegree { have: jet.degree, need: 1 });
    }
    let (gamma, _, _) = christoffel(jet, 1);
    Ok(gamma.into_iter().map(|p| p[0].clone()).collect())
}

/// `Riem, nabla Riem, ..., nabla^k Riem` at `x = 0` from the polynomial
/// metric, with the derivative index appended last. Needs `degree >= k + 2`.
pub fn curvature_stack_generic<T: Scalar>(jet: &MetricJet<T>, k: usize) -> Result<Vec<Vec<T>>> {
    let need = k + 2;
    if jet.degree < need {
        return Err(Error::JetDegree { have: jet.degree, need });
    }
    let (n, b) = (jet.n, jet.basis());
    let e = k + 2;
    let (gamma, _ginv, g) = christoffel(jet, e);
    let idx3 = |a: usize, i: usize, j: usize| (a * n + i) * n + j;

    // R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
    let re = k;
    let rl = b.count(re);
    let mut rup = vec![vec![T::zero(); rl]; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    let p = &mut rup[((l * n + i) * n + j) * n + kk];
                    poly::add_assign(p, &b.deriv(i, &gamma[idx3(l, j, kk)]));
                    poly::sub_assign(p, &b.deriv(j, &gamma[idx3(l, i, kk)]));
                    for m in 0..n {
                        b.mul_acc(&gamma[idx3(l, i, m)], &gamma[idx3(m, j, kk)], re, p);
                    }
                    let mut neg = vec![T::zero(); rl];
                    for m in 0..n {
                        b.mul_acc(&gamma[idx3(l, j, m)], &gamma[idx3(m, i, kk)], re, &mut neg);
                    }
                    poly::sub_assign(p, &neg);
                }
            }
        }
    }
    // Riem_{ijkw} = g_{wl} R^l_{ijk}
    let mut cur = vec![vec![T::zero(); rl]; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for w in 0..n {
                    let p = &mut cur[((i * n + j) * n + kk) * n + w];
                    for l in 0..n {
                        b.mul_acc(&g[w * n + l], &rup[((l * n + i) * n + j) * n + kk], re, p);
                    }
                }
            }
        }
    }

    let mut out = vec![cur.iter().map(|p| p[0].clone()).collect::<Vec<T>>()];
    let mut rank = 4;
    for order in 1..=k {
        let ne = k - order;
        let nl = b.count(ne);
        let mut next = vec![vec![T::zero(); nl]; n.pow(rank as u32 + 1)];
        let strides: Vec<usize> = (0..rank).map(|s| n.pow((rank - 1 - s) as u32)).collect();
        for (off, tp) in cur.iter().enumerate() {
            for m in 0..n {
                let dst = &mut next[off * n + m];
                poly::add_assign(dst, &b.deriv(m, tp));
            }
        }
        for off in 0..cur.len() {
            for m in 0..n {
                let mut acc = vec![T::zero(); nl];
                for &st in &strides {
                    let a_s = (off / st) % n;
                    let base = off - a_s * st;
                    for p in 0..n {
                        b.mul_acc(&gamma[idx3(p, m, a_s)], &cur[base + p * st], ne, &mut acc);
                    }
                }
                poly::sub_assign(&mut next[off * n + m], &acc);
            }
        }
        out.push(next.iter().map(|p| p[0].clone()).collect());
        cur = next;
        rank += 1;
    }
    Ok(out)
}

/// `nabla^k Riem` at `x = 0` as a rank `4 + k` tensor.
pub fn coordinate_curvature_oracle(jet: &MetricJet<f64>, k: usize) -> Result<CovariantTensor> {
    let mut stack = coordinate_curvature_stack(jet, k)?;
    Ok(stack.pop().expect("stack is non-empty"))
}

/// `[Riem, nabla Riem, ..., nabla^k Riem]` at `x = 0`.
pub fn coordinate_curvature_stack(jet: &MetricJet<f64>, k: usize) -> Result<Vec<CovariantTensor>> {
    let raw = curvature_stack_generic(jet, k)?;
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(order, data)| CovariantTensor { dim: jet.n, rank: 4 + order, data })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    NormBound,
    CompletelySolvable,
}

/// Lower bound on the Lie injectivity radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityBound {
    /// May be `f64::INFINITY`.
    pub lower: f64,
    pub method: BoundMethod,
    /// The norm bound is only proven for `q = 0`.
    pub heuristic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solvability {
    Certified,
    Refuted,
    Unknown,
}

fn rank_rational(rows: &[Vec<BigRational>]) -> (usize, Vec<Vec<BigRational>>) {
    let mut m: Vec<Vec<BigRational>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if m.is_empty() {
        return (0, m);
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, piv);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (r, m)
}

/// Nilpotency of the exact rational value of the constants, by computing
/// the lower central series.
pub fn is_nilpotent(mu: &Bracket) -> bool {
    let d = mu.dim();
    let c: Vec<BigRational> =
        mu.constants().iter().map(|&x| exact_rational(x).unwrap_or_else(BigRational::zero)).collect();
    let bracket = |x: &[BigRational], y: usize| -> Vec<BigRational> {
        // [x, e_y] = sum_i x_i c[i][y][k] e_k
        (0..d)
            .map(|k| {
                let mut s = BigRational::zero();
                for (i, xi) in x.iter().enumerate() {
                    let cc = &c[(i * d + y) * d + k];
                    if !xi.is_zero() && !cc.is_zero() {
                        s += xi.clone() * cc.clone();
                    }
                }
                s
            })
            .collect()
    };
    let mut basis: Vec<Vec<BigRational>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut dim = d;
    loop {
        let mut rows = Vec::new();
        for v in &basis {
            for y in 0..d {
                rows.push(bracket(v, y));
            }
        }
        let (r, reduced) = rank_rational(&rows);
        if r == 0 {
            return true;
        }
        if r == dim {
            return false;
        }
        dim = r;
        basis = reduced;
    }
}

/// Nilpotent: certified. A complex eigenvalue of `ad x` for a basis vector
/// or one of 64 seeded random directions: refuted. Otherwise unknown.
pub fn is_completely_solvable(mu: &Bracket) -> Result<Solvability> {
    if mu.q() != 0 {
        return Err(Error::InvalidParameter("complete solvability is tested for q = 0 only".into()));
    }
    if is_nilpotent(mu) {
        return Ok(Solvability::Certified);
    }
    let d = mu.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut dirs: Vec<Vec<f64>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..64 {
        dirs.push((0..d).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    for x in &dirs {
        let ad = ad_vector(mu, x);
        let scale = 1.0 + ad.amax();
        if ad.complex_eigenvalues().iter().any(|z| z.im.abs() > 1e-9 * scale) {
            return Ok(Solvability::Refuted);
        }
    }
    Ok(Solvability::Unknown)
}

/// `pi / |mu|`, or infinity when complete solvability is certified.
pub fn injectivity_bound(mu: &Bracket) -> Result<InjectivityBound> {
    mu.require_member()?;
    if mu.q() == 0 && is_completely_solvable(mu)? == Solvability::Certified {
        return Ok(InjectivityBound { lower: f64::INFINITY, method: BoundMethod::CompletelySolvable, heuristic: false });
    }
    Ok(InjectivityBound { lower: PI / mu.norm(), method: BoundMethod::NormBound, heuristic: mu.q() > 0 })
}

fn big(p: &Param) -> Option<BigRational> {
    p.to_big()
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    // gcd(x/y, u/v) = gcd(x v, u y) / (y v)
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    BigRational::new(num, a.denom() * b.denom())
}

/// Upper bound `3 pi g / (p^2 + pq + q^2)` on the Lie injectivity radius of
/// an Aloff-Wallach bracket with rational slopes, `g` the rational gcd of
/// `p` and `q`: the curve `s -> exp(s e_1)` returns to the isotropy
/// subgroup at that parameter.
pub fn aw_injectivity_upper_bound(p: Param, q: Param) -> Option<f64> {
    let (pb, qb) = (big(&p)?, big(&q)?);
    if pb.is_zero() && qb.is_zero() {
        return None;
    }
    let g = rational_gcd(&pb.abs(), &qb.abs());
    let r = pb.clone() * pb.clone() + pb.clone() * qb.clone() + qb.clone() * qb;
    let ratio = BigRational::from_integer(BigInt::from(3)) * g / r;
    Some(PI * Scalar::to_f64(&ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::riemann_origin;
    use crate::families::{heisenberg3, mu_ex03, mu_ex03_exact, mu_ex13};

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn dexp_trivial_cases() {
        let mu = mu_ex03(1.0, 2.0, 3.0).unwrap();
        let z = dexp_series(&mu, &[0.0; 3], 5).unwrap();
        assert_eq!(z, DMatrix::identity(3, 3));
        let ab = Bracket::<f64>::zero(0, 3);
        assert_eq!(dexp_series(&ab, &[0.3, -1.0, 2.0], 6).unwrap(), DMatrix::identity(3, 3));
        assert!(dexp_series(&mu, &[0.0; 3], 0).is_err());
    }

    #[test]
    fn dexp_nilpotent_terminates() {
        let mu = heisenberg3();
        let x = [0.4, -1.2, 0.9];
        let ad = ad_vector(&mu, &x);
        assert!((&ad * &ad).amax() < 1e-15);
        let three = dexp_series(&mu, &x, 3).unwrap();
        let many = dexp_series(&mu, &x, 12).unwrap();
        assert!((three - many).amax() < 1e-15);
    }

    #[test]
    fn abelian_jet_is_identity() {
        let jet = metric_jet(&Bracket::<f64>::zero(0, 3), 4).unwrap();
        for (i, j, alpha, v) in jet.entries() {
            assert!(alpha.iter().all(|&a| a == 0));
            assert_eq!(i, j);
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn degree_one_coefficients_exact() {
        let mu = mu_ex03_exact(br(1, 1), br(2, 1), br(3, 1));
        let jet = metric_jet(&mu, 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut alpha = [0u8; 3];
                    alpha[k] = 1;
                    let want = -(mu.get(k, j, i).clone() + mu.get(k, i, j).clone()) / br(2, 1);
                    assert_eq!(jet.coeff(i, j, &alpha), want);
                }
            }
        }
    }

    #[test]
    fn christoffel_is_symmetric_part() {
        let mu = mu_ex13(0.7, -1.1, 0.4, 1.3).unwrap();
        let jet = metric_jet(&mu, 2).unwrap();
        let gam = christoffel_at_origin(&jet).unwrap();
        let (q, n) = (1, 3);
        let t = |i: usize, j: usize, k: usize| *mu.get(q + i, q + j, q + k);
        for l in 0..n {
            for r in 0..n {
                for j in 0..n {
                    let want = 0.5 * (t(l, r, j) + t(l, j, r));
                    assert!((gam[(l * n + r) * n + j] - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn oracle_matches_algebraic_on_sphere() {
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        let jet = metric_jet(&mu, 2).unwrap();
        let c = coordinate_curvature_oracle(&jet, 0).unwrap();
        let a = riemann_origin(&mu).unwrap();
        assert!(c.sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn oracle_needs_degree() {
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        let jet = metric_jet(&mu, 2).unwrap();
        assert!(matches!(coordinate_curvature_oracle(&jet, 1), Err(Error::JetDegree { have: 2, need: 3 })));
    }

    #[test]
    fn flat_jet_has_zero_curvature() {
        let jet = metric_jet(&Bracket::<f64>::zero(0, 3), 3).unwrap();
        let st = coordinate_curvature_stack(&jet, 1).unwrap();
        assert!(st.iter().all(|t| t.max_abs() == 0.0));
        let e2 = metric_jet(&mu_ex03(1.0, 1.0, 0.0).unwrap(), 4).unwrap();
        let st = coordinate_curvature_stack(&e2, 2).unwrap();
        assert!(st.iter().all(|t| t.max_abs() < 1e-13));
    }

    #[test]
    fn split_chart_gives_same_curvature() {
        for mu in [mu_ex03(0.5, 1.0, 2.0).unwrap(), mu_ex13(0.7, -1.2, 0.4, 1.5).unwrap()] {
            let alg = riemann_origin(&mu).unwrap();
            for split in 1..3 {
                let jet = split_metric_jet(&mu, split, 2).unwrap();
                let r = coordinate_curvature_oracle(&jet, 0).unwrap();
                assert!(r.sub(&alg).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_chart_agrees_with_canonical_on_each_factor() {
        let mu = mu_ex03(1.0, 2.0, 3.0).unwrap();
        let a = metric_jet(&mu, 4).unwrap();
        let b = split_metric_jet(&mu, 1, 4).unwrap();
        let mut mixed: f64 = 0.0;
        for idx in 0..a.basis().len() {
            let e = a.basis().exponents(idx);
            let only_u = e[1..].iter().all(|&x| x == 0);
            let only_v = e[0] == 0;
            for i in 0..3 {
                for j in 0..3 {
                    let gap = (a.entry(i, j)[idx] - b.entry(i, j)[idx]).abs();
                    let uu = i == 0 && j == 0;
                    let vv = i > 0 && j > 0;
                    if (only_u && uu) || (only_v && vv) {
                        assert!(gap < 1e-14, "{e:?}");
                    } else {
                        mixed = mixed.max(gap);
                    }
                }
            }
        }
        assert!(mixed > 1e-3);
        assert!(split_metric_jet(&mu, 0, 2).is_err());
        assert!(split_metric_jet(&mu, 3, 2).is_err());
    }

    #[test]
    fn high_degree_series_coefficients() {
        let jet = metric_jet(&heisenberg3(), 20).unwrap();
        assert_eq!(jet.degree, 20);
        let exact = metric_jet(&mu_ex03_exact(br(1, 1), br(0, 1), br(0, 1)), 20).unwrap();
        assert!(exact.entries().iter().all(|(_, _, a, _)| a.iter().map(|&x| x as usize).sum::<usize>() <= 2));
    }

    #[test]
    fn injectivity_cases() {
        let ab = injectivity_bound(&Bracket::<f64>::zero(0, 3)).unwrap();
        assert!(ab.lower.is_infinite());
        let h = injectivity_bound(&heisenberg3()).unwrap();
        assert_eq!(h.method, BoundMethod::CompletelySolvable);
        let s = injectivity_bound(&mu_ex03(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((s.lower - PI / 6f64.sqrt()).abs() < 1e-15);
        let m = injectivity_bound(&mu_ex13(1.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(m.heuristic);
    }

    #[test]
    fn solvability_cases() {
        assert_eq!(is_completely_solvable(&mu_ex03(1.0, 1.0, 1.0).unwrap()).unwrap(), Solvability::Refuted);
        assert_eq!(is_completely_solvable(&mu_ex03(1.0, 0.0, -1.0).unwrap()).unwrap(), Solvability::Unknown);
        assert_eq!(is_completely_solvable(&mu_ex03(1.0, 1.0, 0.0).unwrap()).unwrap(), Solvability::Refuted);
        assert!(is_completely_solvable(&mu_ex13(1.0, 1.0, 1.0, 1.0).unwrap()).is_err());
        // filiform is nilpotent of step 3
        let fil = Bracket::from_entries(0, 4, &[(0, 1, 2, 1.0), (0, 2, 3, 2.0)]).unwrap();
        assert!(is_nilpotent(&fil));
    }

    #[test]
    fn aw_upper_bound() {
        let b = aw_injectivity_upper_bound(Param::int(1), Param::int(1)).unwrap();
        assert!((b - PI).abs() < 1e-15);
        let b = aw_injectivity_upper_bound(Param::int(1), Param::ratio(11, 10).unwrap()).unwrap();
        assert!((b - 3.0 * PI * 0.1 / (1.0 + 1.1 + 1.21)).abs() < 1e-14);
        assert!(aw_injectivity_upper_bound(Param::Irrational(2f64.sqrt()), Param::int(1)).is_none());
    }
}
