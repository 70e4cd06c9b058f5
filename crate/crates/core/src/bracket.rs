//! Structure constants on R^{q+n} = R^q + R^n and the conditions (h1)-(h4).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closedness of the isotropy subgroup. Not decidable from structure
/// constants, so it is carried along by family constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum H2Status {
    Holds,
    Fails,
    Unknown,
}

/// Family name and printable parameter values of a bracket built by a
/// family constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub name: String,
    pub params: Vec<(String, String)>,
}

/// Antisymmetric structure constants `c[i][j][k] = mu_{ij}^k`, stored densely
/// at `(i * N + j) * N + k` with `N = q + n`. Indices below `q` span the
/// isotropy factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket<T: Scalar = f64> {
    q: usize,
    n: usize,
    c: Vec<T>,
    tag: Option<FamilyTag>,
    h2: H2Status,
}

impl<T: Scalar> Bracket<T> {
    pub fn zero(q: usize, n: usize) -> Self {
        let d = q + n;
        let h2 = if q == 0 { H2Status::Holds } else { H2Status::Unknown };
        Self { q, n, c: vec![T::zero(); d * d * d], tag: None, h2 }
    }

    /// Builds a bracket from a dense array, rejecting anything that is not
    /// exactly antisymmetric.
    pub fn from_dense(q: usize, n: usize, c: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let d = q + n;
        if c.len() != d * d * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} structure constants, got {}",
                d * d * d,
                c.len()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if c[(i * d + j) * d + k] != -c[(j * d + i) * d + k].clone() {
                        return Err(Error::InvalidParameter(format!(
                            "constants are not antisymmetric at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        let mut b = Self::zero(q, n);
        b.c = c;
        Ok(b)
    }

    /// Sets `mu(e_i, e_j) ∋ v e_k` and the antisymmetric partner.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let d = self.dim();
        assert!(i != j || v.is_zero(), "mu(e_i, e_i) must vanish");
        self.c[(j * d + i) * d + k] = -v.clone();
        self.c[(i * d + j) * d + k] = v;
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        let d = self.dim();
        &self.c[(i * d + j) * d + k]
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q + self.n
    }

    pub fn constants(&self) -> &[T] {
        &self.c
    }

    pub fn tag(&self) -> Option<&FamilyTag> {
        self.tag.as_ref()
    }

    pub fn h2(&self) -> H2Status {
        self.h2
    }

    pub fn with_tag(mut self, tag: FamilyTag, h2: H2Status) -> Self {
        self.tag = Some(tag);
        self.h2 = if self.q == 0 { H2Status::Holds } else { h2 };
        self
    }

    /// Overrides the closedness status (used when reading files).
    pub fn with_h2(mut self, h2: H2Status) -> Self {
        self.h2 = if self.q == 0 { H2Status::Holds } else { h2 };
        self
    }

    /// Same constants on `R^{q'} + R^{q+n-q'}`, i.e. a different choice of
    /// isotropy factor. Closedness becomes unknown.
    pub fn resplit(&self, q_new: usize) -> Result<Self> {
        let d = self.dim();
        if q_new >= d {
            return Err(Error::InvalidParameter(format!("q = {q_new} leaves no tangent directions in dimension {d}")));
        }
        Ok(Bracket {
            q: q_new,
            n: d - q_new,
            c: self.c.clone(),
            tag: None,
            h2: if q_new == 0 { H2Status::Holds } else { H2Status::Unknown },
        })
    }

    pub fn untagged(mut self) -> Self {
        self.tag = None;
        self
    }

    /// `c * mu`. The cone is scale invariant so (h2) is kept.
    pub fn scaled(&self, s: &T) -> Self {
        let mut out = self.clone();
        out.tag = None;
        for x in out.c.iter_mut() {
            *x = x.clone() * s.clone();
        }
        out
    }

    pub fn to_f64(&self) -> Bracket<f64> {
        Bracket {
            q: self.q,
            n: self.n,
            c: self.c.iter().map(Scalar::to_f64).collect(),
            tag: self.tag.clone(),
            h2: self.h2,
        }
    }

    /// Entries `(i, j, k, value)` with `i < j` and nonzero value.
    pub fn entries(&self) -> Vec<(usize, usize, usize, T)> {
        let d = self.dim();
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in 0..d {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }
}

/// Result of checking (h1)-(h4). `passes` applies `tolerance` to all residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub h1_jacobi_residual: f64,
    pub h1_subspace_residual: f64,
    pub h3_residual: f64,
    pub h4_kernel_dim: usize,
    pub h2_status: H2Status,
    pub tolerance: f64,
}

impl MembershipReport {
    pub fn passes(&self) -> bool {
        self.h1_jacobi_residual <= self.tolerance
            && self.h1_subspace_residual <= self.tolerance
            && self.h3_residual <= self.tolerance
            && self.h4_kernel_dim == 0
            && self.h2_status != H2Status::Fails
    }

    pub fn failure_reason(&self) -> Option<String> {
        let t = self.tolerance;
        if self.h1_jacobi_residual > t {
            Some(format!("Jacobi residual {:e} exceeds {:e}", self.h1_jacobi_residual, t))
        } else if self.h1_subspace_residual > t {
            Some(format!("subspace residual {:e} exceeds {:e}", self.h1_subspace_residual, t))
        } else if self.h3_residual > t {
            Some(format!("isotropy skewness residual {:e} exceeds {:e}", self.h3_residual, t))
        } else if self.h4_kernel_dim > 0 {
            Some(format!("isotropy action has a {}-dimensional kernel", self.h4_kernel_dim))
        } else if self.h2_status == H2Status::Fails {
            Some("isotropy subgroup is not closed".into())
        } else {
            None
        }
    }
}

impl Bracket<f64> {
    pub fn from_entries(q: usize, n: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let d = q + n;
        let mut b = Self::zero(q, n);
        for &(i, j, k, v) in entries {
            if i >= d || j >= d || k >= d {
                return Err(Error::DimensionMismatch(format!("index ({i}, {j}, {k}) out of range")));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::InvalidParameter("mu(e_i, e_i) must vanish".into()));
                }
                continue;
            }
            b.set(i, j, k, v);
        }
        Ok(b)
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    /// `|mu|` with `|mu|^2 = sum_{i,j} |mu(e_i, e_j)|^2` over ordered pairs.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.c.iter().zip(&other.c).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Euclidean distance between the constant arrays.
    pub fn distance(&self, other: &Self) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Frobenius inner product of the constant arrays.
    pub fn dot(&self, other: &Self) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a * b).sum()
    }

    pub fn default_tolerance(&self) -> f64 {
        1e-10 * (1.0 + self.norm_sq())
    }

    /// Replaces the constants, keeping `q`, `n` and (h2). Used by the flow.
    pub(crate) fn with_constants(&self, c: Vec<f64>) -> Self {
        debug_assert_eq!(c.len(), self.c.len());
        Self { q: self.q, n: self.n, c, tag: None, h2: self.h2 }
    }

    /// `ad z` restricted to R^n as an n x n matrix (`[out, in]`), `z < q`.
    pub fn isotropy_ad(&self, z: usize) -> DMatrix<f64> {
        let q = self.q;
        DMatrix::from_fn(self.n, self.n, |a, b| *self.get(z, q + b, q + a))
    }

    /// `ad z` restricted to R^q as a q x q matrix, `z < q`.
    pub fn isotropy_ad_on_isotropy(&self, z: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.q, self.q, |a, b| *self.get(z, b, a))
    }

    /// Full `ad e_s` on R^{q+n} as a matrix `[out, in]`.
    pub fn ad(&self, s: usize) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |a, b| *self.get(s, b, a))
    }

    /// `J[i][j][k][l]`: the `e_l` component of
    /// `mu(mu(e_i,e_j),e_k) + mu(mu(e_j,e_k),e_i) + mu(mu(e_k,e_i),e_j)`,
    /// flattened with `l` fastest.
    pub fn jacobiator(&self) -> Vec<f64> {
        let d = self.dim();
        let d2 = d * d;
        // m[i][j][k][l] = sum_m c[i][j][m] c[m][k][l]
        let mut m = vec![0.0; d2 * d2];
        for i in 0..d {
            for j in 0..d {
                for mm in 0..d {
                    let cij = self.c[(i * d + j) * d + mm];
                    if cij == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        let row = &self.c[(mm * d + k) * d..(mm * d + k + 1) * d];
                        let base = ((i * d + j) * d + k) * d;
                        for l in 0..d {
                            m[base + l] += cij * row[l];
                        }
                    }
                }
            }
        }
        let idx = |i: usize, j: usize, k: usize| ((i * d + j) * d + k) * d;
        let mut out = vec![0.0; d2 * d2];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let (a, b, c) = (idx(i, j, k), idx(j, k, i), idx(k, i, j));
                    for l in 0..d {
                        out[a + l] = m[a + l] + m[b + l] + m[c + l];
                    }
                }
            }
        }
        out
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.jacobiator().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Max-norm of the components violating `mu(R^q,R^q) ⊂ R^q` and
    /// `mu(R^q,R^n) ⊂ R^n`.
    pub fn subspace_residual(&self) -> f64 {
        let (q, d) = (self.q, self.dim());
        let mut r: f64 = 0.0;
        for i in 0..q {
            for j in 0..d {
                for k in 0..d {
                    let bad = if j < q { k >= q } else { k < q };
                    if bad {
                        r = r.max(self.get(i, j, k).abs());
                    }
                }
            }
        }
        r
    }

    /// Max-norm of `ad z|R^n + (ad z|R^n)^T` over basis `z` of R^q.
    pub fn h3_residual(&self) -> f64 {
        (0..self.q)
            .map(|z| {
                let m = self.isotropy_ad(z);
                (&m + m.transpose()).amax()
            })
            .fold(0.0, f64::max)
    }

    /// Nullity of `z -> (mu(z, e_{q+1}), ..., mu(z, e_{q+n}))` with singular
    /// value cutoff `tol * sigma_max`.
    pub fn h4_kernel_dim(&self, tol: f64) -> usize {
        let (q, n, d) = (self.q, self.n, self.dim());
        if q == 0 {
            return 0;
        }
        let m = DMatrix::from_fn(n * d, q, |row, z| {
            let (b, k) = (row / d, row % d);
            *self.get(z, q + b, k)
        });
        let sv = m.singular_values();
        let smax = sv.max();
        if smax == 0.0 {
            return q;
        }
        let rank = sv.iter().filter(|&&s| s > tol * smax).count();
        q - rank
    }

    pub fn check_membership(&self, tol: f64) -> Result<MembershipReport> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        Ok(MembershipReport {
            h1_jacobi_residual: self.jacobi_residual(),
            h1_subspace_residual: self.subspace_residual(),
            h3_residual: self.h3_residual(),
            h4_kernel_dim: self.h4_kernel_dim(tol),
            h2_status: self.h2,
            tolerance: tol,
        })
    }

    /// Membership with the default tolerance, as an error on failure.
    pub fn require_member(&self) -> Result<()> {
        let rep = self.check_membership(self.default_tolerance())?;
        match rep.failure_reason() {
            None => Ok(()),
            Some(reason) => Err(Error::NotMember(reason)),
        }
    }

    /// `h.mu(x, y) = h mu(h^{-1} x, h^{-1} y)`.
    pub fn gl_action(&self, h: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim();
        if h.nrows() != d || h.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let cond = condition_number(h);
        if !(cond <= 1e12) {
            return Err(Error::IllConditioned(cond));
        }
        let hinv = h.clone().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;

        // out[i][j][k] = sum h[k][m] hinv[a][i] hinv[b][j] c[a][b][m]
        let mut t1 = vec![0.0; d * d * d];
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        s += h[(k, m)] * self.c[(a * d + b) * d + m];
                    }
                    t1[(a * d + b) * d + k] = s;
                }
            }
        }
        let mut t2 = vec![0.0; d * d * d];
        for a in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for b in 0..d {
                        s += hinv[(b, j)] * t1[(a * d + b) * d + k];
                    }
                    t2[(a * d + j) * d + k] = s;
                }
            }
        }
        let mut out = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for a in 0..d {
                        s += hinv[(a, i)] * t2[(a * d + j) * d + k];
                    }
                    out[(i * d + j) * d + k] = s;
                }
            }
        }
        // restore exact antisymmetry lost to rounding
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    let (p, m) = ((i * d + j) * d + k, (j * d + i) * d + k);
                    let v = 0.5 * (out[p] - out[m]);
                    out[p] = v;
                    out[m] = -v;
                }
            }
        }
        let q = self.q;
        let preserves_iso = (q..d).all(|i| (0..q).all(|z| h[(i, z)] == 0.0));
        let h2 = if q == 0 || preserves_iso { self.h2 } else { H2Status::Unknown };
        Ok(Self { q, n: self.n, c: out, tag: None, h2 })
    }

    /// Residuals of (adkh) and (adkh2) for `h = [[h_q, A], [0, h_n]]`.
    pub fn equivariant_residuals(&self, h: &DMatrix<f64>) -> Result<(f64, f64)> {
        let (q, n, d) = (self.q, self.n, self.dim());
        if h.nrows() != d || h.ncols() != d {
            return Err(Error::DimensionMismatch(format!("expected a {d}x{d} matrix")));
        }
        if (q..d).any(|i| (0..q).any(|z| h[(i, z)] != 0.0)) {
            return Err(Error::BlockForm);
        }
        let hq = h.view((0, 0), (q, q)).into_owned();
        let a = h.view((0, q), (q, n)).into_owned();
        let hn = h.view((q, q), (n, n)).into_owned();
        let hq_inv = if q == 0 {
            hq.clone()
        } else {
            hq.clone().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?
        };
        if hn.clone().try_inverse().is_none() {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        let g = hn.transpose() * &hn;
        let mut r1: f64 = 0.0;
        let mut r2: f64 = 0.0;
        for z in 0..q {
            let m = self.isotropy_ad(z);
            r1 = r1.max((&g * &m - &m * &g).amax());
            let k = self.isotropy_ad_on_isotropy(z);
            r2 = r2.max((&a * &m - &hq * k * &hq_inv * &a).amax());
        }
        Ok((r1, r2))
    }

    /// Whether (adkh) and (adkh2) hold within `tol`.
    pub fn check_equivariant_conditions(&self, h: &DMatrix<f64>, tol: f64) -> Result<(bool, bool)> {
        let (r1, r2) = self.equivariant_residuals(h)?;
        Ok((r1 <= tol, r2 <= tol))
    }

    /// Keeps `mu` on `R^q x R^{q+n}` and kills `mu(R^n, R^n)`.
    pub fn flat_degeneration(&self) -> Result<Self> {
        self.require_member()?;
        let (q, d) = (self.q, self.dim());
        let mut out = self.clone();
        out.tag = None;
        for i in q..d {
            for j in q..d {
                for k in 0..d {
                    out.c[(i * d + j) * d + k] = 0.0;
                }
            }
        }
        if q > 0 {
            // the isotropy subgroup becomes a torus acting by rotations: closed
            out.h2 = H2Status::Holds;
        }
        Ok(out)
    }
}

/// Ratio of extreme singular values.
pub fn condition_number(h: &DMatrix<f64>) -> f64 {
    let sv = h.singular_values();
    let (mn, mx) = (sv.min(), sv.max());
    if mn == 0.0 {
        f64::INFINITY
    } else {
        mx / mn
    }
}

/// Block matrix `diag(h_q, h_n)` on R^q + R^n.
pub fn block_diag(hq: &DMatrix<f64>, hn: &DMatrix<f64>) -> DMatrix<f64> {
    let (q, n) = (hq.nrows(), hn.nrows());
    let mut h = DMatrix::zeros(q + n, q + n);
    h.view_mut((0, 0), (q, q)).copy_from(hq);
    h.view_mut((q, q), (n, n)).copy_from(hn);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{heisenberg3, mu_ex03, mu_ex13, mu_ex15, Param};

    #[test]
    fn abelian_has_zero_jacobiator() {
        let mu = Bracket::<f64>::zero(0, 4);
        assert!(mu.jacobiator().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn su2_jacobi_by_hand() {
        // only triple: J(e1,e2,e3) = [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2]
        //  = c[e3,e3] + a[e1,e1] + b[e2,e2] = 0
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        assert_eq!(mu.jacobi_residual(), 0.0);
        let mu = mu_ex03(2.0, -3.0, 0.5).unwrap();
        assert_eq!(mu.jacobi_residual(), 0.0);
    }

    #[test]
    fn from_dense_rejects_non_antisymmetric() {
        let mut c = vec![0.0; 27];
        // mu(e_0, e_1) = e_2 without the antisymmetric entry
        c[5] = 1.0;
        assert!(Bracket::from_dense(0, 3, c).is_err());
    }

    #[test]
    fn norm_of_ex03() {
        let mu = mu_ex03(1.0, 2.0, 3.0).unwrap();
        assert!((mu.norm_sq() - 2.0 * 14.0).abs() < 1e-14);
    }

    #[test]
    fn membership_rejects_nonpositive_tolerance() {
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        assert!(mu.check_membership(0.0).is_err());
        assert!(mu.check_membership(-1.0).is_err());
    }

    #[test]
    fn ex03_members() {
        for (a, b, c) in [(1.0, 1.0, 1.0), (1.0, 1.0, -1.0), (1.0, 0.0, 0.0), (0.0, 0.0, 0.0)] {
            let mu = mu_ex03(a, b, c).unwrap();
            let r = mu.check_membership(mu.default_tolerance()).unwrap();
            assert!(r.passes());
            assert_eq!(r.h2_status, H2Status::Holds);
        }
    }

    #[test]
    fn ex13_h4_iff_d_nonzero() {
        let mu = mu_ex13(1.0, 2.0, 3.0, 0.0).unwrap();
        let r = mu.check_membership(mu.default_tolerance()).unwrap();
        assert_eq!(r.h4_kernel_dim, 1);
        assert!(!r.passes());
        let mu = mu_ex13(1.0, 2.0, 3.0, 0.5).unwrap();
        let r = mu.check_membership(mu.default_tolerance()).unwrap();
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn ex15_h1_violation_is_proportional() {
        // aq + bf = 1*2 + 0*1 = 2, cp + de = 0
        let mu = mu_ex15(Param::int(1), Param::int(2), 1.0, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let j = mu.jacobi_residual();
        assert!(j > 0.0);
        let mu2 = mu_ex15(Param::int(1), Param::int(2), 2.0, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert!((mu2.jacobi_residual() - 2.0 * j).abs() < 1e-12);
        // aq + bf = 0
        let ok = mu_ex15(Param::int(1), Param::int(2), 1.0, -2.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(ok.jacobi_residual(), 0.0);
    }

    #[test]
    fn ex15_irrational_ratio_fails_h2() {
        let mu = mu_ex15(Param::Irrational(2f64.sqrt()), Param::int(1), 1.0, -1.0, 0.0, 1.0, 0.0, 1.0)
            .unwrap();
        let r = mu.check_membership(mu.default_tolerance()).unwrap();
        assert_eq!(r.h2_status, H2Status::Fails);
        assert!(!r.passes());
    }

    #[test]
    fn gl_identity_and_homothety() {
        let mu = mu_ex03(1.0, 2.0, 3.0).unwrap();
        let same = mu.gl_action(&DMatrix::identity(3, 3)).unwrap();
        assert!(same.max_abs_diff(&mu) < 1e-15);
        let half = mu.gl_action(&(DMatrix::identity(3, 3) * 2.0)).unwrap();
        assert!((half.norm() - mu.norm() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn berger_isomorphism() {
        // diag(1, sqrt k, sqrt k) maps mu_{1,1,1} to mu_{1/k,1,1}
        let k: f64 = 4.0;
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, k.sqrt(), k.sqrt()]));
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        let got = mu.gl_action(&h).unwrap();
        let want = mu_ex03(1.0 / k, 1.0, 1.0).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-14, "{got:?}");
    }

    #[test]
    fn gl_rejects_singular() {
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!(matches!(mu.gl_action(&h), Err(Error::IllConditioned(_))));
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1e-13]));
        assert!(matches!(mu.gl_action(&h), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn equivariant_conditions() {
        let mu = mu_ex15(Param::int(1), Param::int(2), 1.0, -2.0, 1.0, -0.5, 2.0, 1.0).unwrap();
        mu.require_member().unwrap();
        let id = DMatrix::identity(6, 6);
        assert_eq!(mu.check_equivariant_conditions(&id, 1e-12).unwrap(), (true, true));
        // U_mu block form: r1 on e1, r2 on e2,e3, r3 on e4,e5
        let hn = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 3.0, 0.5, 0.5]));
        let h = block_diag(&DMatrix::from_element(1, 1, 1.7), &hn);
        let (a, b) = mu.check_equivariant_conditions(&h, 1e-12).unwrap();
        assert!(a && b);
        let moved = mu.gl_action(&h).unwrap();
        assert!(moved.check_membership(moved.default_tolerance()).unwrap().passes());
        // mixing e1 and e2 breaks (adkh)
        let mut hn2 = DMatrix::identity(5, 5);
        hn2[(0, 1)] = 1.0;
        let h = block_diag(&DMatrix::identity(1, 1), &hn2);
        assert!(!mu.check_equivariant_conditions(&h, 1e-12).unwrap().0);
        // lower-left block must vanish
        let mut bad = DMatrix::identity(6, 6);
        bad[(3, 0)] = 1.0;
        assert!(matches!(mu.check_equivariant_conditions(&bad, 1e-12), Err(Error::BlockForm)));
    }

    #[test]
    fn flat_degeneration_cases() {
        let ab = Bracket::<f64>::zero(0, 3);
        assert_eq!(ab.flat_degeneration().unwrap(), ab);
        let mu = mu_ex03(1.0, 2.0, 3.0).unwrap();
        assert!(mu.flat_degeneration().unwrap().constants().iter().all(|&x| x == 0.0));
        let mu = mu_ex13(1.0, 2.0, 3.0, 0.5).unwrap();
        let lam = mu.flat_degeneration().unwrap();
        assert!(lam.check_membership(lam.default_tolerance()).unwrap().passes());
        for (i, j, _k, _v) in lam.entries() {
            assert_eq!(i.min(j), 0);
        }
        let bad = mu_ex13(1.0, 2.0, 3.0, 0.0).unwrap();
        assert!(bad.flat_degeneration().is_err());
    }

    #[test]
    fn heisenberg_is_member() {
        heisenberg3().require_member().unwrap();
    }
}
