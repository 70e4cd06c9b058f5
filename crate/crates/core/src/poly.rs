//! Truncated multivariate polynomials in graded-lexicographic order.
//!
//! A polynomial of degree at most `e` is a coefficient vector of length
//! `count(e)`: in graded order the monomials of degree `<= e` form a prefix,
//! so truncation is slicing.

use std::collections::HashMap;

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    monos: Vec<Vec<u8>>,
    degs: Vec<usize>,
    /// `upto[e]` = number of monomials of degree `<= e`.
    upto: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `mul[i][j]` = index of `m_i * m_j`, for `j < count(degree - deg_i)`.
    mul: Vec<Vec<usize>>,
    /// `var_mul[v][i]` = index of `x_v * m_i`, for `deg_i < degree`.
    var_mul: Vec<Vec<usize>>,
    /// `deriv[v][i]` = `(e, k)` with `d/dx_v m_i = e * m_k`.
    deriv: Vec<Vec<Option<(u32, usize)>>>,
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Vec<u8>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u8; nvars];
    rec(0, d, &mut cur, &mut out);
    out
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        assert!(degree < 256, "degree too large");
        let mut monos = Vec::new();
        let mut degs = Vec::new();
        let mut upto = Vec::with_capacity(degree + 1);
        for d in 0..=degree {
            for m in monomials_of_degree(nvars, d) {
                monos.push(m);
                degs.push(d);
            }
            upto.push(monos.len());
        }
        let index: HashMap<Vec<u8>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

        let mul = (0..monos.len())
            .map(|i| {
                let lim = upto[degree - degs[i]];
                (0..lim)
                    .map(|j| {
                        let p: Vec<u8> = monos[i].iter().zip(&monos[j]).map(|(a, b)| a + b).collect();
                        index[&p]
                    })
                    .collect()
            })
            .collect();

        let var_mul = (0..nvars)
            .map(|v| {
                let lim = if degree == 0 { 0 } else { upto[degree - 1] };
                (0..lim)
                    .map(|i| {
                        let mut p = monos[i].clone();
                        p[v] += 1;
                        index[&p]
                    })
                    .collect()
            })
            .collect();

        let deriv = (0..nvars)
            .map(|v| {
                monos
                    .iter()
                    .map(|m| {
                        if m[v] == 0 {
                            None
                        } else {
                            let mut p = m.clone();
                            p[v] -= 1;
                            Some((m[v] as u32, index[&p]))
                        }
                    })
                    .collect()
            })
            .collect();

        Self { nvars, degree, monos, degs, upto, index, mul, var_mul, deriv }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    /// Number of monomials of degree `<= e` (capped at the basis degree).
    pub fn count(&self, e: usize) -> usize {
        self.upto[e.min(self.degree)]
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }

    pub fn deg(&self, i: usize) -> usize {
        self.degs[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Index range of the monomials of exactly degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        let lo = if d == 0 { 0 } else { self.upto[d - 1] };
        lo..self.upto[d]
    }

    /// Product truncated to degree `e`.
    pub fn mul<T: Scalar>(&self, a: &[T], b: &[T], e: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.count(e)];
        self.mul_acc(a, b, e, &mut out);
        out
    }

    /// `out += a * b` truncated to the length of `out`.
    pub fn mul_acc<T: Scalar>(&self, a: &[T], b: &[T], e: usize, out: &mut [T]) {
        debug_assert!(out.len() >= self.count(e));
        let la = a.len().min(self.count(e));
        for i in 0..la {
            if a[i].is_zero() {
                continue;
            }
            let di = self.degs[i];
            let lim = b.len().min(self.count(e - di));
            let row = &self.mul[i];
            for j in 0..lim {
                if b[j].is_zero() {
                    continue;
                }
                let k = row[j];
                out[k] = out[k].clone() + a[i].clone() * b[j].clone();
            }
        }
    }

    /// `out += c * x_v * a`, truncated to the length of `out`.
    pub fn var_mul_acc<T: Scalar>(&self, v: usize, c: &T, a: &[T], out: &mut [T]) {
        let lim = a.len().min(self.var_mul[v].len());
        for i in 0..lim {
            if a[i].is_zero() {
                continue;
            }
            let k = self.var_mul[v][i];
            if k < out.len() {
                out[k] = out[k].clone() + c.clone() * a[i].clone();
            }
        }
    }

    /// `d/dx_v a`; the result is one degree shorter.
    pub fn deriv<T: Scalar>(&self, v: usize, a: &[T]) -> Vec<T> {
        let e = self.degree_of_len(a.len());
        let len = if e == 0 { 1 } else { self.count(e - 1) };
        let mut out = vec![T::zero(); len];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            if let Some((ex, k)) = self.deriv[v][i] {
                out[k] = out[k].clone() + T::from_ratio(ex as i64, 1) * ai.clone();
            }
        }
        out
    }

    /// Largest `e` with `count(e) <= len`.
    pub fn degree_of_len(&self, len: usize) -> usize {
        self.upto.iter().rposition(|&c| c <= len).unwrap_or(0)
    }

    /// Evaluates a polynomial at a point.
    pub fn eval(&self, a: &[f64], x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, c) in a.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let mut t = *c;
            for (v, &e) in self.monos[i].iter().enumerate() {
                t *= x[v].powi(e as i32);
            }
            s += t;
        }
        s
    }
}

pub fn add_assign<T: Scalar>(out: &mut [T], a: &[T]) {
    for (o, x) in out.iter_mut().zip(a) {
        *o = o.clone() + x.clone();
    }
}

pub fn sub_assign<T: Scalar>(out: &mut [T], a: &[T]) {
    for (o, x) in out.iter_mut().zip(a) {
        *o = o.clone() - x.clone();
    }
}

pub fn truncated<T: Scalar>(a: &[T], len: usize) -> Vec<T> {
    let mut v: Vec<T> = a.iter().take(len).cloned().collect();
    v.resize(len, T::zero());
    v
}
