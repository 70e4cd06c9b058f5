//! Dense covariant tensors on R^n and the orthogonal action on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// A covariant tensor of rank `rank` on R^n, stored row-major
/// (last index fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariantTensor {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<f64>,
}

impl CovariantTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self { dim, rank, data: vec![0.0; dim.pow(rank as u32)] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Multi-index of a flat offset.
    pub fn index_of(&self, mut off: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank];
        for slot in (0..self.rank).rev() {
            idx[slot] = off % self.dim;
            off /= self.dim;
        }
        idx
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, rank: self.rank, data }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { dim: self.dim, rank: self.rank, data: self.data.iter().map(|x| c * x).collect() }
    }

    /// `(h.T)(x_1, ..., x_r) = T(h^{-1} x_1, ..., h^{-1} x_r)` for orthogonal `h`,
    /// i.e. every slot is contracted with `h`.
    pub fn rotated(&self, h: &DMatrix<f64>) -> Self {
        let n = self.dim;
        assert_eq!(h.nrows(), n);
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        for slot in 0..self.rank {
            // stride of this slot in row-major order
            let stride = n.pow((self.rank - 1 - slot) as u32);
            let block = stride * n;
            next.iter_mut().for_each(|x| *x = 0.0);
            for base in (0..cur.len()).step_by(block) {
                for inner in 0..stride {
                    for a in 0..n {
                        let mut acc = 0.0;
                        for b in 0..n {
                            acc += h[(a, b)] * cur[base + b * stride + inner];
                        }
                        next[base + a * stride + inner] = acc;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Self { dim: n, rank: self.rank, data: cur }
    }
}
