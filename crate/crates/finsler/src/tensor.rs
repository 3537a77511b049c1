//! Dense multi-index arrays with per-slot variance labels.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Upper,
    Lower,
}

/// Dense rank-r tensor over an n-dimensional chart, row-major in its
/// indices. Variance labels are bookkeeping for callers (raising/lowering is
/// done explicitly by the geometry code).
#[derive(Clone, Debug, Serialize)]
pub struct Tensor {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, variance: &[Variance]) -> Tensor {
        let len = dim.pow(variance.len() as u32);
        Tensor {
            dim,
            variance: variance.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(
        dim: usize,
        variance: &[Variance],
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Tensor {
        let mut t = Tensor::zeros(dim, variance);
        let rank = variance.len();
        let mut idx = vec![0usize; rank];
        for flat in 0..t.data.len() {
            t.unflatten(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut flat = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            flat = flat * self.dim + i;
        }
        flat
    }

    fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in (0..idx.len()).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let flat = self.flatten(idx);
        self.data[flat] = v;
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation from symmetry under swapping slots `a` and `b`.
    pub fn symmetry_defect(&self, a: usize, b: usize) -> f64 {
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut swapped = vec![0usize; rank];
        let mut worst = 0.0f64;
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            swapped.copy_from_slice(&idx);
            swapped.swap(a, b);
            worst = worst.max((self.get(&idx) - self.get(&swapped)).abs());
        }
        worst
    }

    /// Largest deviation from antisymmetry under swapping slots `a` and `b`.
    pub fn antisymmetry_defect(&self, a: usize, b: usize) -> f64 {
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut swapped = vec![0usize; rank];
        let mut worst = 0.0f64;
        for flat in 0..self.data.len() {
            self.unflatten(flat, &mut idx);
            swapped.copy_from_slice(&idx);
            swapped.swap(a, b);
            worst = worst.max((self.get(&idx) + self.get(&swapped)).abs());
        }
        worst
    }

    /// Elementwise difference sup-norm.
    pub fn distance(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "tensor shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Iterate all index tuples of this tensor's shape.
    pub fn indices(&self) -> IndexIter {
        IndexIter {
            dim: self.dim,
            rank: self.rank(),
            next_flat: 0,
            len: self.data.len(),
        }
    }
}

pub struct IndexIter {
    dim: usize,
    rank: usize,
    next_flat: usize,
    len: usize,
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.next_flat >= self.len {
            return None;
        }
        let mut idx = vec![0usize; self.rank];
        let mut flat = self.next_flat;
        for slot in (0..self.rank).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        self.next_flat += 1;
        Some(idx)
    }
}

/// Invert an n-by-n matrix by Gauss-Jordan with partial pivoting.
/// Returns `None` when a pivot degenerates.
pub(crate) fn invert_matrix(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut aug = vec![0.0; n * 2 * n];
    for i in 0..n {
        for j in 0..n {
            aug[i * 2 * n + j] = a[i * n + j];
        }
        aug[i * 2 * n + n + i] = 1.0;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                aug[r1 * 2 * n + col]
                    .abs()
                    .total_cmp(&aug[r2 * 2 * n + col].abs())
            })
            .unwrap();
        let pivot = aug[pivot_row * 2 * n + col];
        if pivot.abs() < 1e-300 || !pivot.is_finite() {
            return None;
        }
        if pivot_row != col {
            for k in 0..2 * n {
                aug.swap(col * 2 * n + k, pivot_row * 2 * n + k);
            }
        }
        let inv = 1.0 / aug[col * 2 * n + col];
        for k in 0..2 * n {
            aug[col * 2 * n + k] *= inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = aug[row * 2 * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..2 * n {
                aug[row * 2 * n + k] -= factor * aug[col * 2 * n + k];
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = aug[i * 2 * n + n + j];
        }
    }
    Some(out)
}

pub(crate) fn determinant(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| m[r1 * n + col].abs().total_cmp(&m[r2 * n + col].abs()))
            .unwrap();
        let pivot = m[pivot_row * n + col];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        det *= pivot;
        for row in (col + 1)..n {
            let factor = m[row * n + col] / pivot;
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let t = Tensor::from_fn(
            3,
            &[Variance::Upper, Variance::Lower, Variance::Lower],
            |i| (i[0] * 100 + i[1] * 10 + i[2]) as f64,
        );
        assert_eq!(t.get(&[2, 1, 0]), 210.0);
        assert_eq!(t.get(&[0, 0, 2]), 2.0);
        assert_eq!(t.indices().count(), 27);
    }

    #[test]
    fn symmetry_defects() {
        let sym = Tensor::from_fn(2, &[Variance::Lower, Variance::Lower], |i| {
            (i[0] + i[1]) as f64
        });
        assert_eq!(sym.symmetry_defect(0, 1), 0.0);
        let anti = Tensor::from_fn(2, &[Variance::Lower, Variance::Lower], |i| {
            i[0] as f64 - i[1] as f64
        });
        assert_eq!(anti.antisymmetry_defect(0, 1), 0.0);
        assert!(anti.symmetry_defect(0, 1) > 0.0);
    }

    #[test]
    fn matrix_inverse() {
        let a = [2.0, 1.0, 1.0, 3.0];
        let inv = invert_matrix(&a, 2).unwrap();
        // a * inv = id
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += a[i * 2 + k] * inv[k * 2 + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-14);
            }
        }
        assert!((determinant(&a, 2) - 5.0).abs() < 1e-14);
    }
}
