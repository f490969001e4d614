//! Dense square matrices for lattice bases.
//!
//! Dimensions here are tiny (at most 8), so the implementation favors
//! clarity over BLAS-style performance: row-major storage, Gaussian
//! elimination with partial pivoting for determinants and inverses.

use crate::error::{Error, Result};
use crate::num::Real;

/// Generator matrix of a lattice: the columns are the basis vectors, i.e.
/// the lattice is `{ G z : z integer vector }`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix<F> {
    dim: usize,
    /// Row-major entries, `entries[i * dim + j]` is row `i`, column `j`.
    entries: Vec<F>,
}

impl<F: Real> GeneratorMatrix<F> {
    /// Builds a matrix from row-major entries. Fails if the entry count is
    /// not `dim * dim` or the matrix is singular.
    pub fn new(dim: usize, entries: Vec<F>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = GeneratorMatrix { dim, entries };
        if m.determinant().abs() <= F::zero() {
            return Err(Error::invalid("generator matrix must have full rank"));
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![F::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = F::one();
        }
        GeneratorMatrix { dim, entries }
    }

    pub fn diagonal(diag: &[F]) -> Self {
        let dim = diag.len();
        let mut entries = vec![F::zero(); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        GeneratorMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> F {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    /// Column `j` as a vector (one lattice basis vector).
    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// Returns a copy with every entry of column `j` multiplied by `k`.
    /// Used to form a coarse generator `G J` bit-exactly from integer `J`.
    pub fn scale_columns_by_ints(&self, factors: &[u64]) -> Self {
        debug_assert_eq!(factors.len(), self.dim);
        let mut entries = self.entries.clone();
        for i in 0..self.dim {
            for (j, &k) in factors.iter().enumerate() {
                entries[i * self.dim + j] = entries[i * self.dim + j] * crate::num::real(k as f64);
            }
        }
        GeneratorMatrix {
            dim: self.dim,
            entries,
        }
    }

    #[inline]
    pub fn mul_vec(&self, z: &[F]) -> Vec<F> {
        debug_assert_eq!(z.len(), self.dim);
        let mut out = vec![F::zero(); self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = F::zero();
            for (j, &zj) in z.iter().enumerate() {
                acc = acc + self.get(i, j) * zj;
            }
            *o = acc;
        }
        out
    }

    #[inline]
    pub fn mul_int_vec(&self, z: &[i64]) -> Vec<F> {
        debug_assert_eq!(z.len(), self.dim);
        let mut out = vec![F::zero(); self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = F::zero();
            for (j, &zj) in z.iter().enumerate() {
                if zj != 0 {
                    acc = acc + self.get(i, j) * crate::num::real(zj as f64);
                }
            }
            *o = acc;
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> F {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = F::one();
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a[row * n + col].abs() > a[pivot * n + col].abs() {
                    pivot = row;
                }
            }
            if a[pivot * n + col] == F::zero() {
                return F::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det = det * p;
            for row in col + 1..n {
                let factor = a[row * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] = a[row * n + j] - factor * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = GeneratorMatrix::<F>::identity(n).entries;
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a[row * n + col].abs() > a[pivot * n + col].abs() {
                    pivot = row;
                }
            }
            if a[pivot * n + col] == F::zero() {
                return Err(Error::invalid("matrix is singular"));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] = a[col * n + j] / p;
                inv[col * n + j] = inv[col * n + j] / p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[row * n + col];
                if factor == F::zero() {
                    continue;
                }
                for j in 0..n {
                    let av = a[col * n + j];
                    let iv = inv[col * n + j];
                    a[row * n + j] = a[row * n + j] - factor * av;
                    inv[row * n + j] = inv[row * n + j] - factor * iv;
                }
            }
        }
        Ok(GeneratorMatrix {
            dim: n,
            entries: inv,
        })
    }
}
