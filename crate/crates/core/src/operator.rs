//! Sparse complex operators on a truncated Fock space.
//!
//! Entries are kept as row-major sorted `(row, col, value)` triples with no
//! duplicates and no explicit zeros. All arithmetic is exact up to the
//! floating-point operations on the stored values, so operators built from
//! integer entries stay bit-exact under products and sums.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl fmt::Debug for SparseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseOperator")
            .field("dim", &self.dim)
            .field("nnz", &self.entries.len())
            .finish()
    }
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| C64::new(1.0, 0.0)).collect())
    }

    pub fn diagonal(values: Vec<C64>) -> Self {
        let dim = values.len();
        let entries = values
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != C64::new(0.0, 0.0))
            .map(|(i, v)| (i, i, v))
            .collect();
        Self { dim, entries }
    }

    /// Builds an operator from arbitrary triples. Duplicate positions are
    /// summed; resulting zeros are dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= dim {
                return Err(Error::OutOfRange { index: r, dim });
            }
            if c >= dim {
                return Err(Error::OutOfRange { index: c, dim });
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
            *acc.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(dim, acc))
    }

    fn from_map(dim: usize, map: BTreeMap<(usize, usize), C64>) -> Self {
        let entries = map
            .into_iter()
            .filter(|(_, v)| *v != C64::new(0.0, 0.0))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry lookup by binary search over the sorted triples.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        match self
            .entries
            .binary_search_by(|&(r, c, _)| (r, c).cmp(&(row, col)))
        {
            Ok(i) => self.entries[i].2,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, v * factor))
                .filter(|(_, _, v)| *v != C64::new(0.0, 0.0))
                .collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: C64, other: &Self, beta: C64) -> Result<Self> {
        self.check_dim(other)?;
        let mut acc = BTreeMap::new();
        for &(r, c, v) in &self.entries {
            *acc.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += alpha * v;
        }
        for &(r, c, v) in &other.entries {
            *acc.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += beta * v;
        }
        Ok(Self::from_map(self.dim, acc))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        // row offsets of `other` for direct row access
        let mut row_start = vec![0usize; other.dim + 1];
        for &(r, _, _) in &other.entries {
            row_start[r + 1] += 1;
        }
        for i in 0..other.dim {
            row_start[i + 1] += row_start[i];
        }
        let mut acc = BTreeMap::new();
        for &(i, k, a) in &self.entries {
            for &(_, j, b) in &other.entries[row_start[k]..row_start[k + 1]] {
                *acc.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        Ok(Self::from_map(self.dim, acc))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|&(r, c, v)| (c, r, v.conj()))
            .collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self {
            dim: self.dim,
            entries,
        }
    }

    /// Kronecker product on the `dim * other.dim` space, index `i * other.dim + j`.
    pub fn kron(&self, other: &Self) -> Self {
        let n = other.dim;
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for &(r1, c1, a) in &self.entries {
            for &(r2, c2, b) in &other.entries {
                let v = a * b;
                if v != C64::new(0.0, 0.0) {
                    entries.push((r1 * n + r2, c1 * n + c2, v));
                }
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self {
            dim: self.dim * n,
            entries,
        }
    }

    /// Largest entry magnitude; zero for the zero operator.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint())
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    /// Row-major dense copy. Intended for small dimensions.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); self.dim]; self.dim];
        for &(r, c, v) in &self.entries {
            out[r][c] = v;
        }
        out
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply_slice(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for &(r, c, a) in &self.entries {
            out[r] += a * v[c];
        }
        Ok(out)
    }
}
