//! Real sparse matrices in compressed-row form.

use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest dimension converted to a dense matrix.
pub const MAX_DENSE_DIM: usize = 16384;

/// A real square matrix in compressed sparse row storage.
///
/// Rows and columns index basis states; for full-space operators the index is
/// the packed occupation configuration, for sector blocks it is the position
/// in the sector basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Assembles a matrix from `(row, col, value)` triplets.
    ///
    /// Triplets are sorted by row then column and duplicates are summed, so
    /// the storage does not depend on the insertion order.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|&&(i, j, _)| i >= dim || j >= dim) {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) outside a {dim}x{dim} matrix"
            )));
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().expect("previous entry exists") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseOperator { dim, row_ptr, cols, vals })
    }

    /// The zero matrix.
    pub fn zeros(dim: usize) -> Self {
        SparseOperator { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    /// Entry `(i, j)`, zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// All stored entries as triplets in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.dim).flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v))).collect()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `A x` as a new vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.apply(x, &mut y);
        y
    }

    /// Dense copy of the matrix.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.dim > MAX_DENSE_DIM {
            return Err(Error::DimensionOverflow(format!(
                "dense matrix of dimension {} exceeds {MAX_DENSE_DIM}",
                self.dim
            )));
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        Ok(m)
    }

    /// Largest absolute asymmetry `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .into_iter()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the spectral norm of a
    /// symmetric matrix.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// The block `P A P` on the given basis indices, re-indexed by position.
    pub fn restrict(&self, basis: &[usize]) -> Result<SparseOperator> {
        let mut position = std::collections::HashMap::with_capacity(basis.len());
        for (k, &b) in basis.iter().enumerate() {
            if b >= self.dim {
                return Err(Error::InvalidArgument(format!("basis index {b} out of range")));
            }
            position.insert(b, k);
        }
        let mut triplets = Vec::new();
        for (k, &b) in basis.iter().enumerate() {
            for (j, v) in self.row(b) {
                if let Some(&l) = position.get(&j) {
                    triplets.push((k, l, v));
                }
            }
        }
        SparseOperator::from_triplets(basis.len(), triplets)
    }

    /// Writes the lower triangle in Matrix Market coordinate format with
    /// 1-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        let lower: Vec<(usize, usize, f64)> =
            self.triplets().into_iter().filter(|&(i, j, _)| j <= i).collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, lower.len())?;
        for (i, j, v) in lower {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}
