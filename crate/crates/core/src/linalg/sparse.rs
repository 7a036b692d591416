use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Matrix;
use crate::{Error, Result};

/// Real symmetric sparse matrix stored as its upper triangle.
///
/// Assembly sums duplicate entries and mirrors lower-triangle input, so the
/// stored triplets are unique, sorted and satisfy `row <= col`. A full CSR
/// copy is kept for matrix-vector products.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymOperator {
    dim: usize,
    upper: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymOperator {
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        for e in entries.iter_mut() {
            if e.0 >= dim || e.1 >= dim {
                return Err(Error::InvalidArgument(format!(
                    "entry ({}, {}) outside dimension {dim}",
                    e.0, e.1
                )));
            }
            if !e.2.is_finite() {
                return Err(Error::NonFinite);
            }
            if e.0 > e.1 {
                *e = (e.1, e.0, e.2);
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));
        let mut upper: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match upper.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => upper.push((r, c, v)),
            }
        }

        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in &upper {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[dim];
        let mut fill = counts.clone();
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        for &(r, c, v) in &upper {
            col_idx[fill[r]] = c;
            values[fill[r]] = v;
            fill[r] += 1;
            if r != c {
                col_idx[fill[c]] = r;
                values[fill[c]] = v;
                fill[c] += 1;
            }
        }
        // sort columns within each row
        for i in 0..dim {
            let (lo, hi) = (counts[i], counts[i + 1]);
            let mut row: Vec<(usize, f64)> = col_idx[lo..hi]
                .iter()
                .copied()
                .zip(values[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|x| x.0);
            for (k, (c, v)) in row.into_iter().enumerate() {
                col_idx[lo + k] = c;
                values[lo + k] = v;
            }
        }
        Ok(SparseSymOperator {
            dim,
            upper,
            row_ptr: counts,
            col_idx,
            values,
        })
    }

    pub fn from_dense(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let (row, col, deviation) = a.max_asymmetry();
        if deviation > super::SYMMETRY_TOLERANCE * a.max_abs() {
            return Err(Error::NotSymmetric { row, col, deviation });
        }
        let mut entries = Vec::new();
        for i in 0..a.rows() {
            for j in i..a.cols() {
                if a[(i, j)] != 0.0 {
                    entries.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(a.rows(), entries)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unique upper-triangle triplets, sorted by (row, col).
    pub fn upper_entries(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i` (full matrix, ascending columns).
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// Maximum absolute row sum, an upper bound on `‖A‖₂`.
    pub fn norm_estimate(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.upper {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    /// `A - shift·I`
    pub fn shifted(&self, shift: f64) -> SparseSymOperator {
        let mut entries = self.upper.clone();
        entries.extend((0..self.dim).map(|i| (i, i, -shift)));
        // indices already validated; assembly cannot fail
        Self::from_triplets(self.dim, entries).expect("valid shifted operator")
    }
}
