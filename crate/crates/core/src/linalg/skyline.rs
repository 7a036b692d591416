//! Envelope (skyline) `LDLᵀ` factorization of a sparse symmetric matrix.
//!
//! No pivoting: fill-in stays inside the envelope of the lower triangle,
//! which for a 5-point stencil in lexicographic order is one grid line wide.

use alloc::vec;
use alloc::vec::Vec;

use super::{vector, SparseSymOperator};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SkylineLdl {
    n: usize,
    /// First stored column of each row.
    first: Vec<usize>,
    /// Offset of row `i`'s strictly-lower entries in `lower`.
    offset: Vec<usize>,
    /// Unit lower factor, strictly below the diagonal.
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdl {
    /// Factors `A - shift·I`. A pivot below `1e-13 · ‖A‖` is reported as a
    /// breakdown: the shift is too close to an eigenvalue.
    pub fn factor(a: &SparseSymOperator, shift: f64) -> Result<Self> {
        let n = a.dim();
        let mut first = vec![0usize; n];
        for (i, f) in first.iter_mut().enumerate() {
            let (cols, _) = a.row(i);
            *f = cols.first().copied().map_or(i, |c| c.min(i));
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; offset[n]];
        let mut diag = vec![0.0; n];
        let scale = a.norm_estimate().max(shift.abs()).max(f64::MIN_POSITIVE);
        let tiny = 1e-13 * scale;

        // u_j = L_ij D_j for the row being factored
        let mut u = Vec::new();
        for i in 0..n {
            let fi = first[i];
            let width = i - fi;
            u.clear();
            u.resize(width, 0.0);
            let (cols, vals) = a.row(i);
            let mut aii = -shift;
            for (&c, &v) in cols.iter().zip(vals) {
                if c < i {
                    u[c - fi] = v;
                } else if c == i {
                    aii += v;
                }
            }
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &lower[offset[j] + (k0 - fj)..offset[j] + (j - fj)];
                let s = vector::dot(&u[k0 - fi..j - fi], row_j);
                u[j - fi] -= s;
            }
            let mut d = aii;
            let row_i = &mut lower[offset[i]..offset[i + 1]];
            for (k, (l, uk)) in row_i.iter_mut().zip(&u).enumerate() {
                *l = uk / diag[fi + k];
                d -= uk * *l;
            }
            if !(d.abs() > tiny) {
                return Err(Error::FactorizationBreakdown {
                    shift,
                    pivot_index: i,
                });
            }
            diag[i] = d;
        }
        Ok(SkylineLdl {
            n,
            first,
            offset,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative pivots, i.e. the number of eigenvalues of `A`
    /// below the shift (Sylvester's law of inertia).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            let s = vector::dot(row, &x[fi..i]);
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let row = &self.lower[self.offset[i]..self.offset[i + 1]];
            vector::axpy(-xi, row, &mut x[fi..i]);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
