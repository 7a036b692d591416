//! Real dense and sparse linear algebra used by every backend.
//!
//! Everything here is real arithmetic: the billiard Laplacian and the Ising
//! Hamiltonian are both real symmetric.

mod dense;
mod matrix;
mod shift_invert;
mod skyline;
mod sparse;
mod svd;
pub mod vector;

pub use dense::{dense_sym_eig, sym_eigenvalues, SYMMETRY_TOLERANCE};
pub use matrix::Matrix;
pub use shift_invert::{shift_invert_eig, ShiftInvertOptions};
pub use skyline::SkylineLdl;
pub use sparse::SparseSymOperator;
pub use svd::{svd, SvdResult};

use alloc::vec::Vec;

/// An eigenvalue, its unit eigenvector and the residual `‖A v − λ v‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Flip `v` so that its entry of largest magnitude is positive.
///
/// Ties are broken by the lowest index. Returns `true` if the sign changed.
pub fn fix_sign(v: &mut [f64]) -> bool {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        // strict comparison keeps the first of equal magnitudes; the small
        // relative slack stops roundoff from picking a different index.
        if x.abs() > best_abs * (1.0 + 1e-12) {
            best_abs = x.abs();
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}
