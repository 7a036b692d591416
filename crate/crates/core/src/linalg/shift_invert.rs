//! Interior eigenvalues of a sparse symmetric operator by shift-invert.
//!
//! `(A − σI)` is factored once (skyline `LDLᵀ`) and a Krylov basis of
//! `(A − σI)⁻¹` is grown with full reorthogonalization. Rayleigh–Ritz on that
//! operator picks the Ritz values of largest magnitude, i.e. the eigenvalues
//! of `A` closest to `σ`. When the basis is full it is compressed to the best
//! Ritz vectors (a thick restart) and expansion continues from the
//! worst-converged one.

use alloc::vec;
use alloc::vec::Vec;

use super::{dense_sym_eig, fix_sign, vector, EigenPair, Matrix, SkylineLdl, SparseSymOperator};
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftInvertOptions {
    /// Relative residual target: `‖A v − λ v‖ ≤ tol · ‖A‖`.
    pub tol: f64,
    /// Maximum number of restarts; `None` means `10 · count`.
    pub max_restarts: Option<usize>,
    /// Krylov basis size; `None` picks `max(2·count + 10, 24)`.
    pub basis_size: Option<usize>,
}

impl Default for ShiftInvertOptions {
    fn default() -> Self {
        ShiftInvertOptions {
            tol: 1e-9,
            max_restarts: None,
            basis_size: None,
        }
    }
}

/// The `count` eigenpairs of `op` nearest to `shift`, sorted by `|λ − shift|`.
pub fn shift_invert_eig(
    op: &SparseSymOperator,
    shift: f64,
    count: usize,
    options: ShiftInvertOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "requested {count} eigenpairs from an operator of dimension {n}"
        )));
    }
    if !shift.is_finite() || !(options.tol > 0.0) {
        return Err(Error::InvalidArgument("shift and tolerance must be finite and positive tolerance".into()));
    }
    let factor = SkylineLdl::factor(op, shift)?;
    let norm_a = op.norm_estimate().max(f64::MIN_POSITIVE);
    let threshold = options.tol * norm_a;
    let max_restarts = options.max_restarts.unwrap_or(10 * count).max(1);
    let m = options
        .basis_size
        .unwrap_or((2 * count + 10).max(24))
        .max(count + 2)
        .min(n);
    let keep = (count + (m - count) / 2).min(m - 1).max(count.min(m));

    // basis and its image under the inverse operator
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut next = start_vector(n, 0);
    let mut injections = 1;

    let mut best: Vec<EigenPair> = Vec::new();
    for _restart in 0..max_restarts {
        while basis.len() < m {
            let mut w = next;
            let before = vector::norm(&w);
            orthogonalize(&mut w, &basis);
            let after = vector::norm(&w);
            if !(after > 1e-10 * before) || after == 0.0 {
                // invariant subspace reached; continue with a fresh direction
                if basis.len() == n {
                    break;
                }
                next = start_vector(n, injections);
                injections += 1;
                continue;
            }
            vector::scale(1.0 / after, &mut w);
            let image = factor.solve(&w);
            next = image.clone();
            basis.push(w);
            images.push(image);
        }

        let k = basis.len();
        let h = Matrix::from_fn(k, k, |i, j| {
            0.5 * (vector::dot(&basis[i], &images[j]) + vector::dot(&basis[j], &images[i]))
        });
        let mut ritz = dense_sym_eig(&h)?;
        // largest |μ| first ⇔ eigenvalue of A closest to the shift
        ritz.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()));

        let mut pairs = Vec::with_capacity(count);
        let mut worst = (0usize, -1.0f64);
        for (slot, r) in ritz.iter().take(count).enumerate() {
            let mut x = combine(&basis, &r.vector, n);
            vector::normalize(&mut x);
            fix_sign(&mut x);
            let lambda = if r.value != 0.0 { shift + 1.0 / r.value } else { f64::INFINITY };
            // Rayleigh quotient on A is at least as accurate as σ + 1/μ
            let ax = op.matvec(&x);
            let rq = vector::dot(&x, &ax);
            let value = if lambda.is_finite() { rq } else { lambda };
            let residual = math::sqrt(
                ax.iter()
                    .zip(&x)
                    .map(|(a, xi)| (a - value * xi) * (a - value * xi))
                    .sum(),
            );
            if residual > worst.1 {
                worst = (slot, residual);
            }
            pairs.push(EigenPair {
                value,
                vector: x,
                residual,
            });
        }
        let done = pairs.iter().all(|p| p.residual <= threshold);
        pairs.sort_by(|a, b| (a.value - shift).abs().total_cmp(&(b.value - shift).abs()));
        best = pairs;
        if done {
            return Ok(best);
        }
        if k == n {
            // the basis spans everything; accuracy is as good as it gets
            break;
        }

        // thick restart: keep the leading Ritz vectors and their images
        let kept = keep.min(k);
        let mut new_basis = Vec::with_capacity(m);
        let mut new_images = Vec::with_capacity(m);
        for r in ritz.iter().take(kept) {
            new_basis.push(combine(&basis, &r.vector, n));
            new_images.push(combine(&images, &r.vector, n));
        }
        next = new_images[worst.0].clone();
        basis = new_basis;
        images = new_images;
    }

    let converged = best.iter().filter(|p| p.residual <= threshold).count();
    if converged == count {
        Ok(best)
    } else {
        Err(Error::NotConverged {
            converged,
            requested: count,
            partial: best,
        })
    }
}

fn combine(vectors: &[Vec<f64>], coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (v, c) in vectors.iter().zip(coeffs) {
        vector::axpy(*c, v, &mut out);
    }
    out
}

/// Two passes of classical Gram–Schmidt.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = vector::dot(b, w);
            vector::axpy(-p, b, w);
        }
    }
}

/// Deterministic, generic starting direction.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    let phase = 0.7548776662 * (seed as f64 + 1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            1.0 + 0.5 * math::sin(1.6180339887 * t + phase) + 0.25 * math::cos(0.4142135623 * t + 3.0 * phase)
        })
        .collect();
    vector::normalize(&mut v);
    v
}
