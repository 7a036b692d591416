//! Thin SVD by one-sided (Hestenes) Jacobi rotations.

use alloc::vec;
use alloc::vec::Vec;

use super::{vector, Matrix};
use crate::{math, Error, Result};

/// `C = Σ_k σ_k u_k v_kᵀ` with `σ` descending. Holds `min(m, n)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    /// Left singular vectors, each of length `m`.
    pub left: Vec<Vec<f64>>,
    /// Right singular vectors, each of length `n`.
    pub right: Vec<Vec<f64>>,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        let m = self.left.first().map_or(0, Vec::len);
        let n = self.right.first().map_or(0, Vec::len);
        let mut out = Matrix::zeros(m, n);
        for ((s, u), v) in self.singular_values.iter().zip(&self.left).zip(&self.right) {
            for i in 0..m {
                let a = s * u[i];
                if a != 0.0 {
                    vector::axpy(a, v, out.row_mut(i));
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 80;

pub fn svd(c: &Matrix) -> Result<SvdResult> {
    if !c.is_finite() {
        return Err(Error::NonFinite);
    }
    if c.rows() >= c.cols() {
        Ok(jacobi_tall(c))
    } else {
        let t = jacobi_tall(&c.transpose());
        Ok(SvdResult {
            singular_values: t.singular_values,
            left: t.right,
            right: t.left,
        })
    }
}

/// Requires `rows >= cols`.
fn jacobi_tall(c: &Matrix) -> SvdResult {
    let m = c.rows();
    let n = c.cols();
    // Columns of C stored as rows of `a` (contiguous); `v` accumulates the
    // right rotations, also one right vector per row.
    let mut a = c.transpose().into_vec();
    let mut v = Matrix::identity(n).into_vec();
    let mut norms: Vec<f64> = (0..n).map(|j| vector::dot(col(&a, m, j), col(&a, m, j))).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = vector::dot(col(&a, m, p), col(&a, m, q));
                if gamma.abs() <= f64::EPSILON * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / math::sqrt(1.0 + t * t);
                let sn = cs * t;
                rotate(&mut a, m, p, q, cs, sn);
                rotate(&mut v, n, p, q, cs, sn);
                norms[p] = vector::dot(col(&a, m, p), col(&a, m, p));
                norms[q] = vector::dot(col(&a, m, q), col(&a, m, q));
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sigma: Vec<f64> = norms.iter().map(|x| math::sqrt(*x)).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let scale = sigma.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let tiny = scale * f64::EPSILON * (m.max(n) as f64);
    let mut singular_values = Vec::with_capacity(n);
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let s = sigma[j];
        let mut u = col(&a, m, j).to_vec();
        let mut w = v[j * n..(j + 1) * n].to_vec();
        if s > tiny {
            vector::scale(1.0 / s, &mut u);
            singular_values.push(s);
        } else {
            singular_values.push(if s.is_finite() { s } else { 0.0 });
            deficient.push(slot);
        }
        // sign convention: largest |entry| of u positive, v follows.
        if !deficient.last().is_some_and(|&d| d == slot) && super::fix_sign(&mut u) {
            vector::scale(-1.0, &mut w);
        }
        left.push(u);
        right.push(w);
    }
    // Null directions: complete the left basis so every vector is unit norm.
    for slot in deficient {
        left[slot] = complete_basis(&left, slot, m);
    }
    SvdResult {
        singular_values,
        left,
        right,
    }
}

#[inline]
fn col(a: &[f64], m: usize, j: usize) -> &[f64] {
    &a[j * m..(j + 1) * m]
}

fn rotate(a: &mut [f64], len: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = a.split_at_mut(q * len);
    let xp = &mut lo[p * len..(p + 1) * len];
    let xq = &mut hi[..len];
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let t = *x;
        *x = c * t - s * *y;
        *y = s * t + c * *y;
    }
}

/// Unit vector orthogonal to every unit vector in `existing` except `slot`.
fn complete_basis(existing: &[Vec<f64>], slot: usize, m: usize) -> Vec<f64> {
    let mut best = vec![0.0; m];
    let mut best_norm = -1.0;
    for axis in 0..m {
        let mut w = vec![0.0; m];
        w[axis] = 1.0;
        for _ in 0..2 {
            for (k, u) in existing.iter().enumerate() {
                if k == slot {
                    continue;
                }
                let nu = vector::dot(u, u);
                if nu > 0.5 {
                    let proj = vector::dot(u, &w);
                    vector::axpy(-proj, u, &mut w);
                }
            }
        }
        let nw = vector::norm(&w);
        if nw > best_norm {
            best_norm = nw;
            best = w;
        }
        if nw > 0.5 {
            break;
        }
    }
    vector::normalize(&mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let r = svd(&Matrix::from_diagonal(&[1.0, 3.0])).unwrap();
        assert!((r.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((r.singular_values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_has_unit_null_vectors() {
        let u = [0.6, 0.8, 0.0];
        let v = [0.0, 1.0];
        let r = svd(&Matrix::outer(&u, &v)).unwrap();
        assert!((r.singular_values[0] - 1.0).abs() < 1e-14);
        assert!(r.singular_values[1].abs() < 1e-14);
        for u in &r.left {
            assert!((vector::norm(u) - 1.0).abs() < 1e-12);
        }
        assert!(vector::dot(&r.left[0], &r.left[1]).abs() < 1e-12);
    }

    #[test]
    fn wide_matrix_reconstructs() {
        let c = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.5]]).unwrap();
        let r = svd(&c).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.left[0].len(), 2);
        assert_eq!(r.right[0].len(), 3);
        let err = r.reconstruct().sub(&c).unwrap().frobenius_norm();
        assert!(err < 1e-12 * c.frobenius_norm());
    }

    #[test]
    fn zero_matrix() {
        let r = svd(&Matrix::zeros(3, 2)).unwrap();
        assert_eq!(r.singular_values, alloc::vec![0.0, 0.0]);
        assert!((vector::norm(&r.left[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nan() {
        let c = Matrix::from_rows(&[[f64::NAN]]).unwrap();
        assert!(matches!(svd(&c), Err(Error::NonFinite)));
    }
}
