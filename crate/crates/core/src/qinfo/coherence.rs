use super::ReducedDensity;
use crate::Result;

/// Roundoff tolerance below zero that is reported as exactly zero.
const COHERENCE_FLOOR: f64 = -1e-10;

/// Relative-entropy coherence `S(Δ[ρ]) − S(ρ)` in the stored label basis.
pub fn coherence_relative_entropy(rho: &ReducedDensity) -> Result<f64> {
    let c = rho.dephased_entropy() - rho.entropy()?;
    Ok(if (COHERENCE_FLOOR..0.0).contains(&c) { 0.0 } else { c })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityChannels {
    /// `Σ_ij ρ_ij²`, equal to `P_diag + P_off` by construction.
    pub purity: f64,
    /// `Tr ρ²` from the matrix product, kept as a cross-check.
    pub purity_trace: f64,
    pub diagonal: f64,
    pub off_diagonal: f64,
}

pub fn purity_channels(rho: &ReducedDensity) -> PurityChannels {
    let m = rho.matrix();
    let n = m.rows();
    let mut diagonal = 0.0;
    let mut off_diagonal = 0.0;
    let mut purity_trace = 0.0;
    for i in 0..n {
        diagonal += m[(i, i)] * m[(i, i)];
        for j in 0..n {
            if i != j {
                off_diagonal += m[(i, j)] * m[(i, j)];
            }
            purity_trace += m[(i, j)] * m[(j, i)];
        }
    }
    PurityChannels {
        purity: diagonal + off_diagonal,
        purity_trace,
        diagonal,
        off_diagonal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, LN_2};

    #[test]
    fn diagonal_state_is_incoherent() {
        let rho = ReducedDensity::new(Matrix::from_diagonal(&[0.2, 0.3, 0.5]), vec![0, 1, 2]).unwrap();
        assert_eq!(coherence_relative_entropy(&rho).unwrap(), 0.0);
    }

    #[test]
    fn plus_state() {
        let rho = ReducedDensity::pure(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((coherence_relative_entropy(&rho).unwrap() - LN_2).abs() < 1e-12);
        let p = purity_channels(&rho);
        assert!((p.purity - 1.0).abs() < 1e-15);
        assert!((p.diagonal - 0.5).abs() < 1e-15 && (p.off_diagonal - 0.5).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed() {
        let p = purity_channels(&ReducedDensity::maximally_mixed(16));
        assert!((p.purity - 1.0 / 16.0).abs() < 1e-15);
        assert!((p.diagonal - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(p.off_diagonal, 0.0);
        let q = purity_channels(&ReducedDensity::maximally_mixed(2));
        assert!((q.purity - 0.5).abs() < 1e-15);
    }
}
