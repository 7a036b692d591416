//! Information-theoretic diagnostics of a pure state across a declared
//! bipartition.
//!
//! A real state `ψ` of dimension `d_L·d_R` is reshaped (row-major) into the
//! coefficient matrix `C` with `‖C‖_F = 1`; the reduced states are
//! `ρ_L = C Cᵀ` and `ρ_R = Cᵀ C`, and the Schmidt weights are the squared
//! singular values of `C`. All entropies use the natural logarithm.

mod coherence;
mod diagnostics;
mod perturbation;

pub use coherence::{coherence_relative_entropy, purity_channels, PurityChannels};
pub use diagnostics::{
    analyze, diagnose, sign_rule_check, DiagnosticsRecord, SignCheck, StateAnalysis, DEFAULT_SCHMIDT_RANK, WEIGHT_FLOOR,
};
pub use perturbation::{
    entropy_sign_rule, linearized_entropy_contribution, perturbation_components, svd_perturbation_predict, PerturbationComponent, SignClass,
    CRITICAL_WEIGHT, DEGENERACY_TOLERANCE,
};

use alloc::vec::Vec;

use crate::linalg::{svd, sym_eigenvalues, Matrix, SvdResult};
use crate::math::{self, entropy_term};
use crate::{Error, Result};

/// Floor below which a negative reduced-state eigenvalue is an error
/// rather than roundoff.
pub const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartitionKind {
    /// `x ⊗ y` coordinates of a rectangular grid.
    GridXy,
    /// Sites `1..=L_A` versus the rest of a spin chain.
    ChainHalf,
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bipartition {
    pub kind: BipartitionKind,
    pub left_labels: Vec<i64>,
    pub right_labels: Vec<i64>,
}

impl Bipartition {
    /// Lattice rows `i0..i0+nx` against columns `j0..j0+ny`.
    pub fn grid_xy(nx: usize, ny: usize, i0: i64, j0: i64) -> Self {
        Bipartition {
            kind: BipartitionKind::GridXy,
            left_labels: (0..nx as i64).map(|i| i + i0).collect(),
            right_labels: (0..ny as i64).map(|j| j + j0).collect(),
        }
    }

    /// First `⌊L/2⌋` sites against the remaining `⌈L/2⌉`; labels are the
    /// integers encoded by each half's bits.
    pub fn chain_half(sites: usize) -> Self {
        let left_sites = sites / 2;
        Bipartition {
            kind: BipartitionKind::ChainHalf,
            left_labels: (0..1i64 << left_sites).collect(),
            right_labels: (0..1i64 << (sites - left_sites)).collect(),
        }
    }

    pub fn generic(left: usize, right: usize) -> Self {
        Bipartition {
            kind: BipartitionKind::Generic,
            left_labels: (0..left as i64).collect(),
            right_labels: (0..right as i64).collect(),
        }
    }

    pub fn left_dim(&self) -> usize {
        self.left_labels.len()
    }

    pub fn right_dim(&self) -> usize {
        self.right_labels.len()
    }

    pub fn total_dim(&self) -> usize {
        self.left_dim() * self.right_dim()
    }
}

/// Frobenius-normalized coefficient matrix, rows labelled by the left side.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix(Matrix);

impl CoefficientMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Normalizes an arbitrary nonzero matrix.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = m.frobenius_norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(CoefficientMatrix(m.scaled(1.0 / norm)))
    }

    /// `ρ_L = C Cᵀ`
    pub fn rho_left(&self, labels: &[i64]) -> ReducedDensity {
        ReducedDensity {
            matrix: self.0.gram_rows(),
            labels: labels.to_vec(),
        }
    }

    /// `ρ_R = Cᵀ C`
    pub fn rho_right(&self, labels: &[i64]) -> ReducedDensity {
        ReducedDensity {
            matrix: self.0.gram_cols(),
            labels: labels.to_vec(),
        }
    }
}

/// Reshapes `state` (length `left·right`, right index fastest) into `C`.
pub fn coefficient_matrix(state: &[f64], bipartition: &Bipartition) -> Result<CoefficientMatrix> {
    if state.len() != bipartition.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: bipartition.total_dim(),
            found: state.len(),
        });
    }
    CoefficientMatrix::from_matrix(Matrix::from_vec(
        bipartition.left_dim(),
        bipartition.right_dim(),
        state.to_vec(),
    )?)
}

/// Descending Schmidt weights `λ_k = σ_k²` with a reporting rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    /// All `min(d_L, d_R)` weights, descending, summing to 1.
    pub weights: Vec<f64>,
    pub rank: usize,
    /// `Σ_{k<rank} λ_k`
    pub captured_weight: f64,
}

impl SchmidtSpectrum {
    pub fn leading(&self) -> &[f64] {
        &self.weights[..self.rank.min(self.weights.len())]
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.weights)
    }
}

pub fn schmidt_spectrum(c: &CoefficientMatrix, rank: usize) -> Result<SchmidtSpectrum> {
    Ok(schmidt_from_svd(&svd(c.matrix())?, rank))
}

pub(crate) fn schmidt_from_svd(s: &SvdResult, rank: usize) -> SchmidtSpectrum {
    let mut weights: Vec<f64> = s.singular_values.iter().map(|x| x * x).collect();
    let total: f64 = weights.iter().sum();
    // ‖C‖_F = 1 already; this only removes roundoff in the last digits
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let rank = rank.min(weights.len());
    let captured_weight = weights[..rank].iter().sum();
    SchmidtSpectrum {
        weights,
        rank,
        captured_weight,
    }
}

/// `−Σ λ ln λ` over a probability vector (e.g. Schmidt weights or the
/// spectrum of a density matrix), `0 ln 0 = 0`.
pub fn von_neumann_entropy(weights: &[f64]) -> f64 {
    weights.iter().map(|&w| entropy_term(w)).sum::<f64>().max(0.0)
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    von_neumann_entropy(probabilities)
}

/// Shannon entropy of `p_i = |ψ_i|² / Σ|ψ_j|²`.
pub fn shannon_config_entropy(amplitudes: &[f64]) -> Result<f64> {
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(amplitudes.iter().map(|a| entropy_term(a * a / norm)).sum::<f64>().max(0.0))
}

/// Real symmetric, positive semidefinite, unit-trace matrix with basis
/// labels for the dephasing basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    matrix: Matrix,
    labels: Vec<i64>,
}

impl ReducedDensity {
    /// Validates symmetry (1e-12), unit trace (1e-12) and positivity
    /// (eigenvalues ≥ −1e-12).
    pub fn new(matrix: Matrix, labels: Vec<i64>) -> Result<Self> {
        if !matrix.is_square() || labels.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: labels.len(),
            });
        }
        let trace = matrix.trace();
        if (trace - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(alloc::format!("density matrix trace {trace} ≠ 1")));
        }
        let lowest = sym_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if lowest < NEGATIVE_EIGENVALUE_FLOOR {
            return Err(Error::InvalidArgument(alloc::format!(
                "density matrix is not positive semidefinite (eigenvalue {lowest:e})"
            )));
        }
        Ok(ReducedDensity { matrix, labels })
    }

    /// `|v⟩⟨v|` for a unit vector `v`.
    pub fn pure(v: &[f64]) -> Result<Self> {
        let norm = math::sqrt(v.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
        Ok(ReducedDensity {
            matrix: Matrix::outer(&u, &u),
            labels: (0..u.len() as i64).collect(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        ReducedDensity {
            matrix: Matrix::identity(dim).scaled(1.0 / dim as f64),
            labels: (0..dim as i64).collect(),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Populations in the label basis.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal()
    }

    /// Ascending spectrum with roundoff negatives in `[−1e-12, 0)` set to 0.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut ev = sym_eigenvalues(&self.matrix)?;
        for e in ev.iter_mut() {
            if *e < 0.0 && *e >= NEGATIVE_EIGENVALUE_FLOOR {
                *e = 0.0;
            }
        }
        Ok(ev)
    }

    /// `S(ρ) = −Tr ρ ln ρ`
    pub fn entropy(&self) -> Result<f64> {
        Ok(von_neumann_entropy(&self.eigenvalues()?))
    }

    /// Entropy of the dephased state, i.e. Shannon entropy of the diagonal.
    pub fn dephased_entropy(&self) -> f64 {
        shannon_entropy(&self.diagonal())
    }
}
