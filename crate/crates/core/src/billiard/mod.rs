//! Closed hard-wall billiards: the Dirichlet problem `(∇² + n²k²)ψ = 0`,
//! `ψ = 0` on the boundary, discretized with a 5-point stencil on a square
//! lattice with a staircase boundary.
//!
//! The operator assembled here is `−∇²`; its eigenvalues approximate
//! `λ = (nk)²` and the vacuum wavenumber is reported as `k = √λ / n`.

mod geometry;
mod grid;

pub use geometry::{
    BilliardGeometry, Shape, DEFAULT_OVAL_A, DEFAULT_OVAL_B, DEFAULT_REFRACTIVE_INDEX, MAX_DEFORMATION,
};
pub use grid::{build_grid, DomainGrid, LatticeBox, MIN_RESOLUTION};

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::linalg::{shift_invert_eig, vector, EigenPair, ShiftInvertOptions, SparseSymOperator};
use crate::{math, Error, Result};

/// A normalized eigenmode on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    pub grid: Arc<DomainGrid>,
    /// Values on interior points, normalized so `Σ ψ² dx dy = 1`.
    pub values: Vec<f64>,
    /// Internal eigenvalue `λ = (nk)²`.
    pub eigenvalue: f64,
    /// Vacuum wavenumber `k = √λ / n`.
    pub wavenumber: f64,
    /// Residual of the unit-norm eigenvector.
    pub residual: f64,
}

impl ModeField {
    fn from_pair(grid: Arc<DomainGrid>, pair: EigenPair, refractive_index: f64) -> Self {
        let h = grid.spacing();
        // unit 2-norm vector → Σ ψ² h² = 1
        let values = pair.vector.iter().map(|v| v / h).collect();
        ModeField {
            grid,
            values,
            eigenvalue: pair.value,
            wavenumber: math::sqrt(pair.value.max(0.0)) / refractive_index,
            residual: pair.residual,
        }
    }

    /// `Σ_ij ψ_ij² dx dy`
    pub fn norm_squared(&self) -> f64 {
        let h = self.grid.spacing();
        vector::dot(&self.values, &self.values) * h * h
    }

    /// Field over the full `nx × ny` rectangle, zero outside the domain.
    pub fn full_field(&self) -> Vec<f64> {
        self.grid.embed(&self.values)
    }

    /// Field value at lattice point `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.grid.interior_index(i, j).map_or(0.0, |k| self.values[k])
    }
}

/// `−∇²` with zero Dirichlet data at every masked-out neighbour.
pub fn assemble_dirichlet_laplacian(grid: &DomainGrid) -> Result<SparseSymOperator> {
    if grid.interior_count() == 0 {
        return Err(Error::EmptyInterior);
    }
    let h2 = grid.spacing() * grid.spacing();
    let diag = 4.0 / h2;
    let off = -1.0 / h2;
    let ny = grid.ny();
    let mut entries = Vec::with_capacity(3 * grid.interior_count());
    for (k, &idx) in grid.interior_points().iter().enumerate() {
        let (i, j) = (idx / ny, idx % ny);
        entries.push((k, k, diag));
        // upper triangle: forward neighbours only
        if let Some(m) = grid.interior_index(i, j + 1) {
            entries.push((k, m, off));
        }
        if let Some(m) = grid.interior_index(i + 1, j) {
            entries.push((k, m, off));
        }
    }
    SparseSymOperator::from_triplets(grid.interior_count(), entries)
}

/// The `count` modes whose eigenvalue is nearest `(n·target_k)²`, sorted by
/// eigenvalue.
pub fn solve_modes(
    geom: &BilliardGeometry,
    resolution: f64,
    target_k: f64,
    count: usize,
) -> Result<Vec<ModeField>> {
    let grid = Arc::new(build_grid(geom, resolution)?);
    solve_modes_on_grid(grid, geom.refractive_index(), target_k, count, ShiftInvertOptions::default())
}

pub fn solve_modes_on_grid(
    grid: Arc<DomainGrid>,
    refractive_index: f64,
    target_k: f64,
    count: usize,
    options: ShiftInvertOptions,
) -> Result<Vec<ModeField>> {
    if !(target_k > 0.0) || !target_k.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("target wavenumber must be positive, got {target_k}")));
    }
    let op = assemble_dirichlet_laplacian(&grid)?;
    let nk = refractive_index * target_k;
    let mut pairs = shift_invert_eig(&op, nk * nk, count, options)?;
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs
        .into_iter()
        .map(|p| ModeField::from_pair(grid.clone(), p, refractive_index))
        .collect())
}
