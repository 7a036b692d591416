use alloc::vec;
use alloc::vec::Vec;

use super::BilliardGeometry;
use crate::{math, Error, Result};

/// Coarsest accepted resolution, in grid points per unit length.
pub const MIN_RESOLUTION: f64 = 20.0;

const EXTERIOR: u32 = u32::MAX;

/// Square lattice `x_i = (i + i0)·h`, `y_j = (j + j0)·h` with `h = 1/resolution`
/// and a mask of strictly interior points.
///
/// Full-rectangle data is stored with `j` (the y index) fastest, so a field
/// reshaped to `nx × ny` has rows labelled by x and columns by y. Interior
/// points are numbered in that same order.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid {
    nx: usize,
    ny: usize,
    resolution: f64,
    i0: i64,
    j0: i64,
    mask: Vec<bool>,
    interior: Vec<usize>,
    lookup: Vec<u32>,
}

/// Lattice box `[i_min, i_max] × [j_min, j_max]` in units of the spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeBox {
    pub i_min: i64,
    pub i_max: i64,
    pub j_min: i64,
    pub j_max: i64,
}

impl LatticeBox {
    /// Smallest box covering `geom` with at least one exterior row/column
    /// on each side.
    pub fn covering(geom: &BilliardGeometry, resolution: f64) -> Self {
        let (x0, x1, y0, y1) = geom.extent();
        let lo = |v: f64| math::floor(v * resolution) as i64 - 1;
        let hi = |v: f64| math::ceil(v * resolution) as i64 + 1;
        LatticeBox {
            i_min: lo(x0),
            i_max: hi(x1),
            j_min: lo(y0),
            j_max: hi(y1),
        }
    }

    pub fn union(&self, other: &LatticeBox) -> LatticeBox {
        LatticeBox {
            i_min: self.i_min.min(other.i_min),
            i_max: self.i_max.max(other.i_max),
            j_min: self.j_min.min(other.j_min),
            j_max: self.j_max.max(other.j_max),
        }
    }
}

fn check_resolution(resolution: f64) -> Result<()> {
    if !(resolution >= MIN_RESOLUTION) || !resolution.is_finite() {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            minimum: MIN_RESOLUTION,
        });
    }
    Ok(())
}

/// Grid with the tightest padded box around `geom`.
pub fn build_grid(geom: &BilliardGeometry, resolution: f64) -> Result<DomainGrid> {
    check_resolution(resolution)?;
    DomainGrid::in_box(geom, resolution, LatticeBox::covering(geom, resolution))
}

impl DomainGrid {
    /// Grid on a caller-chosen lattice box. Sweeps use one box for every
    /// parameter value so that fields can be compared point by point.
    pub fn in_box(geom: &BilliardGeometry, resolution: f64, bx: LatticeBox) -> Result<Self> {
        check_resolution(resolution)?;
        if bx.i_max < bx.i_min || bx.j_max < bx.j_min {
            return Err(Error::InvalidArgument("empty lattice box".into()));
        }
        let covering = LatticeBox::covering(geom, resolution);
        if covering.union(&bx) != bx {
            return Err(Error::InvalidArgument("lattice box does not cover the geometry".into()));
        }
        let nx = (bx.i_max - bx.i_min + 1) as usize;
        let ny = (bx.j_max - bx.j_min + 1) as usize;
        let mut mask = vec![false; nx * ny];
        let mut interior = Vec::new();
        let mut lookup = vec![EXTERIOR; nx * ny];
        for i in 0..nx {
            let x = (i as i64 + bx.i_min) as f64 / resolution;
            for j in 0..ny {
                let y = (j as i64 + bx.j_min) as f64 / resolution;
                if geom.contains(x, y) {
                    let idx = i * ny + j;
                    mask[idx] = true;
                    lookup[idx] = interior.len() as u32;
                    interior.push(idx);
                }
            }
        }
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        Ok(DomainGrid {
            nx,
            ny,
            resolution,
            i0: bx.i_min,
            j0: bx.j_min,
            mask,
            interior,
            lookup,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Grid spacing; `dx = dy`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn lattice_box(&self) -> LatticeBox {
        LatticeBox {
            i_min: self.i0,
            i_max: self.i0 + self.nx as i64 - 1,
            j_min: self.j0,
            j_max: self.j0 + self.ny as i64 - 1,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as i64 + self.i0) as f64 / self.resolution
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as i64 + self.j0) as f64 / self.resolution
    }

    /// Interior mask over the full rectangle, index `i * ny + j`.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.ny + j]
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    /// Full-rectangle index of every interior point, in interior order.
    pub fn interior_points(&self) -> &[usize] {
        &self.interior
    }

    /// Interior index of grid point `(i, j)`, if it is interior.
    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        match self.lookup[i * self.ny + j] {
            EXTERIOR => None,
            k => Some(k as usize),
        }
    }

    /// Embeds interior values into the full `nx × ny` rectangle (zeros
    /// outside), row-major with y fastest.
    pub fn embed(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.ny];
        for (v, &idx) in values.iter().zip(&self.interior) {
            out[idx] = *v;
        }
        out
    }

    /// Mirror image of lattice index `j` under `y → −y`, if it is in range.
    pub fn mirror_j(&self, j: usize) -> Option<usize> {
        let mirrored = -(j as i64 + self.j0) - self.j0;
        (0..self.ny as i64).contains(&mirrored).then_some(mirrored as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_mask_is_inner_rectangle() {
        let g = build_grid(&BilliardGeometry::unit_square(), 40.0).unwrap();
        // lattice -1..=41 in both directions; interior 1..=39
        assert_eq!(g.nx(), 43);
        assert_eq!(g.interior_count(), 39 * 39);
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let inner = (2..=40).contains(&i) && (2..=40).contains(&j);
                assert_eq!(g.is_interior(i, j), inner, "({i},{j})");
            }
        }
    }

    #[test]
    fn border_is_exterior() {
        let g = build_grid(&BilliardGeometry::quadrupole(0.2).unwrap(), 25.0).unwrap();
        for i in 0..g.nx() {
            assert!(!g.is_interior(i, 0) && !g.is_interior(i, g.ny() - 1));
        }
        for j in 0..g.ny() {
            assert!(!g.is_interior(0, j) && !g.is_interior(g.nx() - 1, j));
        }
    }

    #[test]
    fn coarse_resolution_rejected() {
        assert!(matches!(
            build_grid(&BilliardGeometry::unit_square(), 19.0),
            Err(Error::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn oval_mask_mirror_symmetric() {
        let g = build_grid(&BilliardGeometry::oval(0.1).unwrap(), 60.0).unwrap();
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let m = g.mirror_j(j).unwrap();
                assert_eq!(g.is_interior(i, j), g.is_interior(i, m));
            }
        }
    }

    #[test]
    fn interior_lookup_consistent() {
        let g = build_grid(&BilliardGeometry::quadrupole(0.05).unwrap(), 30.0).unwrap();
        for (k, &idx) in g.interior_points().iter().enumerate() {
            assert_eq!(g.interior_index(idx / g.ny(), idx % g.ny()), Some(k));
        }
    }
}
