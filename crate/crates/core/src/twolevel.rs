//! Exactly solvable two-level crossing `H(ε) = [[ε, g], [g, −ε]]`.
//!
//! The adiabatic levels are `±√(ε² + g²)` and the gap `2√(ε² + g²)` has its
//! minimum `2g` at `ε = 0`.

use alloc::vec::Vec;

use crate::linalg::{dense_sym_eig, Matrix};
use crate::sweep::EigenSet;
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelModel {
    pub coupling: f64,
}

impl TwoLevelModel {
    pub fn new(coupling: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(TwoLevelModel { coupling })
    }

    pub fn hamiltonian(&self, detuning: f64) -> Matrix {
        let g = self.coupling;
        Matrix::from_rows(&[[detuning, g], [g, -detuning]]).expect("2×2")
    }

    /// Analytic `(−√(ε²+g²), +√(ε²+g²))`.
    pub fn exact_levels(&self, detuning: f64) -> (f64, f64) {
        let e = math::hypot(detuning, self.coupling);
        (-e, e)
    }

    pub fn exact_gap(&self, detuning: f64) -> f64 {
        2.0 * math::hypot(detuning, self.coupling)
    }

    pub fn eigenset(&self, detuning: f64) -> Result<EigenSet> {
        let pairs = dense_sym_eig(&self.hamiltonian(detuning))?;
        let (values, vectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().map(|p| (p.value, p.vector)).unzip();
        Ok(EigenSet {
            parameter: detuning,
            values,
            vectors,
        })
    }
}
