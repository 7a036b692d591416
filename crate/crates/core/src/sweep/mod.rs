//! Adiabatic branch tracking over a control parameter and avoided-crossing
//! detection.
//!
//! Branch identity follows state character: consecutive eigensets are
//! matched by an optimal assignment on `1 − |⟨ψ(t)|φ(t+1)⟩|`, never by energy
//! order alone.

mod assignment;
mod crossing;

pub use assignment::min_cost_assignment;
pub use crossing::{detect_avoided_crossings, refine_crossing, AvoidedCrossing, RefineStatus};

use alloc::vec::Vec;
use core::ops::Range;

use crate::linalg::{vector, Matrix};
use crate::{Error, Result};

pub const DEFAULT_OVERLAP_FLOOR: f64 = 0.5;
pub const DEFAULT_GAP_FACTOR: f64 = 2.0;

/// Eigenpairs at one parameter value, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSet {
    pub parameter: f64,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One tracked point: which eigenpair of the eigenset at `step` the branch
/// occupies and with which sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub step: usize,
    pub parameter: f64,
    pub value: f64,
    /// Position of the state in the ascending spectrum at this step.
    pub source_index: usize,
    /// `±1`; the stored eigenvector times this sign continues the branch.
    pub sign: f64,
    /// `|⟨ψ(t−1)|ψ(t)⟩|`; 1 at the first step.
    pub overlap: f64,
    /// Overlap fell below the floor when this point was joined.
    pub tracking_break: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenBranch {
    pub id: usize,
    pub points: Vec<BranchPoint>,
}

impl EigenBranch {
    pub fn parameters(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.parameter).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn has_break(&self) -> bool {
        self.points.iter().any(|p| p.tracking_break)
    }

    /// The sign-aligned state vector of this branch at `step`.
    pub fn state(&self, sets: &[EigenSet], step: usize) -> Vec<f64> {
        let p = &self.points[step];
        let mut v = sets[step].vectors[p.source_index].clone();
        if p.sign < 0.0 {
            vector::scale(-1.0, &mut v);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackOptions {
    /// Indices into each ascending spectrum that are tracked.
    pub window: Range<usize>,
    pub overlap_floor: f64,
}

impl TrackOptions {
    pub fn window(window: Range<usize>) -> Self {
        TrackOptions {
            window,
            overlap_floor: DEFAULT_OVERLAP_FLOOR,
        }
    }
}

/// Links the eigenstates in `opts.window` across consecutive sets.
///
/// Branch `b` starts at spectrum index `window.start + b` of the first set.
pub fn track_branches(sets: &[EigenSet], opts: &TrackOptions) -> Result<Vec<EigenBranch>> {
    if sets.len() < 2 {
        return Err(Error::ParameterGrid("branch tracking needs at least two parameter points".into()));
    }
    let params: Vec<f64> = sets.iter().map(|s| s.parameter).collect();
    crate::spinchain::check_increasing(&params)?;
    let window = opts.window.clone();
    if window.is_empty() {
        return Err(Error::InvalidArgument("empty tracking window".into()));
    }
    let dim = sets[0].vectors.first().map_or(0, Vec::len);
    for s in sets {
        if s.len() < window.end || s.vectors.len() != s.values.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "eigenset at {} has {} states, window needs {}",
                s.parameter,
                s.len(),
                window.end
            )));
        }
        if let Some(v) = s.vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }

    let width = window.len();
    let mut branches: Vec<EigenBranch> = (0..width)
        .map(|b| EigenBranch {
            id: b,
            points: alloc::vec![BranchPoint {
                step: 0,
                parameter: sets[0].parameter,
                value: sets[0].values[window.start + b],
                source_index: window.start + b,
                sign: 1.0,
                overlap: 1.0,
                tracking_break: false,
            }],
        })
        .collect();

    for step in 1..sets.len() {
        let (prev, next) = (&sets[step - 1], &sets[step]);
        // signed overlaps between each branch's current state and the
        // candidates of the next set
        let signed = Matrix::from_fn(width, width, |b, c| {
            let p = branches[b].points[step - 1];
            p.sign * vector::dot(&prev.vectors[p.source_index], &next.vectors[window.start + c])
        });
        let cost = Matrix::from_fn(width, width, |b, c| 1.0 - signed[(b, c)].abs());
        let assignment = min_cost_assignment(&cost)?;
        for (b, &c) in assignment.iter().enumerate() {
            let s = signed[(b, c)];
            let overlap = s.abs();
            branches[b].points.push(BranchPoint {
                step,
                parameter: next.parameter,
                value: next.values[window.start + c],
                source_index: window.start + c,
                sign: if s < 0.0 { -1.0 } else { 1.0 },
                overlap,
                tracking_break: overlap < opts.overlap_floor,
            });
        }
    }
    Ok(branches)
}
