use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::EigenPair;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone)]
pub enum Error {
    /// A matrix expected to be symmetric is not, at the reported entry.
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },
    NonFinite,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    InvalidArgument(String),
    /// LDLᵀ of `A - shift·I` hit a (near-)zero pivot; `shift` is probably an
    /// eigenvalue.
    FactorizationBreakdown {
        shift: f64,
        pivot_index: usize,
    },
    /// The iteration cap was reached; `partial` holds every pair found, with
    /// residuals as computed.
    NotConverged {
        converged: usize,
        requested: usize,
        partial: Vec<EigenPair>,
    },
    InvalidGeometry(String),
    ResolutionTooCoarse {
        resolution: f64,
        minimum: f64,
    },
    EmptyInterior,
    ChainTooLong {
        sites: usize,
        max: usize,
    },
    /// `[H, R] ≠ 0` for the bit-reversal operator `R`.
    SymmetryViolation {
        commutator_norm: f64,
    },
    ParameterGrid(String),
    ZeroState,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSymmetric { row, col, deviation } => write!(
                f,
                "matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}"
            ),
            Error::NonFinite => f.write_str("input contains non-finite entries"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::FactorizationBreakdown { shift, pivot_index } => write!(
                f,
                "factorization of (A - {shift}·I) broke down at pivot {pivot_index}; \
                 the shift is (numerically) an eigenvalue, retry with a slightly perturbed shift"
            ),
            Error::NotConverged {
                converged,
                requested,
                ..
            } => write!(
                f,
                "eigensolver hit its iteration cap with {converged} of {requested} pairs converged"
            ),
            Error::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::ResolutionTooCoarse { resolution, minimum } => write!(
                f,
                "grid resolution {resolution} points per unit length is too coarse; use at least {minimum}"
            ),
            Error::EmptyInterior => f.write_str("grid has no interior points"),
            Error::ChainTooLong { sites, max } => {
                write!(f, "chain length {sites} exceeds the dense budget of {max} sites")
            }
            Error::SymmetryViolation { commutator_norm } => write!(
                f,
                "Hamiltonian does not commute with bit reversal (‖[H,R]‖ = {commutator_norm:e})"
            ),
            Error::ParameterGrid(msg) => write!(f, "invalid parameter grid: {msg}"),
            Error::ZeroState => f.write_str("state has zero norm"),
        }
    }
}

impl core::error::Error for Error {}
