//! Numerical core for parameter sweeps of model quantum systems through
//! avoided crossings.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides
//!
//! * [`linalg`]: dense symmetric eigendecomposition, SVD, sparse symmetric
//!   operators and a shift-invert eigensolver for interior eigenvalues,
//! * [`billiard`]: finite-difference Dirichlet problems for deformed
//!   hard-wall billiards (quadrupole and oval),
//! * [`spinchain`]: the tilted-field Ising chain and its bit-reversal sectors,
//! * [`twolevel`]: an exactly solvable two-level crossing used as an oracle,
//! * [`sweep`]: overlap-based branch tracking and avoided-crossing detection,
//! * [`qinfo`]: Schmidt spectra, entropies, coherence and purity channels,
//!   and the first-order SVD perturbation sign rule.
#![no_std]
// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod math;

pub mod billiard;
pub mod linalg;
pub mod qinfo;
pub mod spinchain;
pub mod sweep;
pub mod twolevel;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
