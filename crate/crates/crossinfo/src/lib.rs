//! Parameter sweeps through avoided crossings with information-theoretic
//! diagnostics: configuration, output formats, the sweep pipeline and the
//! `report` re-derivation. The numerics live in `crossinfo-core`.

// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use config::{validate_config, RunConfig};
pub use error::AppError;
pub use pipeline::{run_pipeline, Manifest, RunResult};
pub use report::report;

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "CROSSINFO_OUTPUT_DIR";
