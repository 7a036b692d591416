use std::io;
use std::path::PathBuf;

use crate::config::ConfigErrors;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("solver failed at parameter {parameter}: {source}")]
    Solver {
        parameter: f64,
        #[source]
        source: crossinfo_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn solver(parameter: f64, source: crossinfo_core::Error) -> Self {
        AppError::Solver { parameter, source }
    }

    /// 2 for configuration errors, 3 for solver failures, 4 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Solver { .. } => 3,
            AppError::Io { .. } => 4,
        }
    }
}
