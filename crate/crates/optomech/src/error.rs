use std::io;
use std::path::PathBuf;

use optomech_core::optomech_linear::StabilityReport;
use optomech_core::CoreError;
use thiserror::Error;

/// Errors surfaced by the front end, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("operating point is unstable ({:?}: lhs {:e}, rhs {:e}, margin {:e})", .0.criterion, .0.lhs, .0.rhs, .0.margin())]
    Unstable(StabilityReport),

    #[error("numerical failure: {0}")]
    Numerical(#[from] CoreError),

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 1 for configuration and IO problems, 2 for an unstable operating
    /// point, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 1,
            Self::Unstable(_) => 2,
            Self::Numerical(_) | Self::ChecksFailed(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
