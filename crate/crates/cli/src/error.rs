use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Csv(String),

    #[error("diverged: {}", .0.join("; "))]
    Diverged(Vec<String>),

    #[error(transparent)]
    Core(#[from] sparse_afe::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 2 user/config error, 3 I/O error, 4 divergence only.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Csv(_) | Self::Core(_) => 2,
            Self::Io { .. } => 3,
            Self::Diverged(_) => 4,
        }
    }
}
