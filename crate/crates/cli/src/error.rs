use std::path::PathBuf;

/// Failure of a CLI invocation, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numeric(sfwm_core::Error),
}

impl CliError {
    /// 2 for configuration and I/O problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<sfwm_core::Error> for CliError {
    fn from(e: sfwm_core::Error) -> Self {
        match e {
            sfwm_core::Error::InvalidArgument(msg) => CliError::Config(msg),
            other => CliError::Numeric(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
