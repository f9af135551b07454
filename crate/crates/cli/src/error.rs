use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qnabla_core::Error),

    #[error("cannot access `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Stdout(std::io::Error),

    /// The input file was readable but its contents are not a valid sequence or matrix.
    #[error("invalid parameter `{name}`: {reason}")]
    Input { name: &'static str, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qnabla_core::Error::Tail { .. } | qnabla_core::Error::Limit { .. }) => 3,
            CliError::Core(_) | CliError::Input { .. } => 2,
            CliError::Io { .. } | CliError::Stdout(_) => 1,
        }
    }
}
