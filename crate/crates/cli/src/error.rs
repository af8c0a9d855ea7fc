use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Core(#[from] onc_core::Error),
    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => EXIT_VALIDATION,
            _ => EXIT_CONFIG,
        }
    }
}
