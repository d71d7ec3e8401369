use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// Failure categories, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Usage,
    Data,
    Engine,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Engine => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Engine(#[from] ordfuzz::Error),
}

impl CliError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Usage(_) => ErrorKind::Usage,
            CliError::Data(_) | CliError::Io { .. } => ErrorKind::Data,
            CliError::Engine(_) => ErrorKind::Engine,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// One-line JSON rendering for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: ErrorKind,
            exit_code: i32,
            message: &'a str,
        }
        let message = self.to_string();
        let kind = self.kind();
        serde_json::to_string(&Report { error: kind, exit_code: kind.exit_code(), message: &message })
            .unwrap_or(message)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
