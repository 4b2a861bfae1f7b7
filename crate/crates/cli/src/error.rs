use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spectral_corr::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}, column {column}: {message}")]
    MalformedCsv { path: PathBuf, line: u64, column: String, message: String },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("config file {path}, line {line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },

    #[error("parameter `{key}`: {message}")]
    Parameter { key: String, message: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn param(key: &str, message: impl Into<String>) -> Self {
        CliError::Parameter { key: key.to_string(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
