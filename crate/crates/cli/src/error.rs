use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] clmm_lab::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("tick snapshot line {line}, column {column}: {message}")]
    Ticks {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Model(_) => "model",
            Self::Io { .. } => "io",
            Self::Config { .. } => "config",
            Self::Ticks { .. } => "ticks",
            Self::Csv(_) => "csv",
            Self::Usage(_) => "usage",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        let mut body = json!({ "error": self.kind(), "message": self.to_string() });
        if let Self::Ticks { line, column, .. } = self {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        body.to_string()
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub type CliResult<T> = Result<T, CliError>;
