use std::path::PathBuf;

use ris_core::RisError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    #[error(transparent)]
    Core(#[from] RisError),

    #[error("oracle check failed: {0}")]
    OracleMismatch(String),

    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    pub fn validation(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "missing-file",
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Core(RisError::OutOfBand { .. }) => "out-of-band",
            CliError::Core(RisError::TooLarge { .. }) => "too-large",
            CliError::Core(RisError::InvalidArgument(_)) => "invalid-argument",
            CliError::Core(RisError::StateTable(_)) => "state-table",
            CliError::OracleMismatch(_) => "oracle-mismatch",
            CliError::Write { .. } => "write",
        }
    }

    /// Process exit status. 2 is left to argument parsing.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "missing-file" => 3,
            "parse" => 4,
            "validation" => 5,
            "out-of-band" => 6,
            "too-large" => 7,
            "invalid-argument" => 8,
            "state-table" => 9,
            "oracle-mismatch" => 10,
            _ => 11,
        }
    }

    /// Single-line, machine-parseable form for the diagnostic stream.
    pub fn diagnostic(&self) -> String {
        let detail = self
            .to_string()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .replace('\\', "\\\\")
            .replace('"', "\\\"");
        format!(
            "error kind={} code={} detail=\"{}\"",
            self.kind(),
            self.exit_code(),
            detail
        )
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
