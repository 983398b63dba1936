use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{column}` in input header")]
    MissingColumn { column: String },

    #[error("data row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("malformed delimited input: {0}")]
    Csv(#[from] csv::Error),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("inconsistent data: {0}")]
    Consistency(String),

    #[error("feature width mismatch: expected {expected} columns, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("no ground truth for verb `{verb}`")]
    Coverage { verb: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    ConfigFile {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for this error: 2 schema, 3 data consistency,
    /// 4 configuration, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingColumn { .. } | Error::Row { .. } | Error::Csv(_) => 2,
            Error::EmptyCorpus
            | Error::Consistency(_)
            | Error::WidthMismatch { .. }
            | Error::Coverage { .. } => 3,
            Error::Config(_) | Error::ConfigFile { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
