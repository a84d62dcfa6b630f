use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index window cannot be truncated safely: {0}")]
    Truncation(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("distribution grids differ: {0}")]
    GridMismatch(String),

    #[error("edges are not aligned with the source grid: {0}")]
    Misaligned(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("need at least {needed} replications, got {got}")]
    InsufficientReplications { needed: usize, got: usize },

    #[error("stream does not cover the requested slots: {0}")]
    Coverage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Truncation(_) => "truncation",
            Error::NoData(_) => "no_data",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::Misaligned(_) => "misaligned_edges",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InsufficientReplications { .. } => "insufficient_replications",
            Error::Coverage(_) => "coverage",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
