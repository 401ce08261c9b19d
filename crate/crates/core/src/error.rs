use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("dataset has a single class; at least two are required")]
    SingleClass,

    #[error("label column `{0}` not found")]
    MissingColumn(String),

    #[error("feature column `{column}` is not numeric (value `{value}` on line {line})")]
    NonNumericColumn {
        column: String,
        value: String,
        line: usize,
    },

    #[error("class {class} has {count} instances, at least {needed} are required to stratify")]
    ClassTooSmall {
        class: usize,
        count: usize,
        needed: usize,
    },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("neighborhood size {k} exceeds the {available} available reference samples")]
    NeighborhoodTooLarge { k: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Empty(_) => "empty",
            Error::SingleClass => "single_class",
            Error::MissingColumn(_) => "missing_column",
            Error::NonNumericColumn { .. } => "non_numeric_column",
            Error::ClassTooSmall { .. } => "class_too_small",
            Error::InvalidSplit(_) => "invalid_split",
            Error::NeighborhoodTooLarge { .. } => "neighborhood_too_large",
            Error::Dimension { .. } => "dimension",
            Error::InvalidDataset(_) => "invalid_dataset",
            Error::Unknown { .. } => "unknown",
            Error::Config(_) => "config",
            Error::Serialization(_) => "serialization",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
