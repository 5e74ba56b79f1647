use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("missing header row")]
    MissingHeader,
    #[error("duplicate column name '{0}' in header")]
    DuplicateColumn(String),
    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),
    #[error("row {row}, column '{column}': cannot parse '{value}' as a finite number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dataset has a single class '{0}'; at least two are required")]
    SingleClass(String),
    #[error("unknown class label '{0}'")]
    UnknownClass(String),
    #[error("feature column '{0}' missing from input")]
    MissingFeatureColumn(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("class {class} has {count} samples, fewer than the {folds} folds requested")]
    ClassTooSmall {
        class: usize,
        count: usize,
        folds: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("{0} is undefined: zero denominator")]
    UndefinedMetric(&'static str),
    #[error("task is not binary: found {0} classes")]
    NotBinary(usize),
    #[error("archive format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("archive integrity check failed: {0}")]
    Integrity(String),
    #[error("malformed archive: {0}")]
    MalformedArchive(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
