use std::path::PathBuf;

/// Errors raised by the clustering engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("dimension mismatch in {path}: {reason}")]
    DimensionMismatch { path: PathBuf, reason: String },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("parse error in {path} at line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("object {object:?} references row {row} of feature file {file:?}, which has {rows} rows")]
    DanglingReference {
        object: String,
        file: String,
        row: usize,
        rows: usize,
    },

    #[error("duplicate object id {0:?}")]
    DuplicateObject(String),

    #[error("class labels must be present on every object or on none")]
    MixedClassLabels,

    #[error("object {object:?} has no view under condition {condition:?}")]
    MissingCondition { object: String, condition: String },

    #[error("condition {0:?} is not declared by the dataset")]
    UnknownCondition(String),

    #[error("object {0:?} has no views")]
    EmptyViews(String),

    #[error("dataset carries no ground-truth class labels")]
    MissingGroundTruth,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("requested {k} clusters from {n} elements")]
    TooManyClusters { k: usize, n: usize },

    #[error("invalid distance matrix: {0}")]
    InvalidDistance(String),

    #[error("ward linkage requires raw euclidean features, not a precomputed distance matrix")]
    WardOnDistance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
