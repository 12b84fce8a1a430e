use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ingestion and embedding
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("cannot parse value at row {row}, column {col}")]
    ParseError { row: usize, col: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("dataset needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("invalid lag specification: {0}")]
    InvalidLags(String),
    #[error("lag depth {lag} is too large for a series of length {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("embedding produced no rows")]
    EmptyResult,
    #[error("feature index {index} out of range for {n_features} features")]
    FeatureOutOfRange { index: usize, n_features: usize },
    #[error("split leaves an empty segment (T = {len}, fraction = {fraction})")]
    DegenerateSplit { len: usize, fraction: f64 },
    #[error("inconsistent dataset: {0}")]
    InvalidDataset(String),

    // estimation
    #[error("row count mismatch: {0}")]
    RowCountMismatch(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("covariance block is singular")]
    SingularCovariance,
    #[error("discrete backend requires integer symbols, found {0}")]
    NonIntegerSymbols(f64),
    #[error("source and conditioning sets overlap on feature {0}")]
    OverlappingSets(usize),
    #[error("source set is empty")]
    EmptySource,
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid bound parameters: {0}")]
    InvalidParams(String),

    // synthetic models
    #[error("invalid SCM specification: {0}")]
    InvalidSpec(String),
    #[error("simulation diverged at step {step} (node {node})")]
    Unstable { step: usize, node: String },
    #[error("unknown builtin graph `{0}`")]
    UnknownGraph(String),

    // selection and evaluation
    #[error("forward bounds need the total transfer entropy of all features")]
    MissingTotalTe,
    #[error("TPR/FPR denominator is empty: {0}")]
    EmptyDenominator(String),
    #[error("least-squares design is singular")]
    SingularDesign,
    #[error("invalid benchmark configuration: {0}")]
    InvalidBenchmark(String),

    #[error("I/O error on {path}: {source}")]
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
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from invalid user input rather than a numeric
    /// or I/O failure. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::MissingColumn(_)
                | Error::ParseError { .. }
                | Error::NonFiniteValue { .. }
                | Error::TooFewRows(_)
                | Error::InvalidLags(_)
                | Error::LagTooLarge { .. }
                | Error::EmptyResult
                | Error::FeatureOutOfRange { .. }
                | Error::DegenerateSplit { .. }
                | Error::InvalidDataset(_)
                | Error::OverlappingSets(_)
                | Error::EmptySource
                | Error::InvalidConfig(_)
                | Error::InvalidParams(_)
                | Error::InvalidSpec(_)
                | Error::UnknownGraph(_)
                | Error::InvalidBenchmark(_)
                | Error::Json(_)
        )
    }
}
