use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid timestamp: {0}")]
    InvalidTimestamp(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("timestamps at index {index} are not exactly one hour apart")]
    NonHourlyStep { index: usize },

    #[error("timestamps at index {index} are not strictly increasing")]
    NotIncreasing { index: usize },

    #[error("series have no common timestamps")]
    EmptyIntersection,

    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),

    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no valid data rows")]
    NoData(PathBuf),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("split leaves an empty side ({train} train / {test} test rows)")]
    DegenerateSplit { train: usize, test: usize },

    #[error("design matrix is rank deficient at column `{column}`")]
    RankDeficient { column: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("not enough degrees of freedom: n={n}, p={p}")]
    DegenerateDof { n: usize, p: usize },

    #[error("lag {max_lag} too large for series of length {len}")]
    LagTooLarge { max_lag: usize, len: usize },

    #[error("weights must be strictly positive")]
    NonPositiveWeight,

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("model has no temperature-dependent column")]
    NotTemperatureDependent,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset needs at least 2 zones, got {0}")]
    TooFewZones(usize),

    #[error("unknown zone `{0}`")]
    UnknownZone(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// True for errors caused by user input or configuration rather than
    /// internal failures. Used for exit code selection.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            Error::RankDeficient { .. } | Error::NotTemperatureDependent | Error::DegenerateDof { .. }
        )
    }
}
