use thiserror::Error;

use crate::frame::Period;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series windows do not overlap")]
    EmptyOverlap,
    #[error("series `{name}` has a gap at {period}")]
    InternalGap { name: String, period: Period },
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("invalid series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },
    #[error("sample too short: need more than {needed} observations, have {available}")]
    TooShort { needed: usize, available: usize },
    #[error("regressor matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("residual covariance is singular")]
    SingularCovariance,
    #[error("moment matrix {0} is numerically singular")]
    SingularMoment(&'static str),
    #[error("critical values available for k - r in 1..=12 only, got {0}")]
    OutOfTableRange(usize),
    #[error("cointegration rank {rank} is invalid for {k} variables")]
    RankInvalid { rank: usize, k: usize },
    #[error("top block of the cointegrating vectors is singular")]
    SingularTopBlock,
    #[error("variable names do not match: model has {expected:?}, frame has {found:?}")]
    NameMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("residual covariance is not positive definite")]
    CovarianceNotPd,
    #[error("{failed} of {total} bootstrap replications failed to refit")]
    BootstrapRefitFailure { failed: usize, total: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unstable data-generating process: {0}")]
    UnstableSpec(String),
    #[error("file not found: {0}")]
    MissingFile(String),
    #[error("{path}: parse error at line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("snapshot manifest: {0}")]
    Manifest(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("FRED authentication failed: {0}")]
    Auth(String),
    #[error("unknown FRED series `{0}`")]
    UnknownSeries(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
