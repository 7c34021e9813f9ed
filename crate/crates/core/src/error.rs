use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The coordinatewise subproblem `½vβ² − zβ + p(|β|)` is not convex, so the
    /// fixed-scale update is discontinuous.
    #[error(
        "nonconvex coordinatewise subproblem: gamma = {gamma} requires v_j > {min_v}, got v_j = {v}"
    )]
    NonconvexSubproblem { gamma: f64, v: f64, min_v: f64 },

    #[error("column `{column}` has zero variance")]
    ZeroVariance { column: String },

    #[error("binomial response contains a single class")]
    SingleClass,

    #[error("non-finite value in {what} at row {row}")]
    NonFinite { what: String, row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
