use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside the support")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("degenerate sample: zero variance")]
    DegenerateSample,
    #[error("maximum likelihood fit failed: {0}")]
    FitFailed(&'static str),
    #[error("POT estimate unavailable: {0}")]
    PotUnavailable(&'static str),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("length mismatch between runs: {0} vs {1}")]
    LengthMismatch(usize, usize),
}
