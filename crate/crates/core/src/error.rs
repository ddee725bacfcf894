use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("photon count {n} exceeds truncation n_max = {n_max}")]
    IndexOutOfRange { n: usize, n_max: usize },

    #[error("truncation n_max = {n_max} too small, need at least {required}")]
    Truncation { required: usize, n_max: usize },

    #[error("degenerate level: mixing angle undefined for epsilon = lambda = 0")]
    DegenerateLevel,

    #[error("operator is not Hermitian (max defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("bipartition must keep a non-empty proper subset of factors")]
    InvalidBipartition,

    #[error("input is not a pure state (purity {purity})")]
    NotPure { purity: f64 },

    #[error("time series has no peak")]
    NoPeak,

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("trace drifted by {drift:e} during integration at t = {t}")]
    TraceDrift { drift: f64, t: f64 },
}
