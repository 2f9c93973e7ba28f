use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exciton vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("singular constraint system: {0}")]
    Singular(String),

    #[error("degenerate tuning target: |C_{index}| = {value:e} is too small")]
    DegenerateTarget { index: usize, value: f64 },

    #[error("non-finite objective value at {at:?}")]
    Evaluation { at: Vec<f64> },

    #[error("quadrature accuracy check failed: diagonal deviates from 1 by {deviation:e}")]
    Accuracy { deviation: f64 },

    #[error("minimum at bracket edge ({lo}, {hi}): x = {x}")]
    Bracket { lo: f64, hi: f64, x: f64 },

    #[error("no convergence after {iterations} iterations (best value {value:e} at {best:?})")]
    Convergence {
        iterations: usize,
        best: Vec<f64>,
        value: f64,
    },
}

impl Error {
    /// True for errors caused by bad configuration or API misuse rather than
    /// by the numerics themselves.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Geometry(_)
                | Error::Size(_)
                | Error::Usage(_)
                | Error::DimensionMismatch { .. }
        )
    }
}
