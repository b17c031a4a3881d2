use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("no jump channels supplied")]
    EmptyJumpSet,

    #[error("initial state is not normalised (trace = {trace})")]
    NotNormalized { trace: f64 },

    #[error("drift block with delta = {delta} is singular (min |Re eigenvalue| = {min_real:e})")]
    SingularBlock { delta: i32, min_real: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
