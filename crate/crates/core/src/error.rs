use thiserror::Error;

use crate::exactnum::rational::QVec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{which} cone is classical")]
    Classical { which: String, basis: Vec<QVec> },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 2 when the input was shown not to qualify
    /// (a classical cone), 1 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Classical { .. } => 2,
            _ => 1,
        }
    }
}
