use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// The CLI maps each variant onto a process exit code, see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{coefficient} has indefinite Hermitian part: smallest eigenvalue {lambda_min:.6e} below -{tolerance:.3e}")]
    NotPosh {
        coefficient: &'static str,
        lambda_min: f64,
        tolerance: f64,
    },

    #[error("pencil is singular: rank deficient at {probes} random shifts")]
    SingularPencil { probes: usize },

    #[error("ambiguous rank decision in {context}: singular values {singular_values:?}, tolerance {tolerance:.3e}")]
    RankAmbiguity {
        context: String,
        singular_values: Vec<f64>,
        tolerance: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::RankAmbiguity { .. } => 4,
            Error::Internal(_) => 5,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
