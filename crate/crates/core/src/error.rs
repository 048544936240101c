use thiserror::Error;

use crate::sdp::SdpSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix has a negative eigenvalue {eigenvalue:e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state vector is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },

    #[error("invalid Choi matrix: {0}")]
    InvalidChoi(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("solver tolerance {0:e} outside [1e-12, 1e-4]")]
    InvalidTolerance(f64),

    #[error("no strictly feasible starting point: {0}")]
    NoFeasibleStart(String),

    #[error("Newton system is numerically singular at iteration {iteration}")]
    SingularNewton { iteration: usize },

    #[error("solver stopped after {iterations} iterations with gap {gap:e}")]
    NotConverged {
        iterations: usize,
        gap: f64,
        best: Box<SdpSolution>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
