use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("degenerate cell {cell}: volume {volume:e}")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("factorization failed at pivot {index}: {msg}")]
    Factorization { index: usize, msg: String },

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigensolver did not converge; Ritz residuals {residuals:?}")]
    EigenNoConvergence { residuals: Vec<f64> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
