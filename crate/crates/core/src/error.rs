use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("product dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("truncation level {level} exceeds dimension {dim}")]
    TruncationTooLarge { level: usize, dim: usize },

    #[error("invalid Schatten exponent {0}: must be >= 1 or infinity")]
    InvalidExponent(f64),

    #[error("tail formula violation: residual norm {direct:e} vs singular value tail {tail:e}")]
    TailFormulaViolation { direct: f64, tail: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("oracle cannot evaluate at {0}")]
    OracleLevelUnsupported(String),

    #[error("invalid dilation: {0}")]
    InvalidDilation(String),

    #[error("unknown builtin map `{0}`")]
    UnknownBuiltin(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("empty schedule or level list: {0}")]
    EmptySchedule(String),
}
