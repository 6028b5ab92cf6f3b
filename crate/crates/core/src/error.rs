use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration is empty")]
    EmptyConfig,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("duplicate site {0:?}")]
    DuplicateSite(Vec<i32>),

    #[error("coordinate {0} outside the supported range ±{limit}", limit = crate::lattice::COORD_LIMIT)]
    CoordinateOverflow(i64),

    #[error("site {0:?} is not in the configuration")]
    SiteNotInConfig(Vec<i32>),

    #[error("negative value {value} at {site:?}; rearrangements need nonnegative functions")]
    NegativeValue { site: Vec<i32>, value: f64 },

    #[error("enumeration budget exceeded for N={n}, d={d} (allowed: d=2 with N<=12, d=3 with N<=7)")]
    BudgetExceeded { n: usize, d: usize },

    #[error("unsupported dimension {0} (sweeps are limited to d<=3)")]
    UnsupportedDimension(usize),

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("rearrangement did not reach a fixpoint within {cycles} cycles")]
    RearrangementCap { cycles: usize },

    #[error("quadrature bracket {achieved:e} above requested tolerance {requested:e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
