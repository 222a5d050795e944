use crate::exterior::Bidegree;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("bidegree mismatch: {left} vs {right}")]
    BidegreeMismatch { left: Bidegree, right: Bidegree },
    #[error("bidegree {bidegree} out of range for n = {n}")]
    BidegreeOutOfRange { bidegree: Bidegree, n: usize },
    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),
    #[error("matrix is not Hermitian positive-definite: {0}")]
    NotPositiveDefinite(String),
    #[error("expected a real form ({0})")]
    NotReal(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("aliasing budget exceeded: fraction {fraction:.3e} of the spectrum lies in the top third")]
    Aliasing { fraction: f64 },
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("linear solve stagnated: residual {residual:.3e} after {iterations} iterations")]
    LinearStagnation { residual: f64, iterations: usize },
    #[error("serialization error: {0}")]
    Serialization(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
