use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice extent: {0}")]
    InvalidExtent(String),

    #[error("dangling edge: state {0} has no partner on this lattice")]
    DanglingEdge(String),

    #[error("states {0} and {1} are not joined by an edge")]
    NotAdjacent(String, String),

    #[error("unknown plaquette {0}")]
    UnknownPlaquette(String),

    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    #[error("invalid coin: {0}")]
    InvalidCoin(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("closed-form argument outside [-1, 1]: {0}")]
    FormulaDomain(f64),

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("initial state has zero norm")]
    ZeroVector,

    #[error("operation requires a caged report")]
    NotCaged,

    #[error("no transmitted channel through the rim coin")]
    NoOutChannel,

    #[error("lattice too small: {0}")]
    LatticeTooSmall(String),

    #[error("unknown symmetry `{0}`")]
    UnknownSymmetry(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
