use thiserror::Error;

/// Errors raised across the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("entry {value} at position {index} is not in {{-1, 0, 1}}")]
    NotTernary { index: usize, value: i64 },

    #[error("matrix is not symmetric: |M[{i}][{j}] - M[{j}][{i}]| = {deviation:e}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    #[error("denominator g(x) = {0} is not positive")]
    NonPositiveDenominator(f64),

    #[error("matrix is not a ternary PSD matrix")]
    NotTernaryPsd,

    #[error("dimension {n} exceeds the limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error("supports of the two vectors overlap at index {0}")]
    OverlappingSupports(usize),

    #[error("instance has no linear constraints")]
    EmptyConstraints,

    #[error("no ternary point satisfies the constraints")]
    NoFeasiblePoint,

    #[error("instance has linear constraints but the variant requires none")]
    HasConstraints,

    #[error("wrong problem variant: {0}")]
    WrongVariant(String),

    #[error("variable {0} is already fixed")]
    AlreadyFixed(usize),

    #[error("every variable is fixed")]
    AllFixed,

    #[error("k = {k} is invalid for dimension {n} (need odd k in {{5, 7, 9}} with k <= n)")]
    KTooLarge { k: usize, n: usize },

    #[error("paired move is not balanced (delta_i + delta_j = {0})")]
    UnbalancedMove(i32),

    #[error("move leaves the point unchanged")]
    NoOpMove,

    #[error("rho = {0} is not positive")]
    NonPositiveRho(f64),

    #[error("inner QUTO solve ended with status {0}")]
    InnerSolverFailure(String),

    #[error("Gram-Schmidt pivot {0:e} is below the degeneracy threshold")]
    DegenerateBasis(f64),

    #[error("unknown {kind} '{name}'")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
