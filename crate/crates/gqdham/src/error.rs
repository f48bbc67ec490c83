use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid invariant factor {0} (must be >= 1)")]
    InvalidFactor(i64),

    #[error("coordinate {value} out of range for factor {modulus}")]
    CoordinateOutOfRange { value: i64, modulus: i64 },

    #[error("enumeration bound exceeded: {size} > {bound}")]
    BoundExceeded { size: u64, bound: u64 },

    #[error("beta must satisfy 2*beta = 0")]
    InvalidBeta,

    #[error("malformed token `{0}`")]
    MalformedToken(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid generating set: {0}")]
    InvalidGenSet(String),

    #[error("invalid cylinder parameters k={k}, l={l}: {reason}")]
    InvalidCylinder { k: i64, l: i64, reason: String },

    #[error("window exceeds vertex budget {0}")]
    BudgetExceeded(usize),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
