use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis vectors are not linearly independent")]
    NotIndependent,
    #[error("Gram determinant is not a perfect square")]
    NotIntegral,
    #[error("first entry of the gcd chain is zero")]
    FirstZero,
    #[error("cannot pad a lattice to a smaller dimension ({from} -> {to})")]
    ShrinkForbidden { from: usize, to: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operation requires a non-empty shifted lattice")]
    EmptyInput,
    #[error("orthogonal complement is defined for lattices only (zero base)")]
    NotALattice,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("unknown symbol '{symbol}' at {line}:{col}")]
    UnknownSymbol { line: usize, col: usize, symbol: String },
    #[error("negation budget exceeded: formula has weight {weight}, limit is {limit}")]
    BudgetExceeded { weight: usize, limit: usize },
    #[error("witness search exhausted its budget")]
    SearchExhausted,
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
