use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrwError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("weight overflow: {0}")]
    WeightOverflow(String),
    #[error("form is not integral: {0}")]
    NotIntegral(String),
    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not of d(frp) type: {0}")]
    NotExactFractional(String),
    #[error("matrix not invertible at this precision: {0}")]
    NotInvertible(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("iteration limit of {0} exhausted")]
    IterationLimit(usize),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("empty epsilon grid")]
    EmptyGrid,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DrwError>;
