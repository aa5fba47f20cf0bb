use thiserror::Error;

/// Errors from the numeric kernel and shared primitives.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("arithmetic overflow")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("invalid decimal literal: {0:?}")]
    InvalidDecimal(String),
    #[error("identifier must be non-empty")]
    EmptyId,
}
