use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("standard part of an unlimited value")]
    Unlimited,
    #[error("conditioning event has probability zero")]
    ZeroConditioningEvent,
    #[error("objects live on different algebras")]
    AlgebraMismatch,
    #[error("not an SLPS: {0}")]
    NotAnSlps(String),
    #[error("invalid Popper space: {0}")]
    InvalidPopperSpace(String),
    #[error("conditioning family is not treelike: {0}")]
    NotTreelike(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("query kind {0} is not available for this model")]
    KindMismatch(String),
    #[error("conditioning event is empty")]
    EmptyConditioningEvent,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
