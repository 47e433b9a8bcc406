use thiserror::Error;

use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("operands live in Grassmann algebras with {0} and {1} generators")]
    MismatchedGenerators(u8, u8),
    #[error("at most {max} generators are supported, got {got}")]
    TooManyGenerators { got: usize, max: usize },
    #[error("generator index {index} out of range for {m} generators")]
    GeneratorOutOfRange { index: usize, m: u8 },
    #[error("generator pool exhausted ({0} generators)")]
    PoolExhausted(u8),
    #[error("element has zero body and is not invertible")]
    NotInvertible,
    #[error("{0} requires an even element")]
    NotEven(&'static str),
    #[error("{0} requires an odd element")]
    NotOdd(&'static str),
    #[error("jets have different odd dimensions ({0} and {1})")]
    MismatchedN(usize, usize),
    #[error("base points differ: {0} vs {1}")]
    BaseMismatch(String, String),
    #[error("odd index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("jet order insufficient: need {needed}, have {available}")]
    OrderInsufficient { needed: i32, available: i32 },
    #[error("germ is not a contactomorphism (max residual {0})")]
    NotContact(String),
    #[error("germ is not contact-certified")]
    NotCertified,
    #[error("internal disagreement: {0}")]
    Disagreement(String),
    #[error("non-generic input: {0}")]
    NonGeneric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
