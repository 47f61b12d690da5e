use thiserror::Error;

use crate::gaussian::GaussianInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} and {1} are not coprime")]
    NotCoprime(GaussianInt, GaussianInt),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported field: {0}")]
    Field(String),
    #[error("{0} is not invertible modulo the level")]
    NotUnit(GaussianInt),
    #[error("prime {prime} rejected: {reason}")]
    PrimeExcluded { prime: GaussianInt, reason: String },
    #[error("level/weight rejected: {0}")]
    Torsion(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("operators do not commute: {0} and {1}")]
    NonCommuting(String, String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("unknown Frobenius order {0}")]
    UnknownOrder(u32),
    #[error("internal check failed: {0}")]
    Check(String),
}

pub type Result<T> = std::result::Result<T, Error>;
