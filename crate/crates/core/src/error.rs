use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("λ must be positive and finite, got {0}")]
    InvalidLambda(f64),

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("q(λ) underflows to zero at λ = {lambda:e}")]
    Underflow { lambda: f64 },

    #[error("no sign change of g found on the λ grid [{lo:e}, {hi:e}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("allocation is not saturated (gap {gap})")]
    Unsaturated { gap: u64 },

    #[error("key {0} is already present")]
    DuplicateKey(u64),

    #[error("table is full ({0} keys)")]
    TableFull(usize),

    #[error("insertion failed at load {load}")]
    InsertionFailed { load: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
