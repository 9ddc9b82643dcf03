use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range 0..={max}")]
    Index { index: usize, max: usize },

    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity { what: &'static str, got: usize, limit: usize },

    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, best: Vec<Complex64> },

    #[error("polishing diverged after {} steps", trajectory.len())]
    Divergence { trajectory: Vec<Complex64> },

    #[error("structural violation: {0}")]
    StructuralViolation(String),

    #[error("quadrature tolerance not reached (estimate {estimate}): {message}")]
    Accuracy { estimate: Complex64, message: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
