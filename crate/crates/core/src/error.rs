use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A malformed argument (bad partition, zero initial data, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The adaptive integrator could not make progress.
    #[error("integration failure: {0}")]
    Integration(String),
    /// Zero-profile extraction met non-interlaced crossings.
    #[error("zero extraction failure: {0}")]
    Extraction(String),
    /// A construction could not be completed or failed its own checks.
    #[error("construction failure: {0}")]
    Construction(String),
    /// An operation's precondition does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
