use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction would exceed a fixed size limit.
    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A constructor's parameter requirements were not met.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("element {0} is not an idempotent")]
    NotIdempotent(usize),

    #[error("search budget of {0:?} exceeded")]
    BudgetExceeded(std::time::Duration),

    /// An endomorphism did not fit any of the seven families.
    #[error("unclassifiable endomorphism: {0}")]
    Unclassifiable(String),

    /// A kernel did not have one of the admissible congruence shapes.
    #[error("kernel shape violation: {0}")]
    KernelShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
