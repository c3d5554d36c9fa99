use thiserror::Error;

pub type Result<T> = std::result::Result<T, ArwError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArwError {
    /// A parameter lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stabilization consumed more instructions than its budget allows.
    #[error("instruction budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("linear solver failure: {0}")]
    Solver(String),
}

impl ArwError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ArwError::Domain(msg.into())
    }
}
