use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid coloring: {0}")]
    Invariant(String),

    #[error("state space of {size} exceeds budget {budget}")]
    BudgetExceeded { size: String, budget: u128 },

    #[error("oracle budget exceeded: {candidates} candidate trees (limit {limit})")]
    OracleBudget { candidates: usize, limit: usize },

    #[error("not a tree: {0}")]
    NotATree(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
