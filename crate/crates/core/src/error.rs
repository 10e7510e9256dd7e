use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed instance file; the message names the field and position.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid coalition structure: {0}")]
    InvalidStructure(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("allocation is not a Nash equilibrium")]
    NotNash,

    #[error("coalition structure is not laminar")]
    NotLaminar,

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Exhaustive work would exceed the caller's budget. Never a verdict.
    #[error("budget exceeded: {needed} evaluations required, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("refutation failed: {0}")]
    Refutation(String),
}
