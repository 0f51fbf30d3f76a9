use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An objective returned NaN or infinity.
    #[error("numeric failure in variable {index}: {detail}")]
    Numeric { index: usize, detail: String },

    /// The instance admits no feasible plan for the requested step.
    #[error("infeasible instance: {0}")]
    Infeasible(String),

    /// An exhaustive enumeration would exceed the size guard.
    #[error("enumeration too large: {count} assignments exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
