use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The instance admits no feasible solution (for example `q > n`).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A distance matrix failed the metric check and execution was not forced.
    #[error("non-metric input: {0}")]
    NonMetric(String),

    /// An exact method or enumeration would exceed its work budget.
    #[error("refused: {what} needs about {estimate} units of work, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        estimate: u128,
        budget: u128,
    },

    /// One of the runtime-checked inequalities of a certificate failed.
    #[error("certificate violated: {0}")]
    Certificate(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
