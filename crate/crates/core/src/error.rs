use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("budget exceeded: more than {cap} items")]
    BudgetExceeded { cap: usize },
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("missing volume table entry for {0}")]
    MissingTableEntry(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("rejection cap exceeded after {0} proposals")]
    RejectionCapExceeded(u64),
    #[error("no consistent convention: {0}")]
    NoConsistentConvention(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Numerical failures map to a distinct CLI exit code from input errors.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalInstability(_)
                | Error::ConvergenceFailure(_)
                | Error::QuadratureFailure(_)
                | Error::RejectionCapExceeded(_)
                | Error::NoConsistentConvention(_)
                | Error::BudgetExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
