use thiserror::Error;

/// Library-wide error type. The CLI maps `Usage`, `Domain` and `Precondition`
/// to exit code 2 and everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad grid spec, bad JSON, bad flag values.
    #[error("usage: {0}")]
    Usage(String),

    /// A point or value outside the domain contract of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A stated precondition of an operation does not hold for the inputs.
    #[error("precondition: {0}")]
    Precondition(String),

    /// Rejected extended-real arithmetic such as (+inf) + (-inf).
    #[error("extended-real arithmetic: {0}")]
    ExtReal(String),

    /// The linear program could not be solved to optimality.
    #[error("linear program: {0}")]
    Lp(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors that signal bad input rather than an internal failure.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::Usage(_) | Error::Domain(_) | Error::Precondition(_) | Error::ExtReal(_)
        )
    }
}
