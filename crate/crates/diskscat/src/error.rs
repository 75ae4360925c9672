use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the supported or mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation too close to a pole of a quotient.
    #[error("pole: order {order} has a zero at {zero} (index {index}); argument {x} is within the exclusion radius")]
    Pole {
        order: u32,
        index: u32,
        zero: f64,
        x: f64,
    },
    /// Division by a vanishing denominator outside a removable limit.
    #[error("degenerate division: {0}")]
    Degenerate(String),
    /// Root refinement or iteration failure.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Input violates a stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Parameter schedule out of its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Truncated series with a tail too large to ignore.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
