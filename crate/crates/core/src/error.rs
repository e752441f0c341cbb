use thiserror::Error;

use crate::attacks::InfoReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource cap exceeded for {what}: requested {requested}, limit {limit}")]
    Resource {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("mode error: {0}")]
    Mode(String),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    /// The enumeration or sampling budget ran out; the partial report is
    /// attached with `valid = false`.
    #[error("budget of {budget} exhausted")]
    BudgetExceeded {
        budget: usize,
        partial: Box<InfoReport>,
    },
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            actual,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for cap/budget failures, which the CLI maps to a dedicated exit code.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. } | Error::BudgetExceeded { .. })
    }
}

pub(crate) fn ensure_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::dim(context, expected, actual))
    }
}
