use core::fmt;

use crate::qlang::EvalError;
use crate::relmodel::ModelError;

/// Errors raised by the analysis operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Model(ModelError),
    Eval(EvalError),
    /// The instance violates the inclusion dependencies it is required to satisfy.
    IdsViolated,
    /// A brute-force search would exceed its size limit.
    SearchTooLarge {
        items: usize,
        limit: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Model(e) => write!(f, "{e}"),
            Error::Eval(e) => write!(f, "{e}"),
            Error::IdsViolated => f.write_str("the instance does not satisfy the inclusion dependencies"),
            Error::SearchTooLarge { items, limit } => {
                write!(f, "exhaustive search over {items} items exceeds the limit of {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}

impl From<ModelError> for Error {
    fn from(e: ModelError) -> Self {
        Error::Model(e)
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}
