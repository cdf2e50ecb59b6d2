use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Exact operations fail loudly: anything that would silently degrade
/// precision (overflowing a clause budget, leaving an order ideal, mixing
/// models) is an `Error`, never a wrong answer.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("model mismatch: {0}")]
    Model(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("resource limit exceeded: {what} ({count} > {limit})")]
    Resource {
        what: String,
        count: u64,
        limit: u64,
    },
    #[error("element is not in the order ideal generated by the unit: {0}")]
    NotInIdeal(String),
    #[error("operation requires an Archimedean model, got {0}")]
    NonArchimedean(String),
    #[error("invalid interpolation pair: {0}")]
    InvalidPair(String),
    #[error("declared Lipschitz bound violated: {0}")]
    Lipschitz(String),
    #[error("not positively homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
