use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed the configured work or size budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// XY parameters violate one of the bosonization bounds.
    #[error("validity bound violated: {0}")]
    Validity(String),

    /// A weighted geometric series does not converge.
    #[error("divergent series: {0}")]
    Divergence(String),

    #[error("quadrature did not converge (residual estimate {residual:e}, tolerance {tolerance:e})")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
