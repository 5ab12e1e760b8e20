use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a value outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The inputs are admissible individually but the requested quantity is
    /// undefined for them (e.g. a squeezing parameter outside its interval).
    #[error("domain error: {0}")]
    Domain(String),

    /// A covariance matrix has a symplectic eigenvalue below the vacuum level.
    #[error("unphysical state: symplectic eigenvalue {nu} is below 1")]
    Unphysical { nu: f64 },

    /// A truncated series left more probability mass behind than allowed.
    #[error("truncation error: tail mass {tail:e} exceeds {limit:e}")]
    Truncation { tail: f64, limit: f64 },

    /// Numerical integration did not reach the requested accuracy.
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
