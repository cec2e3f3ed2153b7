use thiserror::Error;

/// Errors raised by node-set construction, bound evaluation and the exact
/// Vandermonde computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate nodes: {first} and {second} coincide modulo 1")]
    DuplicateNodes { first: f64, second: f64 },

    #[error("singular value decomposition did not converge (d = {d})")]
    SvdNoConvergence { d: usize },

    #[error("near-singular Vandermonde matrix: sigma_min = {sigma_min:e} (d = {d})")]
    NearSingular { d: usize, sigma_min: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerical linear algebra rather than of the
    /// caller's parameters.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SvdNoConvergence { .. } | Error::NearSingular { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
