use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A non-positive pivot showed up while factorizing the Toeplitz section.
    #[error("numerical degeneracy: non-positive pivot at r = {r}")]
    Degenerate { r: usize },

    /// The forward discrete Painleve recursion lost all significance.
    #[error("loss of precision in forward recursion after index {last_trusted}")]
    LossOfPrecision { last_trusted: usize },

    #[error("quadrature did not converge: doubling nodes moved the result by {delta:e}")]
    QuadratureNonConvergence { delta: f64 },

    /// The Painleve II trajectory left the Hastings-McLeod branch.
    #[error("Painleve II integration blew up at s = {s}")]
    BlowUp { s: f64 },

    #[error("ODE integrator step size underflow at s = {s}")]
    StepSizeUnderflow { s: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("moment series not converged by r = {r_limit}")]
    TruncationFailure { r_limit: usize },
}

impl Error {
    /// True for errors caused by the caller's arguments rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Capacity(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
