use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value not representable in double precision: {0}")]
    OverflowRegime(&'static str),

    #[error("phase frequency {which} = {value} is not positive")]
    NonPositiveFrequency { which: &'static str, value: f64 },

    #[error("quadrature did not converge: value {value:e}, estimated error {est_error:e} after {evaluations} evaluations")]
    QuadratureNoConvergence {
        value: f64,
        est_error: f64,
        evaluations: usize,
    },

    #[error("second derivative unstable: Richardson levels disagree by {rel_disagreement:e} (relative)")]
    DerivativeUnstable { rel_disagreement: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
