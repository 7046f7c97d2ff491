use thiserror::Error;

/// Errors raised by the density, quadrature and checker layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    #[error("integrand returned a non-finite value ({value}) at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("density vanishes at sampled point x = {0}")]
    ZeroDensity(f64),

    #[error("numerical inconclusive: {0}")]
    Inconclusive(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
