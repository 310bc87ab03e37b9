use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the validity region of the requested method.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge: {detail}")]
    Convergence { what: &'static str, detail: String },

    /// A closed-form expression hit a pole (resonance overlap, vanishing denominator).
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("norm drifted to {norm:.3e} at tau = {tau:.6} (tolerance {tolerance:.1e})")]
    NormDrift { norm: f64, tau: f64, tolerance: f64 },

    #[error(
        "band truncation too narrow: edge population {population:.3e} exceeds {threshold:.1e}"
    )]
    Truncation { population: f64, threshold: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
