use thiserror::Error;

/// Errors produced by the analysis, simulation and protocol modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Inputs that must agree with each other (interferer counts, vector
    /// lengths) do not.
    #[error("configuration error: {0}")]
    Config(String),

    /// A multiplexing gain outside the scheme's tradeoff domain.
    #[error("multiplexing gain {r} outside [{lo}, {hi}]")]
    Domain { r: f64, lo: f64, hi: f64 },

    /// The partial-fraction tail form cannot be evaluated reliably.
    #[error("ill-conditioned SIR vector: {0}")]
    IllConditioned(String),

    /// A numerical procedure lost all precision (e.g. an outage probability
    /// underflowed to zero).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Frame or payload sizes are inconsistent.
    #[error("framing error: {0}")]
    Framing(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
