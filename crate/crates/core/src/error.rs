use std::io;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A run configuration is inconsistent or violates a model constraint.
    #[error("configuration error: {0}")]
    Config(String),

    /// The spectral grid does not resolve enough of the wave energy.
    #[error(
        "spectral grid captures {captured_pct:.2}% of the wave variance (needs 97%..103%); \
         widen [omega_min, omega_max] or add components"
    )]
    Refinement { captured_pct: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
