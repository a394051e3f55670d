//! Crate-wide error type.

/// Errors produced by configuration validation, analytic evaluation, and
/// protocol state machines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain. `field` names the
    /// offending input so CLI errors stay machine-parsable.
    #[error("{field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The gamma-ratio curve is 1 to working precision at the requested
    /// time: no receiver count is accommodated yet.
    #[error("saturated: Gamma(k, lambda*t)/Gamma(k) = 1 at t = {t}; no feasible receiver count")]
    Saturated { t: f64 },

    /// Coefficient vector length does not match the generation size.
    #[error("coefficient length {got} does not match generation size {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    /// A protocol state machine was driven with an inconsistent
    /// phase/feedback combination.
    #[error("invalid transition: {0}")]
    InvalidTransition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse: {0}")]
    ConfigParse(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
