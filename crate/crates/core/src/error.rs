use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported initial-configuration family `{0}` (expected linear, power, log_power or explicit)")]
    UnsupportedFamily(String),

    /// An infinite-system gate (series condition, bounded coefficients,
    /// eventually-constant tail) did not pass.
    #[error("precondition `{gate}` failed: {detail}")]
    Precondition { gate: Gate, detail: String },

    #[error("non-finite value produced at step {step} (particle {name})")]
    NonFinite { step: usize, name: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Validity gates for infinite systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Sum of exp(-alpha x_i^2) finite for every alpha > 0.
    SeriesCondition,
    /// Drift and diffusion coefficients are bounded and diffusions positive.
    BoundedCoefficients,
    /// Coefficients constant from rank n0 on.
    ConstantTail,
}

impl std::fmt::Display for Gate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Gate::SeriesCondition => "series-condition",
            Gate::BoundedCoefficients => "bounded-coefficients",
            Gate::ConstantTail => "constant-tail",
        })
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
