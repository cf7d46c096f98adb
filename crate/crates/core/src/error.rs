use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid boundary leak: state {state} has relative amplitude {amplitude:.3e} at the grid edge (threshold {threshold:.1e}); enlarge the grid")]
    BoundaryLeak {
        state: usize,
        amplitude: f64,
        threshold: f64,
    },

    #[error("eigensolver failed: {0}")]
    Convergence(String),

    #[error("spectral truncation inadequate: exp(-beta*(E_max-E_0)) = {bound:.3e} exceeds {tolerance:.1e}; request more states")]
    Truncation { bound: f64, tolerance: f64 },

    #[error("time argument {value} outside [0, {upper}]")]
    Domain { value: f64, upper: f64 },

    #[error("Q(J) is not strictly increasing at source index {index} (J = {source_value})")]
    NonMonotonic { index: usize, source_value: f64 },

    #[error("effective potential is not convex near Q = {q} (second divided difference {second_difference:.3e})")]
    Convexity { q: f64, second_difference: f64 },

    #[error("minimum of the effective potential lies at the edge of the sampled range (Q = {0})")]
    MinimumAtBoundary(f64),

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error("source grid must be ascending and contain J = 0")]
    SourceGrid,

    #[error("Metropolis acceptance {acceptance:.3} outside [{lo}, {hi}] after step tuning")]
    Acceptance { acceptance: f64, lo: f64, hi: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
