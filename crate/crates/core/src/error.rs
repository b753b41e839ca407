use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Scalars inside variants are widened to `f64` so the error type stays
/// independent of the solver scalar.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} out of range: {value} not in [{lo}, {hi}]")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("integration failed at t = {last_good}: {reason}")]
    Integration { last_good: f64, reason: String },

    #[error("no convergence after {evaluations} evaluations (best x = {best_x}, f = {best_f})")]
    Convergence {
        evaluations: usize,
        best_x: f64,
        best_f: f64,
    },

    #[error("grid too coarse: {samples} samples across the wire, need at least {required}")]
    Resolution { samples: usize, required: usize },

    #[error("visibility undefined when both intensities are zero")]
    UndefinedVisibility,

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical engines, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Integration { .. }
                | Error::Convergence { .. }
                | Error::Resolution { .. }
                | Error::UndefinedVisibility
                | Error::Fit(_)
        )
    }
}
