use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    /// An iteration did not settle within its budget. `last` is the final
    /// iterate and `residual` the last step size (or equation residual).
    #[error("no convergence after {iterations} iterations (last iterate {last}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    /// Neither the prior nor the measurement carries usable information,
    /// or the linearization slope vanished.
    #[error("degenerate update: {0}")]
    Degenerate(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bad tuning parameter: {0}")]
    BadTuning(String),

    #[error("quadrature captured only {captured} of the posterior mass")]
    MassLeak { captured: f64 },
}

pub type Result<T, E = FilterError> = std::result::Result<T, E>;
