use thiserror::Error;

/// Errors raised by the numerical kernels and the model layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature did not converge (value {value:e}, error estimate {err_est:e})")]
    QuadratureNonConvergence { value: f64, err_est: f64 },

    #[error("integrand returned NaN at x = {x}")]
    NanIntegrand { x: f64 },

    #[error("no sign change in [{lo}, {hi}] after bracket expansion")]
    Bracketing { lo: f64, hi: f64 },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepOverflow { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("solution blew up after t = {t} (last state {state:?})")]
    BlowUp { t: f64, state: Vec<f64> },

    #[error("non-finite derivative at t = {t}")]
    NonFinite { t: f64 },

    #[error("evaluation overflow at s = {s}")]
    Overflow { s: f64 },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
