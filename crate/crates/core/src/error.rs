use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires the {required} regime, got k^2 = {k_squared}")]
    Regime {
        required: &'static str,
        k_squared: f64,
    },

    #[error("n = {n} and p = {p} must have equal parity for a full coherent revival")]
    Parity { n: u32, p: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integration did not finish within {max_steps} steps (stopped at t = {t})")]
    TooManySteps { max_steps: usize, t: f64 },

    #[error("truncation error: norm deficit {deficit:e} exceeds limit {limit:e}; increase the cutoff")]
    Truncation { deficit: f64, limit: f64 },

    #[error("pump profile is undefined at t = {t}")]
    PumpDomain { t: f64 },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
