use thiserror::Error;

/// Errors produced by the modelling and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid population state: {0}")]
    State(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("representation error: {0}")]
    Representation(String),

    /// The channel does not have the restricted incoherent-leakage form the
    /// twirl closed form relies on. Magnitudes are the largest offending
    /// coefficient per coupling class.
    #[error("channel violates the incoherent leakage form: {}", format_violations(.0))]
    AssumptionViolation(Vec<(String, f64)>),

    #[error("fit failed: {message}")]
    Fit { message: String, residuals: Vec<f64> },

    #[error("bootstrap unstable: {failures} of {total} refits failed")]
    Instability { failures: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("data error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[(String, f64)]) -> String {
    v.iter().map(|(name, mag)| format!("{name}={mag:.3e}")).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
