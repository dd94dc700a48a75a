use std::fmt;

/// Process exit codes.
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_FIT: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self { code: EXIT_OTHER, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn exit_code(e: &mcmr_core::Error) -> u8 {
    use mcmr_core::Error::*;
    match e {
        Config(_) | Parameter(_) | Json(_) => EXIT_CONFIG,
        Schema { .. } | Csv(_) => EXIT_DATA,
        Fit { .. } | Instability { .. } => EXIT_FIT,
        _ => EXIT_OTHER,
    }
}

/// Message for a core error, with fit residuals appended when present.
pub fn describe(e: &mcmr_core::Error) -> String {
    match e {
        mcmr_core::Error::Fit { residuals, .. } if !residuals.is_empty() => {
            let dump: Vec<String> = residuals.iter().map(|r| mcmr_core::fmt_f64(*r)).collect();
            format!("{e}\nresiduals: {}", dump.join(","))
        }
        _ => e.to_string(),
    }
}

impl From<mcmr_core::Error> for CliError {
    fn from(e: mcmr_core::Error) -> Self {
        Self { code: exit_code(&e), message: describe(&e) }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
