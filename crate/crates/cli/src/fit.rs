use std::path::Path;

use mcmr_core::rb::{analyze, AnalysisResult, RBDataset};

use crate::error::CliResult;
use crate::output;

pub const DEFAULT_RESAMPLES: usize = 200;

pub fn analyze_file(path: &Path, expected_ratio: f64, resamples: usize, seed: u64) -> CliResult<AnalysisResult> {
    let ds = RBDataset::read_csv(output::read_data(path)?)?;
    Ok(analyze(&ds, expected_ratio, resamples, seed)?)
}

pub fn run(path: &Path, expected_ratio: f64, resamples: usize, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let result = analyze_file(path, expected_ratio, resamples, seed)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    output::emit(out, &output::json(&result)?)
}
