use std::path::Path;

use mcmr_core::micromotion::{
    depump_probability, fit_depump, simulate_depump, simulate_depump_with, Couplings, DepumpData, DepumpFit, RateModel,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output;

/// Depump simulation config. Exactly one of `gamma`, `bright_rates` and
/// `couplings` selects the light.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepumpSpec {
    /// Equal per-final-state rate between bright levels (1/s).
    pub gamma: Option<f64>,
    pub bright_rates: Option<[f64; 3]>,
    pub couplings: Option<Couplings>,
    pub times: Option<Vec<f64>>,
    pub shots: Option<u64>,
    /// Simulates `a (1 - exp(-3 gamma t))` instead of the rate model.
    pub inject_amplitude: Option<f64>,
}

pub struct DepumpArgs {
    pub spec: DepumpSpec,
    pub data: Option<std::path::PathBuf>,
    pub free_amplitude: bool,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct DepumpReport {
    /// Mean per-final-state rate of the simulated light (1/s).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub injected_gamma: Option<f64>,
    pub free_amplitude: bool,
    pub data: DepumpData,
    pub fit: DepumpFit,
}

const DEFAULT_POINTS: usize = 10;

fn default_times(gamma: f64) -> Vec<f64> {
    // Spans about 1.3 decay times; 1 ms spacing when nothing decays.
    let step = if gamma > 0.0 { 0.4 / (3.0 * gamma) } else { 1e-3 };
    (1..=DEFAULT_POINTS).map(|i| step * i as f64).collect()
}

fn bright_rates(spec: &DepumpSpec) -> CliResult<[f64; 3]> {
    let chosen = [spec.gamma.is_some(), spec.bright_rates.is_some(), spec.couplings.is_some()];
    if chosen.iter().filter(|c| **c).count() != 1 {
        return Err(CliError::config("give exactly one of gamma, bright_rates or couplings"));
    }
    let rates = if let Some(g) = spec.gamma {
        [g; 3]
    } else if let Some(r) = spec.bright_rates {
        r
    } else {
        spec.couplings.unwrap().bright_rates().map_err(|e| CliError::config(e.to_string()))?
    };
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(CliError::config("scattering rates must be finite and >= 0"));
    }
    Ok(rates)
}

fn read_data(path: &Path) -> CliResult<DepumpData> {
    let mut rdr = csv::Reader::from_reader(output::read_data(path)?);
    let header = rdr.headers().map_err(|e| CliError::data(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["time_s", "shots", "bright_counts"] {
        return Err(CliError::data("line 1: expected header time_s,shots,bright_counts"));
    }
    let mut times = Vec::new();
    let mut counts = Vec::new();
    let mut shots = None;
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let bad = |m: &str| CliError::data(format!("line {line}: {m}"));
        let rec = rec.map_err(|e| bad(&e.to_string()))?;
        if rec.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let t: f64 = rec[0].parse().map_err(|_| bad("bad time_s"))?;
        let n: u64 = rec[1].parse().map_err(|_| bad("bad shots"))?;
        let c: u64 = rec[2].parse().map_err(|_| bad("bad bright_counts"))?;
        if *shots.get_or_insert(n) != n {
            return Err(bad("every row must use the same shot count"));
        }
        if c > n {
            return Err(bad("bright_counts exceeds shots"));
        }
        times.push(t);
        counts.push(c);
    }
    if times.len() < 4 {
        return Err(CliError::data(format!("{}: a depump fit needs at least 4 rows", path.display())));
    }
    Ok(DepumpData { times, shots: shots.unwrap_or(0), bright_counts: counts })
}

pub fn run_report(args: &DepumpArgs) -> CliResult<DepumpReport> {
    let (data, injected_gamma) = if let Some(path) = &args.data {
        (read_data(path)?, None)
    } else {
        let rates = bright_rates(&args.spec)?;
        let gamma = rates.iter().sum::<f64>() / 3.0;
        let times = args.spec.times.clone().unwrap_or_else(|| default_times(gamma));
        let shots = args.spec.shots.unwrap_or(1000);
        let data = match args.spec.inject_amplitude {
            Some(a) => {
                let g = args.spec.gamma.ok_or_else(|| CliError::config("inject_amplitude needs a scalar gamma"))?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(CliError::config("inject_amplitude must lie in [0, 1]"));
                }
                simulate_depump_with(|t| Ok(a * 1.5 * depump_probability(g, t)), &times, shots, args.seed)?
            }
            None => simulate_depump(&RateModel::measurement(rates), &times, shots, args.seed)?,
        };
        (data, Some(gamma))
    };
    let fit = fit_depump(&data, args.free_amplitude)?;
    Ok(DepumpReport { injected_gamma, free_amplitude: args.free_amplitude, data, fit })
}

pub fn run(args: &DepumpArgs, out: Option<&Path>) -> CliResult<()> {
    let report = run_report(args)?;
    match report.fit.time_constant {
        Some(tau) => {
            eprintln!("1/gamma = {tau:.4e} s +/- {:.2e} s", report.fit.time_constant_sigma.unwrap_or(f64::NAN))
        }
        None => eprintln!("no depumping resolved: 1/gamma is unbounded"),
    }
    output::emit(out, &output::json(&report)?)
}
