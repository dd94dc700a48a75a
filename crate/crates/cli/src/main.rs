//! `mcmr`: micromotion scans, depumping fits, MCMR benchmarking campaigns
//! and refits of recorded datasets.

mod benchmark;
mod depump;
mod error;
mod fit;
mod output;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcmr_core::rb::{campaign_presets, Campaign};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "mcmr", version, about = "Micromotion crosstalk suppression and MCMR benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, or output directory for `benchmark`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Bootstrap resamples.
    #[arg(long, global = true)]
    resamples: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalised scattering rate against displacement from the RF null.
    MicromotionScan {
        /// Largest displacement of the default grid (m).
        #[arg(long, default_value_t = 5.5e-6)]
        max_displacement: f64,
        /// Points in the default grid.
        #[arg(long, default_value_t = 221)]
        points: usize,
        /// Explicit comma-separated displacements (m).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        displacements: Option<Vec<f64>>,
    },
    /// Simulates and fits the bright-state depumping experiment.
    Depump {
        /// Per-final-state scattering rate (1/s); overrides the config.
        #[arg(long)]
        gamma: Option<f64>,
        /// Comma-separated exposure times (s).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        shots: Option<u64>,
        /// Fit the asymptote instead of fixing it at 2/3.
        #[arg(long)]
        free_amplitude: bool,
        /// Simulate with this asymptote instead of the rate model.
        #[arg(long)]
        inject_amplitude: Option<f64>,
        /// Fit recorded data (CSV `time_s,shots,bright_counts`) instead.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Runs a benchmarking campaign and writes the result bundle.
    Benchmark {
        /// Run the built-in eight-experiment campaign.
        #[arg(long)]
        preset: bool,
    },
    /// Fits a recorded RB dataset.
    Fit {
        /// Dataset CSV.
        data: PathBuf,
        /// Expected `L/S`, used for the initial guess.
        #[arg(long, default_value_t = 1.0)]
        expected_ratio: f64,
    },
    /// Prints the built-in campaign as JSON.
    Preset,
}

fn load_campaign(cli: &Cli, preset: bool) -> CliResult<Campaign> {
    match (&cli.config, preset) {
        (Some(_), true) => Err(CliError::config("give either --config or --preset")),
        (None, true) => Ok(campaign_presets()),
        (Some(path), false) => Ok(Campaign::from_json(&output::read_config(path)?)?),
        (None, false) => Err(CliError::config("benchmark needs --config <campaign.json> or --preset")),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.parallel {
        if n == 0 {
            return Err(CliError::config("--parallel must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::other(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::MicromotionScan { max_displacement, points, displacements } => {
            let path =
                cli.config.as_deref().ok_or_else(|| CliError::config("micromotion-scan needs --config <trap.json>"))?;
            let args = scan::ScanArgs {
                max_displacement: *max_displacement,
                points: *points,
                displacements: displacements.clone(),
            };
            scan::run(path, &args, out)
        }
        Command::Depump { gamma, times, shots, free_amplitude, inject_amplitude, data } => {
            let mut spec = match &cli.config {
                Some(path) => serde_json::from_str(&output::read_config(path)?)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?,
                None => depump::DepumpSpec::default(),
            };
            if gamma.is_some() {
                spec = depump::DepumpSpec { gamma: *gamma, bright_rates: None, couplings: None, ..spec };
            }
            spec.times = times.clone().or(spec.times);
            spec.shots = shots.or(spec.shots);
            spec.inject_amplitude = inject_amplitude.or(spec.inject_amplitude);
            let args = depump::DepumpArgs {
                spec,
                data: data.clone(),
                free_amplitude: *free_amplitude,
                seed: cli.seed.unwrap_or(0),
            };
            depump::run(&args, out)
        }
        Command::Benchmark { preset } => {
            let campaign = benchmark::with_overrides(load_campaign(&cli, *preset)?, cli.seed, cli.resamples)?;
            let dir = out
                .map(PathBuf::from)
                .or_else(|| campaign.output_dir.as_ref().map(PathBuf::from))
                .ok_or_else(|| CliError::config("benchmark needs --out <dir> or output_dir in the campaign"))?;
            let outcome = benchmark::run(&campaign, &dir)?;
            benchmark::finish(&outcome)
        }
        Command::Fit { data, expected_ratio } => {
            if !(expected_ratio.is_finite() && *expected_ratio > 0.0) {
                return Err(CliError::config("--expected-ratio must be finite and > 0"));
            }
            let resamples = cli.resamples.unwrap_or(fit::DEFAULT_RESAMPLES);
            fit::run(data, *expected_ratio, resamples, cli.seed.unwrap_or(0), out)
        }
        Command::Preset => output::emit(out, &output::json(&campaign_presets())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
