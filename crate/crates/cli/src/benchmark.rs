use std::path::{Path, PathBuf};

use mcmr_core::fmt_f64;
use mcmr_core::rb::{
    decay_curve_table, run_experiment, run_sweep, write_focus_csv, Campaign, ExperimentConfig, ExperimentData,
    ExperimentReport, SpamReport, SweepRow,
};
use mcmr_core::rng::{derive_seed, DOMAIN_TRIALS};
use rayon::prelude::*;

use crate::error::{CliError, CliResult, EXIT_FIT};
use crate::output::{self, slug};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SPAM_FILE: &str = "spam.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

const SUMMARY_HEADER: [&str; 18] = [
    "experiment",
    "focus_qubits",
    "probe",
    "status",
    "injected_error",
    "avg_error",
    "avg_error_sigma",
    "spam_error",
    "spam_error_sigma",
    "leakage",
    "leakage_sigma",
    "seepage",
    "seepage_sigma",
    "scattering_standard",
    "scattering_leakage",
    "rate_standard_per_s",
    "rate_leakage_per_s",
    "message",
];

/// Outcome of a campaign: experiments that failed are listed, not fatal.
#[derive(Debug)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub failed: Vec<String>,
}

/// Applies command-line overrides and folds the shared sampling and seed
/// into each experiment.
pub fn with_overrides(mut c: Campaign, seed: Option<u64>, resamples: Option<usize>) -> CliResult<Campaign> {
    if seed.is_some() {
        c.seed = seed;
    }
    if let (Some(sw), Some(s)) = (c.sweep.as_mut(), c.seed) {
        sw.seed = derive_seed(s, DOMAIN_TRIALS, c.experiments.len() as u64);
    }
    c.experiments = c.resolved_experiments();
    c.sampling = None;
    c.seed = None;
    if let Some(n) = resamples {
        for e in &mut c.experiments {
            e.sampling.resamples = n;
        }
    }
    c.validate()?;
    Ok(c)
}

/// Pools the last scored measurement over focus qubits.
fn headline_spam(spam: &[SpamReport]) -> Option<(f64, f64)> {
    let last = spam.iter().filter(|s| s.error.is_some()).map(|s| s.measurement).max()?;
    let (mut errors, mut shots) = (0.0, 0.0);
    for s in spam.iter().filter(|s| s.measurement == last) {
        errors += s.error.unwrap() * s.shots as f64;
        shots += s.shots as f64;
    }
    let p = errors / shots;
    Some((p, (p * (1.0 - p) / shots).sqrt()))
}

fn qubit_list(q: &[usize]) -> String {
    q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn summary_rows(report: &ExperimentReport, t_meas: f64) -> Vec<Vec<String>> {
    let spam = headline_spam(&report.spam);
    report
        .probes
        .iter()
        .map(|p| {
            let a = &p.analysis;
            let (rs, rl) = a.scattering.rates(t_meas).unwrap_or((f64::NAN, f64::NAN));
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            vec![
                report.name.clone(),
                qubit_list(&report.focus_qubits),
                p.qubit.to_string(),
                "ok".into(),
                fmt_f64(p.injected.average_error),
                fmt_f64(a.average_error),
                fmt_f64(a.sigma.average_error),
                opt(spam.map(|s| s.0)),
                opt(spam.map(|s| s.1)),
                fmt_f64(a.leakage),
                fmt_f64(a.sigma.leakage),
                fmt_f64(a.seepage),
                fmt_f64(a.sigma.seepage),
                fmt_f64(a.scattering.standard),
                fmt_f64(a.scattering.leakage),
                fmt_f64(rs),
                fmt_f64(rl),
                a.warnings.join("; "),
            ]
        })
        .collect()
}

fn failed_row(cfg: &ExperimentConfig, message: &str) -> Vec<String> {
    let mut row = vec![String::new(); SUMMARY_HEADER.len()];
    row[0] = cfg.name.clone();
    row[1] = qubit_list(&cfg.focus_qubits);
    row[2] = qubit_list(&cfg.probe_qubits);
    row[3] = "failed".into();
    row[SUMMARY_HEADER.len() - 1] = message.replace('\n', " ");
    row
}

fn write_experiment(dir: &Path, report: &ExperimentReport, data: &ExperimentData) -> CliResult<()> {
    let stem = slug(&report.name);
    output::write_atomic(&dir.join(format!("{stem}.json")), &output::json(report)?)?;
    for (q, ds) in &data.probes {
        let mut buf = Vec::new();
        ds.write_csv(&mut buf)?;
        output::write_atomic(&dir.join(format!("{stem}_probe{q}.csv")), &buf)?;
        let analysis = &report.probes.iter().find(|p| p.qubit == *q).expect("probe reported").analysis;
        let table = output::csv(
            &["length", "standard_mean", "standard_fit", "leakage_mean", "leakage_fit"],
            decay_curve_table(ds, analysis).into_iter().map(|r| {
                [
                    r.length.to_string(),
                    fmt_f64(r.standard_mean),
                    fmt_f64(r.standard_fit),
                    fmt_f64(r.leakage_mean),
                    fmt_f64(r.leakage_fit),
                ]
            }),
        )?;
        output::write_atomic(&dir.join(format!("{stem}_probe{q}_decay.csv")), &table)?;
    }
    if !data.focus.is_empty() {
        let mut buf = Vec::new();
        write_focus_csv(&data.focus, &mut buf)?;
        output::write_atomic(&dir.join(format!("{stem}_focus.csv")), &buf)?;
    }
    Ok(())
}

fn sweep_csv(rows: &[&SweepRow]) -> CliResult<Vec<u8>> {
    output::csv(
        &[
            "kind",
            "model",
            "gamma_t",
            "injected_error",
            "injected_leakage",
            "injected_seepage",
            "estimated_error",
            "estimated_error_std",
            "relative_error",
            "scattering_standard",
            "scattering_leakage",
            "noiseless_error",
            "noiseless_scattering_standard",
            "noiseless_scattering_leakage",
            "failures",
        ],
        rows.iter().map(|r| {
            vec![
                r.kind.name().to_string(),
                r.model.name().to_string(),
                fmt_f64(r.gamma_t),
                fmt_f64(r.injected_error),
                fmt_f64(r.injected_leakage),
                fmt_f64(r.injected_seepage),
                fmt_f64(r.estimated_error),
                fmt_f64(r.estimated_error_std),
                r.relative_error().map(fmt_f64).unwrap_or_default(),
                fmt_f64(r.scattering_standard),
                fmt_f64(r.scattering_leakage),
                fmt_f64(r.noiseless.average_error),
                fmt_f64(r.noiseless.scattering_standard),
                fmt_f64(r.noiseless.scattering_leakage),
                r.failures.to_string(),
            ]
        }),
    )
}

type ExperimentResult = mcmr_core::Result<(ExperimentReport, ExperimentData)>;

/// Runs every experiment concurrently and writes the result bundle.
pub fn run(campaign: &Campaign, out_dir: &Path) -> CliResult<Outcome> {
    let results: Vec<_> = campaign.experiments.par_iter().map(|cfg| (cfg, run_experiment(cfg))).collect();
    write_bundle(campaign, &results, out_dir)
}

fn write_bundle(
    campaign: &Campaign,
    results: &[(&ExperimentConfig, ExperimentResult)],
    out_dir: &Path,
) -> CliResult<Outcome> {
    let mut summary = Vec::new();
    let mut spam = Vec::new();
    let mut failed = Vec::new();
    for (cfg, res) in results {
        match res {
            Ok((report, data)) => {
                write_experiment(out_dir, report, data)?;
                summary.extend(summary_rows(report, campaign.measurement_time_s));
                for s in &report.spam {
                    spam.push(vec![
                        report.name.clone(),
                        s.qubit.to_string(),
                        s.measurement.to_string(),
                        s.error.map(fmt_f64).unwrap_or_default(),
                        s.error_sigma.map(fmt_f64).unwrap_or_default(),
                        fmt_f64(s.bright_fraction),
                        s.shots.to_string(),
                    ]);
                }
            }
            Err(e) => {
                eprintln!("experiment {:?} failed: {e}", cfg.name);
                summary.push(failed_row(cfg, &e.to_string()));
                failed.push(cfg.name.clone());
            }
        }
    }
    if !campaign.experiments.is_empty() {
        output::write_atomic(&out_dir.join(SUMMARY_FILE), &output::csv(&SUMMARY_HEADER, summary)?)?;
        let header = ["experiment", "qubit", "measurement", "error", "error_sigma", "bright_fraction", "shots"];
        output::write_atomic(&out_dir.join(SPAM_FILE), &output::csv(&header, spam)?)?;
    }

    if let Some(sw) = &campaign.sweep {
        match run_sweep(sw) {
            Ok(rows) => {
                output::write_atomic(&out_dir.join(SWEEP_FILE), &sweep_csv(&rows.iter().collect::<Vec<_>>())?)?;
                for &kind in &sw.kinds {
                    for &model in &sw.models {
                        let part: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == kind && r.model == model).collect();
                        let name = format!("sweep_{}_{}.csv", kind.name(), model.name());
                        output::write_atomic(&out_dir.join(name), &sweep_csv(&part)?)?;
                    }
                }
            }
            Err(e) => {
                eprintln!("sweep failed: {e}");
                failed.push("sweep".into());
            }
        }
    }
    Ok(Outcome { out_dir: out_dir.to_path_buf(), failed })
}

pub fn finish(outcome: &Outcome) -> CliResult<()> {
    if outcome.failed.is_empty() {
        eprintln!("results written to {}", outcome.out_dir.display());
        Ok(())
    } else {
        Err(CliError { code: EXIT_FIT, message: format!("failed: {}", outcome.failed.join(", ")) })
    }
}
