//! Polarization sweeps: estimated against injected error for each crosstalk
//! kind, polarization model and scattering strength.

use serde::{Deserialize, Serialize};

use super::analysis::{fit_all, fit_leakage, fit_standard, scattering_estimates, FitQuantities};
use super::experiment::Sampling;
use super::sequence::generate_sequences;
use super::simulate::simulate_probe;
use super::spam::SpamParams;
use super::survival::GroupAverage;
use crate::channels::{average_infidelity, leakage_seepage, ChannelConfig, ChannelKind, PolarizationModel};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::rng::{derive_seed, DOMAIN_SEQUENCES, DOMAIN_SHOTS, DOMAIN_TRIALS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kinds: Vec<ChannelKind>,
    pub models: Vec<PolarizationModel>,
    pub gamma_ts: Vec<f64>,
    #[serde(default = "default_branching")]
    pub dark_branching: f64,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub spam: SpamParams,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_branching() -> f64 {
    1.0 / 3.0
}

/// One (kind, model, gamma t) point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: ChannelKind,
    pub model: PolarizationModel,
    pub gamma_t: f64,
    pub injected_error: f64,
    pub injected_leakage: f64,
    pub injected_seepage: f64,
    /// Mean and standard deviation over sampled trials.
    pub estimated_error: f64,
    pub estimated_error_std: f64,
    pub scattering_standard: f64,
    pub scattering_leakage: f64,
    /// Estimates from fits to the exact, noise-free decay curves.
    pub noiseless: FitQuantities,
    pub failures: usize,
}

impl SweepRow {
    pub fn relative_error(&self) -> Option<f64> {
        (self.injected_error > 0.0).then(|| (self.estimated_error - self.injected_error).abs() / self.injected_error)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, v.sqrt())
}

fn channel_config(kind: ChannelKind, model: PolarizationModel, gamma_t: f64, b: f64) -> ChannelConfig {
    ChannelConfig { kind, gamma_t, polarization: model.weights().as_array(), dark_branching: b }
}

/// `L/S` of the balanced model, used as the fit's initial guess.
pub fn nominal_ratio(kind: ChannelKind, gamma_t: f64, dark_branching: f64) -> Result<f64> {
    let ch = channel_config(kind, PolarizationModel::Balanced, gamma_t, dark_branching).build()?;
    let (l, s) = leakage_seepage(&ch);
    Ok(if s > 0.0 { l / s } else { 1.0 })
}

/// Fits the exact group-averaged curves at the sampled lengths.
pub fn noiseless_estimates(
    cfg: &ChannelConfig,
    spam: &SpamParams,
    lengths: &[usize],
    expected_ratio: f64,
) -> Result<FitQuantities> {
    let ch = cfg.build()?;
    let avg = GroupAverage::new(&ch, spam)?;
    let std = fit_standard(&lengths.iter().map(|&l| (l, avg.standard(l))).collect::<Vec<_>>())?;
    let leak = fit_leakage(&lengths.iter().map(|&l| (l, avg.leakage(l))).collect::<Vec<_>>(), expected_ratio)?;
    let sc = scattering_estimates(std.decay_base, leak.t_minus);
    Ok(FitQuantities {
        amplitude: std.amplitude,
        decay_base: std.decay_base,
        b0: leak.b0,
        c0: leak.c0,
        t_minus: leak.t_minus,
        leakage: leak.leakage,
        seepage: leak.seepage,
        average_error: super::analysis::average_error(std.decay_base, leak.leakage)?,
        scattering_standard: sc.standard,
        scattering_leakage: sc.leakage,
    })
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() || self.models.is_empty() || self.gamma_ts.is_empty() || self.trials == 0 {
            return Err(Error::Config("sweep needs kinds, models, gamma_ts and trials >= 1".into()));
        }
        if self.gamma_ts.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Config("sweep gamma_ts must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.dark_branching) {
            return Err(Error::Config("dark_branching must lie in [0, 1]".into()));
        }
        let s = &self.sampling;
        if s.lengths.len() < 3 || s.sequences_per_length == 0 || s.shots == 0 {
            return Err(Error::Config("sweep sampling needs >= 3 lengths, sequences and shots".into()));
        }
        Ok(())
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let s = &cfg.sampling;
    let mut rows = Vec::new();
    let mut point = 0u64;
    for &kind in &cfg.kinds {
        for &model in &cfg.models {
            for &gamma_t in &cfg.gamma_ts {
                let cc = channel_config(kind, model, gamma_t, cfg.dark_branching);
                let ch = cc.build()?;
                let (l, sp) = leakage_seepage(&ch);
                let ratio = nominal_ratio(kind, gamma_t, cfg.dark_branching)?;
                let base = derive_seed(cfg.seed, DOMAIN_TRIALS, point);
                point += 1;
                let fits: Vec<Option<FitQuantities>> = map_indexed(cfg.trials, |t| {
                    let t = t as u64;
                    let seqs =
                        generate_sequences(&s.lengths, s.sequences_per_length, derive_seed(base, DOMAIN_SEQUENCES, t))
                            .ok()?;
                    let ds = simulate_probe(&ch, &cfg.spam, &seqs, s.shots, derive_seed(base, DOMAIN_SHOTS, t)).ok()?;
                    fit_all(&ds, ratio).ok()
                });
                let ok: Vec<FitQuantities> = fits.into_iter().flatten().collect();
                if ok.is_empty() {
                    return Err(Error::Fit {
                        message: format!("every trial failed at {kind:?}/{model:?}/{gamma_t}"),
                        residuals: vec![],
                    });
                }
                let (err_m, err_s) = mean_std(&ok.iter().map(|q| q.average_error).collect::<Vec<_>>());
                rows.push(SweepRow {
                    kind,
                    model,
                    gamma_t,
                    injected_error: average_infidelity(&ch),
                    injected_leakage: l,
                    injected_seepage: sp,
                    estimated_error: err_m,
                    estimated_error_std: err_s,
                    scattering_standard: mean_std(&ok.iter().map(|q| q.scattering_standard).collect::<Vec<_>>()).0,
                    scattering_leakage: mean_std(&ok.iter().map(|q| q.scattering_leakage).collect::<Vec<_>>()).0,
                    noiseless: noiseless_estimates(&cc, &cfg.spam, &s.lengths, ratio)?,
                    failures: cfg.trials - ok.len(),
                });
            }
        }
    }
    Ok(rows)
}
