//! Benchmarking experiments: configuration, the full simulate-and-analyse
//! pipeline, and mid-circuit SPAM reports for focus qubits.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::analysis::{analyze, AnalysisResult};
use super::bootstrap::MIN_RESAMPLES;
use super::dataset::{FocusRecord, RBDataset};
use super::sequence::{generate_sequences, RBSequence};
use super::simulate::{simulate_focus, simulate_probe, FocusModel, InterleavedOp};
use super::spam::SpamParams;
use super::sweep::SweepConfig;
use crate::channels::{
    average_infidelity, depolarizing_computational, leakage_seepage, ChannelConfig, ChannelKind, LeakageChannel,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, DOMAIN_BOOTSTRAP, DOMAIN_FOCUS, DOMAIN_SEQUENCES, DOMAIN_SHOTS, DOMAIN_TRIALS};

fn default_lengths() -> Vec<usize> {
    vec![2, 11, 81]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    pub shots: u64,
    pub resamples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { lengths: default_lengths(), sequences_per_length: 40, shots: 100, resamples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub focus_qubits: Vec<usize>,
    pub probe_qubits: Vec<usize>,
    /// Focus-qubit initial state, 0 (dark) or 1 (bright).
    #[serde(default)]
    pub initial_state: u8,
    #[serde(default)]
    pub interleaved_ops: Vec<InterleavedOp>,
    /// Crosstalk channels hitting every probe in each slot, in order.
    #[serde(default)]
    pub channels: Vec<ChannelConfig>,
    /// Per-probe replacements for `channels`.
    #[serde(default)]
    pub probe_channels: BTreeMap<usize, Vec<ChannelConfig>>,
    /// Depolarizing strength of each probe Clifford.
    #[serde(default)]
    pub gate_error: f64,
    /// Per-probe replacements for `gate_error`.
    #[serde(default)]
    pub probe_gate_errors: BTreeMap<usize, f64>,
    #[serde(default)]
    pub spam: SpamParams,
    #[serde(default)]
    pub focus_model: FocusModel,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub seed: u64,
    /// Initial-guess `L/S` for the leakage fit; derived from the channels
    /// under balanced polarization when absent.
    #[serde(default)]
    pub expected_ratio: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(format!("{}: {m}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::Config("experiment name must be nonempty".into()));
        }
        if self.probe_qubits.is_empty() {
            return cfg("at least one probe qubit is required".into());
        }
        let probes: BTreeSet<_> = self.probe_qubits.iter().collect();
        let focus: BTreeSet<_> = self.focus_qubits.iter().collect();
        if probes.len() != self.probe_qubits.len() || focus.len() != self.focus_qubits.len() {
            return cfg("qubit lists contain duplicates".into());
        }
        if !probes.is_disjoint(&focus) {
            return cfg("a qubit cannot be both focus and probe".into());
        }
        if self.initial_state > 1 {
            return cfg("initial_state must be 0 or 1".into());
        }
        if self.focus_qubits.is_empty() != self.interleaved_ops.is_empty() {
            return cfg("interleaved operations need focus qubits and vice versa".into());
        }
        for q in self.probe_channels.keys().chain(self.probe_gate_errors.keys()) {
            if !probes.contains(q) {
                return cfg(format!("per-probe override names qubit {q}, which is not a probe"));
            }
        }
        for p in std::iter::once(&self.gate_error).chain(self.probe_gate_errors.values()) {
            if !(0.0..=1.0).contains(p) {
                return cfg("gate errors must lie in [0, 1]".into());
            }
        }
        let s = &self.sampling;
        if s.lengths.len() < 3 {
            return cfg("at least 3 sequence lengths are required".into());
        }
        if s.sequences_per_length == 0 || !s.sequences_per_length.is_multiple_of(2) {
            return cfg("sequences_per_length must be even and positive".into());
        }
        if s.shots == 0 {
            return cfg("shots must be >= 1".into());
        }
        if s.resamples < MIN_RESAMPLES {
            return cfg(format!("resamples must be >= {MIN_RESAMPLES}"));
        }
        self.spam.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.focus_model.validate().map_err(|e| Error::Config(e.to_string()))?;
        for p in &self.probe_qubits {
            self.probe_channel(*p).map_err(|e| Error::Config(format!("{}: {e}", self.name)))?;
        }
        Ok(())
    }

    fn channel_list(&self, probe: usize) -> &[ChannelConfig] {
        self.probe_channels.get(&probe).map(Vec::as_slice).unwrap_or(&self.channels)
    }

    /// Per-slot error on `probe`: gate depolarization, then each crosstalk
    /// channel in order.
    pub fn probe_channel(&self, probe: usize) -> Result<LeakageChannel> {
        let p = self.probe_gate_errors.get(&probe).copied().unwrap_or(self.gate_error);
        let mut ch = depolarizing_computational(p)?;
        for c in self.channel_list(probe) {
            ch = ch.then(&c.build()?)?;
        }
        Ok(ch)
    }

    /// `L/S` of the probe's channels with every polarization balanced.
    pub fn nominal_ratio(&self, probe: usize) -> Result<f64> {
        if let Some(r) = self.expected_ratio {
            return Ok(r);
        }
        let mut ch = LeakageChannel::identity();
        for c in self.channel_list(probe) {
            let balanced = ChannelConfig { polarization: [1.0 / 3.0; 3], ..c.clone() };
            ch = ch.then(&balanced.build()?)?;
        }
        let (l, s) = leakage_seepage(&ch);
        Ok(if s > 0.0 { l / s } else { 1.0 })
    }
}

/// Measurement duration used to convert `gamma t` estimates to rates (s).
pub const MEASUREMENT_TIME_S: f64 = 120e-6;

fn default_measurement_time() -> f64 {
    MEASUREMENT_TIME_S
}

/// A list of experiments run together, plus an optional polarization sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
    /// Replaces every experiment's sampling when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
    /// Master seed; experiment `i` then uses a seed derived from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_measurement_time")]
    pub measurement_time_s: f64,
}

impl Campaign {
    /// Parses either a campaign or a single experiment.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // A lone experiment is recognised by its name field.
        let campaign = if value.get("name").is_none() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(Campaign::single)
        }
        .map_err(|e| Error::Config(e.to_string()))?;
        campaign.validate()?;
        Ok(campaign)
    }

    pub fn single(experiment: ExperimentConfig) -> Self {
        Campaign {
            experiments: vec![experiment],
            sampling: None,
            seed: None,
            output_dir: None,
            sweep: None,
            measurement_time_s: MEASUREMENT_TIME_S,
        }
    }

    /// Experiments with the shared sampling and seed applied.
    pub fn resolved_experiments(&self) -> Vec<ExperimentConfig> {
        self.experiments
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut e = e.clone();
                if let Some(s) = &self.sampling {
                    e.sampling = s.clone();
                }
                if let Some(seed) = self.seed {
                    e.seed = derive_seed(seed, DOMAIN_TRIALS, i as u64);
                }
                e
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiments.is_empty() && self.sweep.is_none() {
            return Err(Error::Config("campaign has neither experiments nor a sweep".into()));
        }
        if !(self.measurement_time_s > 0.0) {
            return Err(Error::Config("measurement_time_s must be > 0".into()));
        }
        if let Some(sw) = &self.sweep {
            sw.validate()?;
        }
        let mut names = BTreeSet::new();
        for e in &self.resolved_experiments() {
            if !names.insert(e.name.as_str()) {
                return Err(Error::Config(format!("duplicate experiment name {:?}", e.name)));
            }
            e.validate()?;
        }
        Ok(())
    }
}

/// The eight experiments of the MCMR benchmarking campaign. Probe 0 sits in
/// zone 1 and probe 2 in zone 2; injected scattering follows the zone
/// depumping measurements, and the per-zone gate error reproduces the
/// control error rates.
pub fn campaign_presets() -> Campaign {
    use InterleavedOp::*;
    let zone_gt = [(0usize, 0.75e-3, 4e-5), (2usize, 2.7e-3, 3e-5)];
    let per_probe = |parts: &[ChannelKind]| -> BTreeMap<usize, Vec<ChannelConfig>> {
        zone_gt
            .iter()
            .map(|&(q, meas, reset)| {
                let list = parts
                    .iter()
                    .map(|k| match k {
                        ChannelKind::Measurement => ChannelConfig::measurement(meas),
                        ChannelKind::Reset => ChannelConfig::reset(reset),
                    })
                    .collect();
                (q, list)
            })
            .collect()
    };
    let base =
        |name: &str, focus: Vec<usize>, initial: u8, ops: Vec<InterleavedOp>, parts: &[ChannelKind], seed: u64| {
            ExperimentConfig {
                name: name.into(),
                focus_qubits: focus,
                probe_qubits: vec![0, 2],
                initial_state: initial,
                interleaved_ops: ops,
                channels: Vec::new(),
                probe_channels: if parts.is_empty() { BTreeMap::new() } else { per_probe(parts) },
                gate_error: 0.0,
                probe_gate_errors: BTreeMap::from([(0, 3.8e-4), (2, 6.2e-4)]),
                spam: SpamParams::default(),
                focus_model: FocusModel::default(),
                sampling: Sampling::default(),
                seed,
                expected_ratio: None,
            }
        };
    use ChannelKind::{Measurement as M, Reset as R};
    Campaign {
        experiments: vec![
            base("Control", vec![], 0, vec![], &[], 1),
            base("Reset", vec![1], 0, vec![Reset], &[R], 2),
            base("Dark measurement", vec![1], 0, vec![Measure], &[M], 3),
            base("Bright measurement", vec![1], 1, vec![Measure], &[M], 4),
            base("Dark measurement & reset (1)", vec![1, 3], 0, vec![Measure, Reset], &[M, R], 5),
            base("Dark measurement & reset (2)", vec![1, 3], 0, vec![Measure, Reset], &[M, R], 6),
            base("Bright measurement & reset", vec![1, 3], 1, vec![Measure, Reset, XPi], &[M, R], 7),
            base("Bleed-through", vec![1, 3], 0, vec![RandomSu2, Measure, Reset, Measure, Reset], &[M, R, M, R], 8),
        ],
        sampling: None,
        seed: None,
        output_dir: None,
        sweep: None,
        measurement_time_s: MEASUREMENT_TIME_S,
    }
}

/// Mid-circuit SPAM error for one focus qubit and one measurement position
/// in the slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamReport {
    pub qubit: usize,
    pub measurement: usize,
    /// Pooled error rate, absent when the ideal outcome is undefined.
    pub error: Option<f64>,
    pub error_sigma: Option<f64>,
    /// Fraction of bright outcomes, pooled.
    pub bright_fraction: f64,
    pub shots: u64,
    pub per_length: Vec<SpamAtLength>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamAtLength {
    pub length: usize,
    pub error: Option<f64>,
    pub error_sigma: Option<f64>,
    pub shots: u64,
}

fn rate_and_sigma(errors: u64, shots: u64) -> (f64, f64) {
    let p = errors as f64 / shots as f64;
    (p, (p * (1.0 - p) / shots as f64).sqrt())
}

/// Aggregates focus records per (qubit, measurement), pooled and per length.
pub fn spam_reports(records: &[FocusRecord]) -> Vec<SpamReport> {
    #[derive(Default)]
    struct Acc {
        shots: u64,
        bright: u64,
        scored_shots: u64,
        errors: u64,
        per_length: BTreeMap<usize, (u64, u64)>,
    }
    let mut acc: BTreeMap<(usize, usize), Acc> = BTreeMap::new();
    for r in records {
        let a = acc.entry((r.qubit, r.measurement)).or_default();
        a.shots += r.shots;
        a.bright += r.bright_counts;
        if let Some(e) = r.errors() {
            a.scored_shots += r.shots;
            a.errors += e;
            let l = a.per_length.entry(r.length).or_default();
            l.0 += e;
            l.1 += r.shots;
        }
    }
    acc.into_iter()
        .map(|((qubit, measurement), a)| {
            let pooled = (a.scored_shots > 0).then(|| rate_and_sigma(a.errors, a.scored_shots));
            SpamReport {
                qubit,
                measurement,
                error: pooled.map(|p| p.0),
                error_sigma: pooled.map(|p| p.1),
                bright_fraction: a.bright as f64 / a.shots as f64,
                shots: a.shots,
                per_length: a
                    .per_length
                    .into_iter()
                    .map(|(length, (e, n))| {
                        let (p, s) = rate_and_sigma(e, n);
                        SpamAtLength { length, error: Some(p), error_sigma: Some(s), shots: n }
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Properties of the channel actually injected on a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectedErrors {
    pub average_error: f64,
    pub decay_base: f64,
    pub leakage: f64,
    pub seepage: f64,
}

impl InjectedErrors {
    pub fn of(ch: &LeakageChannel) -> Self {
        let (leakage, seepage) = leakage_seepage(ch);
        Self { average_error: average_infidelity(ch), decay_base: ch.pauli_decay(), leakage, seepage }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub qubit: usize,
    pub injected: InjectedErrors,
    pub expected_ratio: f64,
    /// Seed handed to the bootstrap; refitting the probe's dataset with it
    /// reproduces `analysis` exactly.
    pub bootstrap_seed: u64,
    pub analysis: AnalysisResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub focus_qubits: Vec<usize>,
    pub probe_qubits: Vec<usize>,
    pub initial_state: u8,
    pub interleaved_ops: Vec<InterleavedOp>,
    pub probes: Vec<ProbeReport>,
    pub spam: Vec<SpamReport>,
}

/// Raw data behind a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentData {
    pub probes: Vec<(usize, RBDataset)>,
    pub focus: Vec<FocusRecord>,
}

/// Generates sequences, simulates probes and focus qubits, fits and
/// bootstraps. Each probe runs its own random sequences.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentReport, ExperimentData)> {
    cfg.validate()?;
    let s = &cfg.sampling;
    let mut probes = Vec::new();
    let mut data = Vec::new();
    let mut first_sequences: Option<Vec<RBSequence>> = None;
    for (pi, &q) in cfg.probe_qubits.iter().enumerate() {
        let idx = pi as u64;
        let seqs =
            generate_sequences(&s.lengths, s.sequences_per_length, derive_seed(cfg.seed, DOMAIN_SEQUENCES, idx))?;
        let ch = cfg.probe_channel(q)?;
        let ds = simulate_probe(&ch, &cfg.spam, &seqs, s.shots, derive_seed(cfg.seed, DOMAIN_SHOTS, idx))?;
        let ratio = cfg.nominal_ratio(q)?;
        let bootstrap_seed = derive_seed(cfg.seed, DOMAIN_BOOTSTRAP, idx);
        let analysis = analyze(&ds, ratio, s.resamples, bootstrap_seed)?;
        probes.push(ProbeReport {
            qubit: q,
            injected: InjectedErrors::of(&ch),
            expected_ratio: ratio,
            bootstrap_seed,
            analysis,
        });
        data.push((q, ds));
        first_sequences.get_or_insert(seqs);
    }
    let focus = simulate_focus(
        &cfg.focus_model,
        &cfg.interleaved_ops,
        cfg.initial_state,
        &cfg.focus_qubits,
        first_sequences.as_deref().unwrap_or(&[]),
        s.shots,
        derive_seed(cfg.seed, DOMAIN_FOCUS, 0),
    )?;
    let report = ExperimentReport {
        name: cfg.name.clone(),
        focus_qubits: cfg.focus_qubits.clone(),
        probe_qubits: cfg.probe_qubits.clone(),
        initial_state: cfg.initial_state,
        interleaved_ops: cfg.interleaved_ops.clone(),
        probes,
        spam: spam_reports(&focus),
    };
    Ok((report, ExperimentData { probes: data, focus }))
}

/// One row of a plot-ready decay table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCurveRow {
    pub length: usize,
    pub standard_mean: f64,
    pub standard_fit: f64,
    pub leakage_mean: f64,
    pub leakage_fit: f64,
}

pub fn decay_curve_table(ds: &RBDataset, a: &AnalysisResult) -> Vec<DecayCurveRow> {
    ds.standard_points()
        .into_iter()
        .zip(ds.leakage_points())
        .map(|((length, sm), (_, lm))| {
            let l = length as i32;
            DecayCurveRow {
                length,
                standard_mean: sm,
                standard_fit: a.standard.amplitude * a.standard.decay_base.powi(l) + 0.5,
                leakage_mean: lm,
                leakage_fit: a.leakage_fit.b0 * a.leakage_fit.t_minus.powi(l + 1) + a.leakage_fit.c0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str, ops: Vec<InterleavedOp>, initial: u8, channels: Vec<ChannelConfig>) -> ExperimentConfig {
        ExperimentConfig {
            name: name.into(),
            focus_qubits: if ops.is_empty() { vec![] } else { vec![1] },
            probe_qubits: vec![0],
            initial_state: initial,
            interleaved_ops: ops,
            channels,
            probe_channels: BTreeMap::new(),
            gate_error: 0.0,
            probe_gate_errors: BTreeMap::new(),
            spam: SpamParams::perfect(),
            focus_model: FocusModel::default(),
            sampling: Sampling { lengths: vec![2, 11, 81], sequences_per_length: 10, shots: 50, resamples: 100 },
            seed: 7,
            expected_ratio: None,
        }
    }

    #[test]
    fn config_rejects_inconsistent_ops() {
        let mut c = small("x", vec![InterleavedOp::Measure], 0, vec![]);
        c.focus_qubits.clear();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = small("x", vec![], 0, vec![]);
        c.validate().unwrap();
    }

    #[test]
    fn config_json_round_trip() {
        let c = small("Dark measurement", vec![InterleavedOp::Measure], 0, vec![ChannelConfig::measurement(2.7e-3)]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert!(ExperimentConfig::from_json(r#"{"name":"a","probe_qubits":[0],"bogus":1}"#).is_err());
    }

    #[test]
    fn nominal_ratios() {
        let m = small("m", vec![InterleavedOp::Measure], 0, vec![ChannelConfig::measurement(1e-3)]);
        assert!((m.nominal_ratio(0).unwrap() - 1.0).abs() < 1e-9);
        let r = small("r", vec![InterleavedOp::Reset], 0, vec![ChannelConfig::reset(1e-3)]);
        assert!(r.nominal_ratio(0).unwrap() < 0.5);
    }

    #[test]
    fn presets_are_valid_and_round_trip() {
        let c = campaign_presets();
        assert_eq!(c.experiments.len(), 8);
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(Campaign::from_json(&text).unwrap(), c);
        let single = serde_json::to_string(&c.experiments[2]).unwrap();
        assert_eq!(Campaign::from_json(&single).unwrap().experiments[0], c.experiments[2]);
    }

    #[test]
    fn bright_spam_exceeds_dark_spam() {
        let dark = small("dark", vec![InterleavedOp::Measure], 0, vec![]);
        let bright = small("bright", vec![InterleavedOp::Measure], 1, vec![]);
        let (d, _) = run_experiment(&dark).unwrap();
        let (b, _) = run_experiment(&bright).unwrap();
        assert!(b.spam[0].error.unwrap() > d.spam[0].error.unwrap());
    }
}
