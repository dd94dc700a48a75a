//! Shot-level sampling of probe survival and of focus-qubit outcomes.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::dataset::{FocusRecord, RBDataset, RBRecord};
use super::sequence::RBSequence;
use super::spam::SpamParams;
use super::survival::SurvivalEngine;
use crate::channels::LeakageChannel;
use crate::error::{param, Error, Result};
use crate::par::map_indexed;
use crate::rng::{task_rng, TaskRng, DOMAIN_FOCUS, DOMAIN_SHOTS};

fn binomial(rng: &mut TaskRng, shots: u64, p: f64) -> Result<u64> {
    let d = Binomial::new(shots, p.clamp(0.0, 1.0)).map_err(|e| param(e.to_string()))?;
    Ok(d.sample(rng))
}

/// Draws dark/bright counts for every sequence from its exact outcome
/// probabilities. Sequence `i` uses shot stream `i`.
pub fn simulate_probe(
    ch: &LeakageChannel,
    spam: &SpamParams,
    sequences: &[RBSequence],
    shots: u64,
    seed: u64,
) -> Result<RBDataset> {
    if shots == 0 {
        return Err(param("shots must be >= 1"));
    }
    let engine = SurvivalEngine::new(ch, spam)?;
    let records: Vec<Result<RBRecord>> = map_indexed(sequences.len(), |i| {
        let s = &sequences[i];
        let [p_dark, _] = engine.outcome_probabilities(s);
        let mut rng = task_rng(seed, DOMAIN_SHOTS, i as u64);
        let dark = binomial(&mut rng, shots, p_dark)?;
        Ok(RBRecord {
            length: s.length,
            seq_id: s.seq_id,
            pauli: s.final_pauli,
            target_outcome: s.target_outcome,
            shots,
            dark_counts: dark,
            bright_counts: shots - dark,
        })
    });
    RBDataset::new(records.into_iter().collect::<Result<_>>()?)
}

/// Operation applied to focus qubits after each probe Clifford.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterleavedOp {
    Measure,
    Reset,
    XPi,
    RandomSu2,
}

/// Two-state Markov model of a focus qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FocusModel {
    /// `P(bright | dark)` at readout.
    pub readout_error_dark: f64,
    /// `P(dark | bright)` at readout, for an ion that stays bright.
    pub readout_error_bright: f64,
    /// Probability a bright ion is pumped dark during one measurement; it
    /// then reads dark and stays dark.
    pub bright_depump: f64,
    /// Probability a reset leaves the ion bright.
    pub reset_error: f64,
}

impl Default for FocusModel {
    fn default() -> Self {
        Self { readout_error_dark: 1e-3, readout_error_bright: 3e-3, bright_depump: 3e-3, reset_error: 1e-3 }
    }
}

impl FocusModel {
    pub fn validate(&self) -> Result<()> {
        for v in [self.readout_error_dark, self.readout_error_bright, self.bright_depump, self.reset_error] {
            if !(0.0..=1.0).contains(&v) {
                return Err(param("focus model probabilities must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Ideal outcome of each measurement in one slot, given the ideal state
/// entering it; returns the ideal state leaving it.
fn ideal_slot(ops: &[InterleavedOp], mut state: Option<u8>, out: &mut Vec<Option<u8>>) -> Option<u8> {
    for op in ops {
        match op {
            InterleavedOp::Measure => out.push(state),
            InterleavedOp::Reset => state = Some(0),
            InterleavedOp::XPi => state = state.map(|s| 1 - s),
            InterleavedOp::RandomSu2 => state = None,
        }
    }
    state
}

/// Per-shot simulation of focus qubits. For each sequence and qubit, every
/// `random_su2` draws a bright probability uniformly in `[0, 1]` once per
/// slot, shared by all shots.
pub fn simulate_focus(
    model: &FocusModel,
    ops: &[InterleavedOp],
    initial_state: u8,
    qubits: &[usize],
    sequences: &[RBSequence],
    shots: u64,
    seed: u64,
) -> Result<Vec<FocusRecord>> {
    model.validate()?;
    if initial_state > 1 {
        return Err(Error::Config("initial_state must be 0 or 1".into()));
    }
    if qubits.is_empty() || ops.is_empty() {
        return Ok(Vec::new());
    }
    let n_meas = ops.iter().filter(|o| **o == InterleavedOp::Measure).count();
    let n_su2 = ops.iter().filter(|o| **o == InterleavedOp::RandomSu2).count();
    let tasks = sequences.len() * qubits.len();
    let per_task: Vec<Vec<FocusRecord>> = map_indexed(tasks, |task| {
        let seq = &sequences[task / qubits.len()];
        let qubit = qubits[task % qubits.len()];
        let mut rng = task_rng(seed, DOMAIN_FOCUS, task as u64);
        let mut expected = Vec::with_capacity(seq.length * n_meas);
        let mut ideal = Some(initial_state);
        for _ in 0..seq.length {
            ideal = ideal_slot(ops, ideal, &mut expected);
        }
        let su2: Vec<f64> = (0..seq.length * n_su2).map(|_| rng.random::<f64>()).collect();
        let mut bright = vec![0u64; seq.length * n_meas];
        for _ in 0..shots {
            let mut state = initial_state;
            let (mut m, mut u) = (0, 0);
            for _ in 0..seq.length {
                for op in ops {
                    match op {
                        InterleavedOp::Measure => {
                            let reads_bright = if state == 1 {
                                if rng.random::<f64>() < model.bright_depump {
                                    state = 0;
                                    false
                                } else {
                                    rng.random::<f64>() >= model.readout_error_bright
                                }
                            } else {
                                rng.random::<f64>() < model.readout_error_dark
                            };
                            if reads_bright {
                                bright[m] += 1;
                            }
                            m += 1;
                        }
                        InterleavedOp::Reset => {
                            state = u8::from(rng.random::<f64>() < model.reset_error);
                        }
                        InterleavedOp::XPi => state = 1 - state,
                        InterleavedOp::RandomSu2 => {
                            state = u8::from(rng.random::<f64>() < su2[u]);
                            u += 1;
                        }
                    }
                }
            }
        }
        (0..seq.length * n_meas)
            .map(|i| FocusRecord {
                length: seq.length,
                seq_id: seq.seq_id,
                slot: i / n_meas,
                qubit,
                measurement: i % n_meas,
                expected: expected[i],
                shots,
                bright_counts: bright[i],
            })
            .collect()
    });
    Ok(per_task.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rb::sequence::generate_sequences;

    #[test]
    fn identity_channel_all_dark_targets_dark() {
        let seqs = generate_sequences(&[2, 5], 4, 3).unwrap();
        let ds = simulate_probe(&LeakageChannel::identity(), &SpamParams::perfect(), &seqs, 50, 1).unwrap();
        for r in &ds.records {
            assert_eq!(r.target_counts(), 50);
        }
    }

    #[test]
    fn probe_simulation_is_deterministic() {
        let seqs = generate_sequences(&[2, 11], 4, 3).unwrap();
        let ch = crate::channels::depolarizing_computational(0.05).unwrap();
        let a = simulate_probe(&ch, &SpamParams::perfect(), &seqs, 100, 9).unwrap();
        let b = simulate_probe(&ch, &SpamParams::perfect(), &seqs, 100, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ideal_focus_has_no_errors() {
        let perfect =
            FocusModel { readout_error_dark: 0.0, readout_error_bright: 0.0, bright_depump: 0.0, reset_error: 0.0 };
        let seqs = generate_sequences(&[3], 2, 0).unwrap();
        let ops = [InterleavedOp::Measure, InterleavedOp::Reset, InterleavedOp::XPi];
        let recs = simulate_focus(&perfect, &ops, 1, &[1, 3], &seqs, 20, 4).unwrap();
        assert_eq!(recs.len(), 2 * 2 * 3);
        assert!(recs.iter().all(|r| r.errors() == Some(0)));
    }

    #[test]
    fn random_su2_has_no_expected_outcome() {
        let seqs = generate_sequences(&[2], 2, 0).unwrap();
        let ops = [
            InterleavedOp::RandomSu2,
            InterleavedOp::Measure,
            InterleavedOp::Reset,
            InterleavedOp::Measure,
            InterleavedOp::Reset,
        ];
        let recs = simulate_focus(&FocusModel::default(), &ops, 0, &[1], &seqs, 10, 4).unwrap();
        assert!(recs.iter().filter(|r| r.measurement == 0).all(|r| r.expected.is_none()));
        assert!(recs.iter().filter(|r| r.measurement == 1).all(|r| r.expected == Some(0)));
    }
}
