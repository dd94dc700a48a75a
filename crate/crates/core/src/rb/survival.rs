//! Survival probabilities: exact superoperator contraction per sequence,
//! exact group averages, and the closed-form decay law.

use nalgebra::{SMatrix, SVector};

use super::sequence::RBSequence;
use super::spam::SpamParams;
use crate::channels::{twirl_superop, LeakageChannel, TwirledChannel};
use crate::clifford::{self, Pauli, GROUP_ORDER};
use crate::error::{param, Error, Result};
use crate::liouville::{SuperOperator, SuperVector, IDX_ID_C, IDX_ID_E, IDX_X_C, IDX_Z_C};

/// Superoperators of Hermiticity-preserving maps are real in the Hermitian
/// basis; simulation runs on the real parts.
pub type RealSuper = SMatrix<f64, 16, 16>;
pub type RealVec = SVector<f64, 16>;

const IMAG_TOLERANCE: f64 = 1e-9;

pub fn real_superop(s: &SuperOperator) -> Result<RealSuper> {
    let im = s.max_imaginary();
    if im > IMAG_TOLERANCE {
        return Err(Error::Representation(format!("superoperator has imaginary part {im:.3e}")));
    }
    Ok(s.0.map(|z| z.re))
}

pub fn real_vector(v: &SuperVector) -> Result<RealVec> {
    let im = v.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if im > IMAG_TOLERANCE {
        return Err(Error::Representation(format!("supervector has imaginary part {im:.3e}")));
    }
    Ok(v.0.map(|z| z.re))
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Precomputed `Λ D_g` for every Clifford, plus SPAM vectors.
#[derive(Debug, Clone)]
pub struct SurvivalEngine {
    steps: Vec<RealSuper>,
    gates: Vec<RealSuper>,
    prep: RealVec,
    effects: [RealVec; 2],
}

impl SurvivalEngine {
    pub fn new(ch: &LeakageChannel, spam: &SpamParams) -> Result<Self> {
        spam.validate()?;
        let lambda = real_superop(ch.superop())?;
        let gates: Vec<RealSuper> =
            (0..GROUP_ORDER).map(|g| real_superop(clifford::superop(g))).collect::<Result<_>>()?;
        let steps = gates.iter().map(|d| lambda * d).collect();
        Ok(Self {
            steps,
            gates,
            prep: real_vector(&spam.prepared_state())?,
            effects: [real_vector(&spam.effect(0))?, real_vector(&spam.effect(1))?],
        })
    }

    /// State after the sequence and its inversion; no error follows the
    /// inversion gate.
    pub fn final_state(&self, cliffords: &[usize], inversion: usize) -> RealVec {
        let mut state = self.prep;
        for g in cliffords {
            state = self.steps[*g] * state;
        }
        self.gates[inversion] * state
    }

    /// `(P(dark), P(bright))` at the end of the sequence.
    pub fn outcome_probabilities(&self, seq: &RBSequence) -> [f64; 2] {
        let s = self.final_state(&seq.cliffords, seq.inversion);
        [clamp_probability(self.effects[0].dot(&s)), clamp_probability(self.effects[1].dot(&s))]
    }

    pub fn survival(&self, seq: &RBSequence) -> f64 {
        self.outcome_probabilities(seq)[seq.target_outcome as usize]
    }
}

/// Probability of the sequence's target outcome.
pub fn survival_analytic(ch: &LeakageChannel, seq: &RBSequence, spam: &SpamParams) -> Result<f64> {
    Ok(SurvivalEngine::new(ch, spam)?.survival(seq))
}

pub const MAX_EXACT_LENGTH: usize = 3;

/// Average of outcome `k` over all `24^length` sequences ending on `pauli`.
/// Only offered for `length <= 3`.
pub fn exact_sequence_average(
    ch: &LeakageChannel,
    spam: &SpamParams,
    length: usize,
    pauli: Pauli,
    outcome: u8,
) -> Result<f64> {
    if length > MAX_EXACT_LENGTH {
        return Err(param(format!("exact enumeration limited to length <= {MAX_EXACT_LENGTH}")));
    }
    let engine = SurvivalEngine::new(ch, spam)?;
    let effect = engine.effects[outcome as usize];
    let total = GROUP_ORDER.pow(length as u32);
    let mut seq = vec![0usize; length];
    let mut sum = 0.0;
    for mut code in 0..total {
        for slot in seq.iter_mut() {
            *slot = code % GROUP_ORDER;
            code /= GROUP_ORDER;
        }
        let inv = clifford::inversion_for(&seq, pauli);
        sum += effect.dot(&engine.final_state(&seq, inv));
    }
    Ok(sum / total as f64)
}

/// Exact sequence averages for any channel through the explicit twirl
/// `p_{j,k}(l) = <<E_k| P_j T^l |rho>>`.
#[derive(Debug, Clone)]
pub struct GroupAverage {
    twirled: RealSuper,
    paulis: [RealSuper; 4],
    prep: RealVec,
    effects: [RealVec; 2],
}

impl GroupAverage {
    pub fn new(ch: &LeakageChannel, spam: &SpamParams) -> Result<Self> {
        spam.validate()?;
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
            .map(|p| real_superop(clifford::superop(clifford::pauli_element(p))));
        let [a, b, c, d] = paulis;
        Ok(Self {
            twirled: real_superop(&twirl_superop(ch))?,
            paulis: [a?, b?, c?, d?],
            prep: real_vector(&spam.prepared_state())?,
            effects: [real_vector(&spam.effect(0))?, real_vector(&spam.effect(1))?],
        })
    }

    fn state(&self, length: usize) -> RealVec {
        let mut s = self.prep;
        for _ in 0..length {
            s = self.twirled * s;
        }
        s
    }

    pub fn survival(&self, pauli: Pauli, outcome: u8, length: usize) -> f64 {
        let s = self.paulis[pauli.index()] * self.state(length);
        self.effects[outcome as usize].dot(&s)
    }

    /// Outcome-selected average `¼ Σ_j p_{j,k(j)}`.
    pub fn standard(&self, length: usize) -> f64 {
        Pauli::ALL.iter().map(|p| self.survival(*p, p.target_outcome(), length)).sum::<f64>() / 4.0
    }

    /// Dark-outcome average `¼ Σ_j p_{j,0}`.
    pub fn leakage(&self, length: usize) -> f64 {
        Pauli::ALL.iter().map(|p| self.survival(*p, 0, length)).sum::<f64>() / 4.0
    }
}

/// Closed-form decay `p_{j,k}(l) = A_{j,k} r^l + B_k t_-^l + C_k`, with
/// `B_k` the weight on the decaying leakage eigenvector and `C_k` the weight
/// on the stationary one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPrediction {
    pub decay_base: f64,
    pub t_minus: f64,
    /// `A[j][k]`.
    pub a: [[f64; 2]; 4],
    pub b: [f64; 2],
    pub c: [f64; 2],
}

impl DecayPrediction {
    pub fn new(tw: &TwirledChannel, spam: &SpamParams) -> Result<Self> {
        spam.validate()?;
        let rho = real_vector(&spam.prepared_state())?;
        let effects = [real_vector(&spam.effect(0))?, real_vector(&spam.effect(1))?];
        let mut pauli_part = RealVec::zeros();
        for i in IDX_X_C..=IDX_Z_C {
            pauli_part[i] = rho[i];
        }
        let mut a = [[0.0; 2]; 4];
        for p in Pauli::ALL {
            let d = real_superop(clifford::superop(clifford::pauli_element(p)))?;
            let moved = d * pauli_part;
            for k in 0..2 {
                a[p.index()][k] = effects[k].dot(&moved);
            }
        }
        let (x, y) = (rho[IDX_ID_C], rho[IDX_ID_E]);
        let (l, s) = (tw.leakage, tw.seepage);
        let (minus, plus) = if l + s > 0.0 {
            let m = (l * x - s * y) / (l + s);
            ((m, -m), (s * (x + y) / (l + s), l * (x + y) / (l + s)))
        } else {
            ((0.0, 0.0), (x, y))
        };
        let mut b = [0.0; 2];
        let mut c = [0.0; 2];
        for k in 0..2 {
            b[k] = effects[k][IDX_ID_C] * minus.0 + effects[k][IDX_ID_E] * minus.1;
            c[k] = effects[k][IDX_ID_C] * plus.0 + effects[k][IDX_ID_E] * plus.1;
        }
        Ok(Self { decay_base: tw.decay_base, t_minus: tw.t_minus, a, b, c })
    }

    pub fn survival(&self, pauli: Pauli, outcome: u8, length: usize) -> f64 {
        let k = outcome as usize;
        let l = length as i32;
        self.a[pauli.index()][k] * self.decay_base.powi(l) + self.b[k] * self.t_minus.powi(l) + self.c[k]
    }

    /// `Ā = ¼ (A_{0,0} + A_{1,1} + A_{2,1} + A_{3,0})`.
    pub fn standard_amplitude(&self) -> f64 {
        Pauli::ALL.iter().map(|p| self.a[p.index()][p.target_outcome() as usize]).sum::<f64>() / 4.0
    }

    pub fn standard(&self, length: usize) -> f64 {
        Pauli::ALL.iter().map(|p| self.survival(*p, p.target_outcome(), length)).sum::<f64>() / 4.0
    }

    pub fn leakage(&self, length: usize) -> f64 {
        Pauli::ALL.iter().map(|p| self.survival(*p, 0, length)).sum::<f64>() / 4.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing_computational, twirl};
    use crate::rb::sequence::generate_sequences;

    #[test]
    fn identity_channel_survives() {
        let engine = SurvivalEngine::new(&LeakageChannel::identity(), &SpamParams::perfect()).unwrap();
        for s in generate_sequences(&[1, 4, 20], 6, 1).unwrap() {
            assert!((engine.survival(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_matches_closed_form() {
        let p = 0.02;
        let ch = depolarizing_computational(p).unwrap();
        let engine = SurvivalEngine::new(&ch, &SpamParams::perfect()).unwrap();
        // Depolarizing noise commutes with every Clifford, so each sequence
        // already follows the averaged law.
        for s in generate_sequences(&(1..=20).collect::<Vec<_>>(), 2, 3).unwrap() {
            let want = 0.5 * (1.0 - p).powi(s.length as i32) + 0.5;
            assert!((engine.survival(&s) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn prediction_matches_exact_average_length_one() {
        let ch =
            crate::channels::measurement_crosstalk(0.05, &crate::channels::PolarizationWeights::balanced()).unwrap();
        let spam = SpamParams::readout(0.01, 0.02);
        let pred = DecayPrediction::new(&twirl(&ch).unwrap(), &spam).unwrap();
        for p in Pauli::ALL {
            for k in 0..2u8 {
                let exact = exact_sequence_average(&ch, &spam, 1, p, k).unwrap();
                assert!((exact - pred.survival(p, k, 1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_average_length_limit() {
        assert!(exact_sequence_average(&LeakageChannel::identity(), &SpamParams::perfect(), 4, Pauli::I, 0).is_err());
    }
}
