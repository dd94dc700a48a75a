//! Random Clifford sequences with a final Pauli folded into the inversion.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{self, Pauli, GROUP_ORDER};
use crate::error::{Error, Result};
use crate::rng::{task_rng, DOMAIN_SEQUENCES};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBSequence {
    pub length: usize,
    /// Index within its length, `0..n_per_length`.
    pub seq_id: usize,
    pub cliffords: Vec<usize>,
    pub inversion: usize,
    pub final_pauli: Pauli,
    pub target_outcome: u8,
}

impl RBSequence {
    pub fn new(seq_id: usize, cliffords: Vec<usize>, final_pauli: Pauli) -> Self {
        let inversion = clifford::inversion_for(&cliffords, final_pauli);
        Self {
            length: cliffords.len(),
            seq_id,
            cliffords,
            inversion,
            final_pauli,
            target_outcome: final_pauli.target_outcome(),
        }
    }

    /// Net ideal action, which must equal the final Pauli.
    pub fn net_element(&self) -> usize {
        clifford::compose(self.inversion, clifford::sequence_product(&self.cliffords))
    }
}

/// How final Paulis are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliSelection {
    /// Exactly half of each length's sequences end on `1` or `Z`, half on
    /// `X` or `Y`.
    Balanced,
    /// Each final Pauli drawn independently and uniformly.
    Uniform,
}

/// Balanced sequences for each length; see [`generate_sequences_with`].
pub fn generate_sequences(lengths: &[usize], n_per_length: usize, seed: u64) -> Result<Vec<RBSequence>> {
    generate_sequences_with(lengths, n_per_length, seed, PauliSelection::Balanced)
}

/// Uniform Clifford draws, one random stream per sequence. With balanced
/// selection, even `seq_id`s end on `1`/`Z` and odd ones on `X`/`Y`.
pub fn generate_sequences_with(
    lengths: &[usize],
    n_per_length: usize,
    seed: u64,
    selection: PauliSelection,
) -> Result<Vec<RBSequence>> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::Config("sequence lengths must be nonempty and >= 1".into()));
    }
    if n_per_length == 0 {
        return Err(Error::Config("need at least one sequence per length".into()));
    }
    if selection == PauliSelection::Balanced && !n_per_length.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "balanced Pauli selection needs an even number of sequences per length, got {n_per_length}"
        )));
    }
    let mut out = Vec::with_capacity(lengths.len() * n_per_length);
    for (li, &length) in lengths.iter().enumerate() {
        for seq_id in 0..n_per_length {
            let stream = (li * n_per_length + seq_id) as u64;
            let mut rng = task_rng(seed, DOMAIN_SEQUENCES, stream);
            let cliffords: Vec<usize> = (0..length).map(|_| rng.random_range(0..GROUP_ORDER)).collect();
            let pauli = match selection {
                PauliSelection::Balanced => {
                    let pick = rng.random_bool(0.5);
                    match (seq_id % 2 == 0, pick) {
                        (true, false) => Pauli::I,
                        (true, true) => Pauli::Z,
                        (false, false) => Pauli::X,
                        (false, true) => Pauli::Y,
                    }
                }
                PauliSelection::Uniform => Pauli::ALL[rng.random_range(0..4)],
            };
            out.push(RBSequence::new(seq_id, cliffords, pauli));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_sampling_counts() {
        let seqs = generate_sequences(&[2, 11, 81], 40, 5).unwrap();
        assert_eq!(seqs.len(), 120);
        for l in [2, 11, 81] {
            let dark = seqs.iter().filter(|s| s.length == l && s.target_outcome == 0).count();
            let bright = seqs.iter().filter(|s| s.length == l && s.target_outcome == 1).count();
            assert_eq!((dark, bright), (20, 20));
        }
    }

    #[test]
    fn odd_count_rejected() {
        assert!(matches!(generate_sequences(&[2], 3, 0), Err(Error::Config(_))));
        assert!(generate_sequences_with(&[2], 3, 0, PauliSelection::Uniform).is_ok());
        assert!(generate_sequences(&[0, 2], 2, 0).is_err());
    }

    #[test]
    fn net_action_is_final_pauli() {
        for s in generate_sequences(&[1, 5, 30], 10, 11).unwrap() {
            assert_eq!(s.net_element(), clifford::pauli_element(s.final_pauli));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate_sequences(&[3, 7], 4, 2).unwrap(), generate_sequences(&[3, 7], 4, 2).unwrap());
    }
}
