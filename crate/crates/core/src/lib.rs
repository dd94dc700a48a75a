//! Micromotion-based crosstalk suppression for trapped-ion qubits, and
//! randomized benchmarking of mid-circuit measurement and reset (MCMR)
//! crosstalk with leakage-aware analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`micromotion`] – Doppler modulation index, Bessel sideband suppression,
//!   the bright-manifold rate equation and depumping fits.
//! * [`liouville`] – orthonormal operator basis for the 4-level ion and the
//!   superoperator algebra built on it.
//! * [`clifford`] – the 24-element single-qubit Clifford group.
//! * [`channels`] – measurement/reset crosstalk channels, the Clifford twirl
//!   and the leakage/seepage eigensystem.
//! * [`rb`] – sequence generation, survival simulation, decay fits,
//!   bootstrap uncertainties and experiment orchestration.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod clifford;
pub mod error;
pub mod fit;
pub mod liouville;
pub mod micromotion;
pub(crate) mod par;
pub mod rb;
pub mod rng;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits so text output round-trips.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
