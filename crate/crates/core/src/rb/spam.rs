//! Probe-qubit state preparation and measurement errors. Both are diagonal
//! in the level basis and treat the two extra levels symmetrically.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::liouville::{projector, Op4, SuperVector};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpamParams {
    /// Probability of preparing `|1>` instead of `|0>`.
    pub prep_flip: f64,
    /// Probability of preparing in the extra subspace, split evenly.
    pub prep_leak: f64,
    /// `P(bright | dark)`.
    pub meas_dark_error: f64,
    /// `P(dark | bright)`, applied to every bright-manifold level.
    pub meas_bright_error: f64,
}

impl SpamParams {
    pub fn perfect() -> Self {
        Self::default()
    }

    /// Readout errors only.
    pub fn readout(dark_error: f64, bright_error: f64) -> Self {
        Self { meas_dark_error: dark_error, meas_bright_error: bright_error, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("prep_flip", self.prep_flip),
            ("prep_leak", self.prep_leak),
            ("meas_dark_error", self.meas_dark_error),
            ("meas_bright_error", self.meas_bright_error),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(param(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.prep_flip + self.prep_leak > 1.0 {
            return Err(param("prep_flip + prep_leak must be <= 1"));
        }
        Ok(())
    }

    pub fn prepared_operator(&self) -> Op4 {
        let c = |x: f64| crate::liouville::C64::new(x, 0.0);
        projector(0) * c(1.0 - self.prep_flip - self.prep_leak)
            + projector(1) * c(self.prep_flip)
            + (projector(2) + projector(3)) * c(self.prep_leak / 2.0)
    }

    pub fn prepared_state(&self) -> SuperVector {
        SuperVector::from_operator(&self.prepared_operator())
    }

    /// POVM effect for outcome `k` (0 dark, 1 bright).
    pub fn effect_operator(&self, k: u8) -> Op4 {
        let c = |x: f64| crate::liouville::C64::new(x, 0.0);
        let e0 = projector(0) * c(1.0 - self.meas_dark_error)
            + (projector(1) + projector(2) + projector(3)) * c(self.meas_bright_error);
        if k == 0 {
            e0
        } else {
            Op4::identity() - e0
        }
    }

    pub fn effect(&self, k: u8) -> SuperVector {
        SuperVector::from_operator(&self.effect_operator(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::born_probability;

    #[test]
    fn povm_is_complete() {
        let s = SpamParams { prep_flip: 0.01, prep_leak: 0.02, meas_dark_error: 0.003, meas_bright_error: 0.004 };
        s.validate().unwrap();
        let rho = s.prepared_state();
        let total = born_probability(&s.effect(0), &rho).unwrap() + born_probability(&s.effect(1), &rho).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((s.prepared_operator().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SpamParams { prep_flip: 0.7, prep_leak: 0.5, ..Default::default() }.validate().is_err());
        assert!(SpamParams::readout(-0.1, 0.0).validate().is_err());
    }
}
