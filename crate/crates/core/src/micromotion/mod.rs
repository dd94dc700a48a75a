//! Micromotion hiding: how displacing an ion from the RF null modulates the
//! light it sees and suppresses absorption, plus the rate-equation model of
//! stray-light depumping used to measure that suppression.

mod bessel;
mod depump;
mod rate;

pub use bessel::{
    bessel_j0, bessel_j0_root, bessel_j_all, first_null_modulation_index, second_null_modulation_index,
    suppression_factor, DEFAULT_SERIES_CUTOFF, SERIES_TERM_TOLERANCE,
};
pub use depump::{fit_depump, simulate_depump, simulate_depump_with, DepumpData, DepumpFit};
pub use rate::{depump_probability, rate_evolve, Couplings, Populations, RateModel, LEVELS};

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{param, Result};

/// Trap and beam parameters in angular units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicromotionConfig {
    /// RF drive frequency Omega (rad/s).
    pub rf_frequency: f64,
    /// Radial secular frequency omega (rad/s).
    pub secular_frequency: f64,
    /// Transition linewidth Gamma (rad/s).
    pub linewidth: f64,
    /// Wavenumber k (1/m).
    pub wavenumber: f64,
    /// Angle between micromotion and beam propagation (rad).
    pub beam_angle: f64,
    /// Displacement from the RF null (m).
    pub displacement: f64,
}

/// On-disk form of [`MicromotionConfig`]: ordinary frequencies in Hz, a
/// wavelength and an angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicromotionSpec {
    pub rf_frequency_hz: f64,
    pub secular_frequency_hz: f64,
    pub linewidth_hz: f64,
    pub wavelength_m: f64,
    pub beam_angle_deg: f64,
    #[serde(default)]
    pub displacement_m: f64,
}

impl From<MicromotionSpec> for MicromotionConfig {
    fn from(s: MicromotionSpec) -> Self {
        Self {
            rf_frequency: 2.0 * PI * s.rf_frequency_hz,
            secular_frequency: 2.0 * PI * s.secular_frequency_hz,
            linewidth: 2.0 * PI * s.linewidth_hz,
            wavenumber: 2.0 * PI / s.wavelength_m,
            beam_angle: s.beam_angle_deg.to_radians(),
            displacement: s.displacement_m,
        }
    }
}

impl MicromotionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rf_frequency", self.rf_frequency),
            ("secular_frequency", self.secular_frequency),
            ("linewidth", self.linewidth),
            ("wavenumber", self.wavenumber),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(param(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(0.0..=PI / 2.0 + 1e-12).contains(&self.beam_angle) {
            return Err(param(format!("beam angle must lie in [0, pi/2], got {}", self.beam_angle)));
        }
        if !(self.displacement >= 0.0) {
            return Err(param(format!("displacement must be >= 0, got {}", self.displacement)));
        }
        if self.rf_frequency <= self.secular_frequency {
            return Err(param("pseudo-potential regime requires Omega > omega"));
        }
        Ok(())
    }

    pub fn with_displacement(&self, displacement: f64) -> Self {
        Self { displacement, ..*self }
    }

    pub fn omega_over_gamma(&self) -> f64 {
        self.rf_frequency / self.linewidth
    }

    /// Modulation index per metre of displacement, `k sqrt(2) omega cos(theta) / Omega`.
    fn index_per_metre(&self) -> f64 {
        self.wavenumber * SQRT_2 * self.secular_frequency / self.rf_frequency * self.beam_angle.cos()
    }

    /// Displacement giving modulation index `n`. Fails for an orthogonal beam.
    pub fn displacement_for_index(&self, n: f64) -> Result<f64> {
        self.validate()?;
        let slope = self.index_per_metre();
        if self.beam_angle.cos().abs() < 1e-12 || slope <= 0.0 {
            return Err(param("beam orthogonal to micromotion: index does not depend on displacement"));
        }
        Ok(n / slope)
    }
}

/// Micromotion amplitude `A = sqrt(2) omega r / Omega` in metres.
pub fn micromotion_amplitude(cfg: &MicromotionConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(SQRT_2 * cfg.secular_frequency * cfg.displacement / cfg.rf_frequency)
}

/// Frequency modulation index `n = k A cos(theta)`.
pub fn modulation_index(cfg: &MicromotionConfig) -> Result<f64> {
    Ok(cfg.wavenumber * micromotion_amplitude(cfg)? * cfg.beam_angle.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub displacement_m: f64,
    pub modulation_index: f64,
    pub suppression: f64,
}

/// Normalised scattering rate over a grid of displacements.
pub fn suppression_scan(cfg: &MicromotionConfig, displacements: &[f64]) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    displacements
        .iter()
        .map(|&d| {
            let c = cfg.with_displacement(d);
            let n = modulation_index(&c)?;
            Ok(ScanPoint {
                displacement_m: d,
                modulation_index: n,
                suppression: suppression_factor(n, c.omega_over_gamma(), DEFAULT_SERIES_CUTOFF)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_config() -> MicromotionConfig {
        MicromotionConfig {
            rf_frequency: 2.0 * PI * 40e6,
            secular_frequency: 2.0 * PI * 4e6,
            linewidth: 2.0 * PI * 19.6e6,
            wavenumber: 2.0 * PI / 369.5e-9,
            beam_angle: PI / 4.0,
            displacement: 2.0e-6,
        }
    }

    #[test]
    fn no_displacement_no_modulation() {
        let c = sample_config().with_displacement(0.0);
        assert_eq!(modulation_index(&c).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_beam_no_modulation() {
        let c = MicromotionConfig { beam_angle: PI / 2.0, displacement: 5e-6, ..sample_config() };
        assert!(modulation_index(&c).unwrap().abs() < 1e-15);
        assert!(c.displacement_for_index(1.0).is_err());
    }

    #[test]
    fn inversion_round_trip() {
        let c = MicromotionConfig { rf_frequency: 1.0, secular_frequency: 0.1, linewidth: 0.5, ..sample_config() };
        let target = 2.40483;
        let r = c.displacement_for_index(target).unwrap();
        let n = modulation_index(&c.with_displacement(r)).unwrap();
        assert!(((n - target) / target).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_configs() {
        let base = sample_config();
        assert!(modulation_index(&MicromotionConfig { rf_frequency: 0.0, ..base }).is_err());
        assert!(modulation_index(&MicromotionConfig { linewidth: -1.0, ..base }).is_err());
        assert!(modulation_index(&MicromotionConfig { beam_angle: 2.0, ..base }).is_err());
        assert!(modulation_index(&MicromotionConfig { displacement: -1e-6, ..base }).is_err());
        assert!(modulation_index(&MicromotionConfig { secular_frequency: base.rf_frequency * 2.0, ..base }).is_err());
    }

    #[test]
    fn spec_converts_to_angular_units() {
        let spec = MicromotionSpec {
            rf_frequency_hz: 1.0,
            secular_frequency_hz: 0.5,
            linewidth_hz: 2.0,
            wavelength_m: 1.0,
            beam_angle_deg: 90.0,
            displacement_m: 3.0,
        };
        let c = MicromotionConfig::from(spec);
        assert!((c.rf_frequency - 2.0 * PI).abs() < 1e-15);
        assert!((c.wavenumber - 2.0 * PI).abs() < 1e-15);
        assert!((c.beam_angle - PI / 2.0).abs() < 1e-15);
        assert!((c.omega_over_gamma() - 0.5).abs() < 1e-15);
    }
}
