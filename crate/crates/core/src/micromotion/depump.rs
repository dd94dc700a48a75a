//! Bright-state depumping experiment: prepare `|1>`, expose to stray
//! detection light for a time `t`, flip with `X(pi)`, and count bright
//! outcomes. Ideally every ion ends dark, so bright counts measure
//! population pumped out of `|1>`.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::rate::{rate_evolve, Populations, RateModel};
use crate::error::{param, Error, Result};
use crate::fit::{levenberg_marquardt, Bounds, Evaluation, LmOptions};
use crate::rng::{task_rng, DOMAIN_DEPUMP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepumpData {
    /// Exposure times (s).
    pub times: Vec<f64>,
    pub shots: u64,
    pub bright_counts: Vec<u64>,
}

impl DepumpData {
    pub fn frequencies(&self) -> Vec<f64> {
        self.bright_counts.iter().map(|c| *c as f64 / self.shots as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepumpFit {
    /// Fitted scattering rate (1/s).
    pub gamma: f64,
    pub gamma_sigma: f64,
    /// Depumped-population asymptote; 2/3 unless fitted freely.
    pub amplitude: f64,
    pub amplitude_sigma: f64,
    /// `1/gamma` (s); `None` when no depumping is resolved.
    pub time_constant: Option<f64>,
    pub time_constant_sigma: Option<f64>,
    pub residuals: Vec<f64>,
}

/// Samples the depumping experiment for an arbitrary bright-probability curve.
pub fn simulate_depump_with<F>(bright_probability: F, times: &[f64], shots: u64, seed: u64) -> Result<DepumpData>
where
    F: Fn(f64) -> Result<f64>,
{
    if shots == 0 {
        return Err(param("shots must be >= 1"));
    }
    let mut counts = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let p = bright_probability(t)?.clamp(0.0, 1.0);
        let mut rng = task_rng(seed, DOMAIN_DEPUMP, i as u64);
        let dist = Binomial::new(shots, p).map_err(|e| param(e.to_string()))?;
        counts.push(dist.sample(&mut rng));
    }
    Ok(DepumpData { times: times.to_vec(), shots, bright_counts: counts })
}

/// Samples the depumping experiment under a rate model.
pub fn simulate_depump(model: &RateModel, times: &[f64], shots: u64, seed: u64) -> Result<DepumpData> {
    simulate_depump_with(
        |t| {
            // After X(pi) the |0>,|1> populations swap; everything except the
            // original |1> population reads bright.
            let p = rate_evolve(model, &Populations::level(1), t)?;
            Ok(1.0 - p.0[1])
        },
        times,
        shots,
        seed,
    )
}

/// Fits `a (1 - exp(-3 gamma t))` with `a = 2/3` unless `free_amplitude`.
/// Uncertainties come from the fit covariance.
pub fn fit_depump(data: &DepumpData, free_amplitude: bool) -> Result<DepumpFit> {
    if data.times.len() < 4 {
        return Err(param("depump fit needs at least 4 time points"));
    }
    if data.times.len() != data.bright_counts.len() {
        return Err(param("times and counts differ in length"));
    }
    if data.times.iter().any(|t| !(*t >= 0.0)) {
        return Err(param("exposure times must be >= 0"));
    }
    let ys = data.frequencies();
    let ts = data.times.clone();
    let nominal = 2.0 / 3.0;

    let a0 = if free_amplitude { ys.iter().cloned().fold(0.0, f64::max).max(1e-3) } else { nominal };
    let mut guesses: Vec<f64> = ts
        .iter()
        .zip(&ys)
        .filter(|(t, y)| **t > 0.0 && **y < 0.9 * a0)
        .map(|(t, y)| -(1.0 - y / a0).ln() / (3.0 * t))
        .collect();
    guesses.sort_by(|a, b| a.total_cmp(b));
    let gamma0 = guesses
        .get(guesses.len() / 2)
        .copied()
        .unwrap_or_else(|| {
            let tmax = ts.iter().cloned().fold(0.0, f64::max);
            if tmax > 0.0 {
                1.0 / tmax
            } else {
                0.0
            }
        })
        .max(0.0);

    let model = |gamma: f64, a: f64, t: f64| a * -(-3.0 * gamma * t).exp_m1();
    let opts = LmOptions::default();
    let (gamma, amplitude, residuals, cov) = if free_amplitude {
        let eval = |p: &[f64]| Evaluation {
            residuals: ts.iter().zip(&ys).map(|(t, y)| model(p[0], p[1], *t) - y).collect(),
            jacobian: ts
                .iter()
                .map(|t| {
                    let e = (-3.0 * p[0] * t).exp();
                    vec![p[1] * 3.0 * t * e, 1.0 - e]
                })
                .collect(),
        };
        let b = Bounds::new(vec![0.0, 0.0], vec![f64::INFINITY, 1.0]);
        let out = levenberg_marquardt(eval, &[gamma0, a0], &b, &opts)?;
        (out.params[0], out.params[1], out.residuals, out.covariance)
    } else {
        let eval = |p: &[f64]| Evaluation {
            residuals: ts.iter().zip(&ys).map(|(t, y)| model(p[0], nominal, *t) - y).collect(),
            jacobian: ts.iter().map(|t| vec![nominal * 3.0 * t * (-3.0 * p[0] * t).exp()]).collect(),
        };
        let b = Bounds::new(vec![0.0], vec![f64::INFINITY]);
        let out = levenberg_marquardt(eval, &[gamma0], &b, &opts)?;
        (out.params[0], nominal, out.residuals, out.covariance)
    };

    let var = |i: usize| cov.as_ref().map(|c| c[i][i].max(0.0).sqrt()).unwrap_or(f64::NAN);
    let gamma_sigma = var(0);
    let amplitude_sigma = if free_amplitude { var(1) } else { 0.0 };
    if !gamma.is_finite() {
        return Err(Error::Fit { message: "non-finite rate".into(), residuals });
    }
    let tmax = ts.iter().cloned().fold(0.0, f64::max);
    let resolved = gamma * tmax > 1e-12;
    Ok(DepumpFit {
        gamma,
        gamma_sigma,
        amplitude,
        amplitude_sigma,
        time_constant: resolved.then(|| 1.0 / gamma),
        time_constant_sigma: resolved.then(|| gamma_sigma / (gamma * gamma)),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_rate_is_recovered() {
        let gamma = 1.0 / 6.4e-3;
        let times: Vec<f64> = (1..=10).map(|i| i as f64 * 2e-3).collect();
        let shots = 1_000_000_000u64;
        let data = DepumpData {
            bright_counts: times
                .iter()
                .map(|t| (super::super::depump_probability(gamma, *t) * shots as f64).round() as u64)
                .collect(),
            times,
            shots,
        };
        let fit = fit_depump(&data, false).unwrap();
        assert!((fit.gamma / gamma - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_data_reports_unbounded_time_constant() {
        let data = DepumpData { times: vec![1e-3, 2e-3, 3e-3, 4e-3], shots: 100, bright_counts: vec![0; 4] };
        let fit = fit_depump(&data, false).unwrap();
        assert_eq!(fit.gamma, 0.0);
        assert!(fit.time_constant.is_none());
    }

    #[test]
    fn needs_four_points() {
        let data = DepumpData { times: vec![1.0, 2.0, 3.0], shots: 10, bright_counts: vec![1, 2, 3] };
        assert!(fit_depump(&data, false).is_err());
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let m = RateModel::equal(100.0);
        let t = [1e-3, 2e-3, 5e-3, 1e-2];
        assert_eq!(simulate_depump(&m, &t, 500, 9).unwrap(), simulate_depump(&m, &t, 500, 9).unwrap());
    }
}
