//! Decay fits and derived error metrics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::dataset::RBDataset;
use crate::error::{param, Error, Result};
use crate::fit::{levenberg_marquardt, Bounds, Evaluation, LmOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFit {
    pub amplitude: f64,
    pub decay_base: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageFit {
    pub b0: f64,
    pub c0: f64,
    pub t_minus: f64,
    pub leakage: f64,
    pub seepage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringEstimates {
    /// `3(1 - r)/4`.
    pub standard: f64,
    /// `2(1 - t_-)/3`.
    pub leakage: f64,
}

impl ScatteringEstimates {
    /// Converts `gamma * t_meas` estimates to rates (1/s).
    pub fn rates(&self, t_meas: f64) -> Result<(f64, f64)> {
        if !(t_meas > 0.0) {
            return Err(param("measurement time must be > 0"));
        }
        Ok((self.standard / t_meas, self.leakage / t_meas))
    }
}

fn check_points(points: &[(usize, f64)]) -> Result<()> {
    let mut lengths: Vec<usize> = points.iter().map(|p| p.0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 3 || lengths.len() != points.len() {
        return Err(param("decay fits need at least 3 distinct lengths, one point each"));
    }
    if points.iter().any(|p| !p.1.is_finite()) {
        return Err(param("non-finite survival probability"));
    }
    Ok(())
}

/// LM from the supplied guess; when it does not converge, LM polish of the
/// profiled global solution, or that solution itself.
fn fit_with_fallback<F, const N: usize>(
    eval: &F,
    bounds: &Bounds,
    guess: &[f64],
    profile: impl FnOnce() -> [f64; N],
) -> Vec<f64>
where
    F: Fn(&[f64]) -> Evaluation,
{
    let opts = LmOptions::default();
    if let Ok(o) = levenberg_marquardt(eval, guess, bounds, &opts) {
        return o.params;
    }
    let p = profile();
    levenberg_marquardt(eval, &p, bounds, &opts).map(|o| o.params).unwrap_or_else(|_| p.to_vec())
}

/// Fits `p(l) = A r^l + 1/2` with `r` in `(0, 1]`.
pub fn fit_standard(points: &[(usize, f64)]) -> Result<StandardFit> {
    check_points(points)?;
    let (l0, p0) = points[0];
    let (l1, p1) = points[points.len() - 1];
    let a0 = (p0 - 0.5).max(1e-3);
    let ratio = ((p1 - 0.5).max(1e-6) / a0).min(1.0);
    let r0 = ratio.powf(1.0 / (l1 - l0) as f64).clamp(0.5, 1.0 - 1e-9);
    let a0 = (a0 / r0.powi(l0 as i32)).min(1.0);

    let eval = |p: &[f64]| Evaluation {
        residuals: points.iter().map(|(l, y)| p[0] * p[1].powi(*l as i32) + 0.5 - y).collect(),
        jacobian: points
            .iter()
            .map(|(l, _)| {
                let l = *l as i32;
                vec![p[1].powi(l), p[0] * l as f64 * p[1].powi(l - 1)]
            })
            .collect(),
    };
    let b = Bounds::new(vec![-1.0, 1e-9], vec![1.0, 1.0]);
    let params = fit_with_fallback(&eval, &b, &[a0, r0], || profile_standard(points));
    Ok(StandardFit { amplitude: params[0], decay_base: params[1] })
}

/// Least squares for `b x + c` with `b, c` in `[0, 1]`: the interior
/// solution if feasible, else the best of the four clamped edges.
fn box_linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let cost = |b: f64, c: f64| xs.iter().zip(ys).map(|(x, y)| (b * x + c - y).powi(2)).sum::<f64>();
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let mut candidates = Vec::with_capacity(5);
    let det = n * sxx - sx * sx;
    if det > 1e-14 * (n * sxx).max(1e-300) {
        let b = (n * sxy - sx * sy) / det;
        let c = (sy - b * sx) / n;
        if (0.0..=1.0).contains(&b) && (0.0..=1.0).contains(&c) {
            candidates.push((b, c));
        }
    }
    for b in [0.0, 1.0] {
        candidates.push((b, ((sy - b * sx) / n).clamp(0.0, 1.0)));
    }
    if sxx > 0.0 {
        for c in [0.0, 1.0] {
            candidates.push((((sxy - c * sx) / sxx).clamp(0.0, 1.0), c));
        }
    }
    candidates
        .into_iter()
        .map(|(b, c)| (b, c, cost(b, c)))
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("at least two candidates")
}

/// Minimises `cost(t)` over a decay base in `[lo, 1]`: a log-spaced scan
/// of `1 - t`, then golden-section refinement around the best grid point.
fn profile_base(lo: f64, cost: impl Fn(f64) -> f64) -> f64 {
    let mut grid: Vec<f64> = (0..=400).map(|i| (1.0 - 10f64.powf(-9.0 + 9.0 * i as f64 / 400.0)).max(lo)).collect();
    grid.push(1.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let costs: Vec<f64> = grid.iter().map(|t| cost(*t)).collect();
    let k = (0..grid.len()).min_by(|a, b| costs[*a].total_cmp(&costs[*b])).unwrap_or(0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    for _ in 0..100 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if cost(c) <= cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    if cost(mid) < costs[k] {
        mid
    } else {
        grid[k]
    }
}

/// Global least-squares leakage parameters, `(B0, C0)` solved exactly for
/// each trial `t`.
fn profile_leakage(points: &[(usize, f64)]) -> [f64; 3] {
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let at = |t: f64| {
        let xs: Vec<f64> = points.iter().map(|(l, _)| t.powi(*l as i32 + 1)).collect();
        box_linear_fit(&xs, &ys)
    };
    let t = profile_base(MIN_T_MINUS, |t| at(t).2);
    let (b0, c0, _) = at(t);
    [b0, c0, t]
}

/// Global least-squares standard parameters, `A` solved exactly for each
/// trial `r`.
fn profile_standard(points: &[(usize, f64)]) -> [f64; 2] {
    let at = |r: f64| {
        let xs: Vec<f64> = points.iter().map(|(l, _)| r.powi(*l as i32)).collect();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(points).map(|(x, p)| x * (p.1 - 0.5)).sum();
        let a = if sxx > 0.0 { (sxy / sxx).clamp(-1.0, 1.0) } else { 0.0 };
        let cost: f64 = xs.iter().zip(points).map(|(x, p)| (a * x + 0.5 - p.1).powi(2)).sum();
        (a, cost)
    };
    let r = profile_base(1e-9, |r| at(r).1);
    [at(r).0, r]
}

/// Smallest `t_-` the leakage fit accepts. With few lengths, a decay much
/// faster than the shortest sequence can pass through any three points;
/// `L + S > 1/2` per slot is far outside the small-error regime anyway.
pub const MIN_T_MINUS: f64 = 0.5;

/// Fits `p_L(l) = B0 t^(l+1) + C0` with `B0, C0` in `[0, 1]` and `t` in
/// `[MIN_T_MINUS, 1]`. `expected_ratio` is the anticipated `L/S`, used only
/// for the initial guess.
pub fn fit_leakage(points: &[(usize, f64)], expected_ratio: f64) -> Result<LeakageFit> {
    check_points(points)?;
    if !(expected_ratio >= 0.0) || !expected_ratio.is_finite() {
        return Err(param("expected L/S ratio must be finite and >= 0"));
    }
    let rho = expected_ratio;
    let b0 = 0.5 * rho / (1.0 + rho);
    let c0 = 0.5 / (1.0 + rho);
    // Longest length whose excess over C0 is still resolved sets t.
    let t0 = points
        .iter()
        .rev()
        .map(|(l, y)| ((y - c0) / b0, *l))
        .find(|(q, _)| b0 > 0.0 && (0.05..=0.95).contains(q))
        .map(|(q, l)| q.powf(1.0 / (l + 1) as f64))
        .unwrap_or(0.99)
        .clamp(MIN_T_MINUS, 1.0 - 1e-9);

    let eval = |p: &[f64]| Evaluation {
        residuals: points.iter().map(|(l, y)| p[0] * p[2].powi(*l as i32 + 1) + p[1] - y).collect(),
        jacobian: points
            .iter()
            .map(|(l, _)| {
                let e = *l as i32 + 1;
                vec![p[2].powi(e), 1.0, p[0] * e as f64 * p[2].powi(e - 1)]
            })
            .collect(),
    };
    let b = Bounds::new(vec![0.0, 0.0, MIN_T_MINUS], vec![1.0, 1.0, 1.0]);
    let params = fit_with_fallback(&eval, &b, &[b0.max(1e-3), c0, t0], || profile_leakage(points));
    let (mut b0, mut c0, mut t) = (params[0], params[1], params[2]);
    // A fit pinned at the floor has found a decay faster than the data
    // resolve; the nested flat model explains them as well.
    if t <= MIN_T_MINUS + 1e-9 {
        b0 = 0.0;
        c0 = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    }
    // The cost does not depend on t once B0 vanishes; no decay is the
    // natural tie-break.
    if b0 <= 1e-14 {
        t = 1.0;
    }
    if !(t > MIN_T_MINUS && t <= 1.0) {
        return Err(Error::Fit {
            message: format!("t_minus = {t} outside ({MIN_T_MINUS}, 1]"),
            residuals: eval(&params).residuals,
        });
    }
    Ok(LeakageFit { b0, c0, t_minus: t, leakage: 2.0 * b0 * (1.0 - t), seepage: 2.0 * c0 * (1.0 - t) })
}

/// `(1 - r + L) / 2`.
pub fn average_error(decay_base: f64, leakage: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&decay_base) || !(0.0..=1.0).contains(&leakage) {
        return Err(param("r and L must lie in [0, 1]"));
    }
    Ok((1.0 - decay_base + leakage) / 2.0)
}

/// Small-scattering estimates of `gamma * t_meas` from each decay.
pub fn scattering_estimates(decay_base: f64, t_minus: f64) -> ScatteringEstimates {
    ScatteringEstimates { standard: 0.75 * (1.0 - decay_base), leakage: 2.0 * (1.0 - t_minus) / 3.0 }
}

/// Chi-square test that the per-length mean dark frequency is flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatnessTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl FlatnessTest {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

/// Compares per-length mean dark frequencies with their weighted grand
/// mean. Each mean's shot-noise variance uses the dark rate pooled over all
/// lengths for its record's final-Pauli class.
pub fn leakage_flatness(ds: &RBDataset) -> Result<FlatnessTest> {
    let groups = ds.by_length();
    if groups.len() < 2 {
        return Err(param("flatness test needs at least 2 lengths"));
    }
    let mut pooled = [(0u64, 0u64); 2];
    for r in &ds.records {
        let e = &mut pooled[r.target_outcome as usize];
        e.0 += r.dark_counts;
        e.1 += r.shots;
    }
    let rate = |class: u8| {
        let (d, n) = pooled[class as usize];
        if n == 0 {
            0.0
        } else {
            d as f64 / n as f64
        }
    };
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for rs in groups.values() {
        let n = rs.len() as f64;
        means.push(rs.iter().map(|r| r.dark_frequency()).sum::<f64>() / n);
        let v: f64 = rs
            .iter()
            .map(|r| {
                let p = rate(r.target_outcome);
                p * (1.0 - p) / r.shots as f64
            })
            .sum::<f64>()
            / (n * n);
        vars.push(v);
    }
    let dof = means.len() - 1;
    if vars.iter().any(|v| *v <= 0.0) {
        // No shot noise at all: flat only if the means coincide exactly.
        let flat = means.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12);
        return Ok(FlatnessTest {
            statistic: if flat { 0.0 } else { f64::INFINITY },
            dof,
            p_value: if flat { 1.0 } else { 0.0 },
        });
    }
    let wsum: f64 = vars.iter().map(|v| 1.0 / v).sum();
    let grand = means.iter().zip(&vars).map(|(m, v)| m / v).sum::<f64>() / wsum;
    let statistic: f64 = means.iter().zip(&vars).map(|(m, v)| (m - grand).powi(2) / v).sum();
    let dist = ChiSquared::new(dof as f64).map_err(|e| param(e.to_string()))?;
    Ok(FlatnessTest { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}

/// Every fitted and derived quantity of one analysis pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuantities {
    pub amplitude: f64,
    pub decay_base: f64,
    pub b0: f64,
    pub c0: f64,
    pub t_minus: f64,
    pub leakage: f64,
    pub seepage: f64,
    pub average_error: f64,
    pub scattering_standard: f64,
    pub scattering_leakage: f64,
}

/// Standard and leakage fits of a dataset plus derived metrics.
pub fn fit_all(ds: &RBDataset, expected_ratio: f64) -> Result<FitQuantities> {
    let std = fit_standard(&ds.standard_points())?;
    let leak = fit_leakage(&ds.leakage_points(), expected_ratio)?;
    let scattering = scattering_estimates(std.decay_base, leak.t_minus);
    Ok(FitQuantities {
        amplitude: std.amplitude,
        decay_base: std.decay_base,
        b0: leak.b0,
        c0: leak.c0,
        t_minus: leak.t_minus,
        leakage: leak.leakage,
        seepage: leak.seepage,
        average_error: average_error(std.decay_base, leak.leakage)?,
        scattering_standard: scattering.standard,
        scattering_leakage: scattering.leakage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub standard: StandardFit,
    pub leakage_fit: LeakageFit,
    pub leakage: f64,
    pub seepage: f64,
    pub average_error: f64,
    pub scattering: ScatteringEstimates,
    /// `t_- - (1 - L - S)`; zero only when the fitted `B0 + C0` is 1/2.
    pub identity_residual: f64,
    pub sigma: FitQuantities,
    pub bootstrap_resamples: usize,
    pub bootstrap_failures: usize,
    pub warnings: Vec<String>,
}

/// Fits a dataset and attaches bootstrap uncertainties.
pub fn analyze(ds: &RBDataset, expected_ratio: f64, resamples: usize, seed: u64) -> Result<AnalysisResult> {
    let q = fit_all(ds, expected_ratio)?;
    let boot = super::bootstrap::bootstrap(ds, resamples, expected_ratio, seed)?;
    Ok(AnalysisResult {
        standard: StandardFit { amplitude: q.amplitude, decay_base: q.decay_base },
        leakage_fit: LeakageFit { b0: q.b0, c0: q.c0, t_minus: q.t_minus, leakage: q.leakage, seepage: q.seepage },
        leakage: q.leakage,
        seepage: q.seepage,
        average_error: q.average_error,
        scattering: ScatteringEstimates { standard: q.scattering_standard, leakage: q.scattering_leakage },
        identity_residual: q.t_minus - (1.0 - q.leakage - q.seepage),
        sigma: boot.sigma,
        bootstrap_resamples: boot.resamples,
        bootstrap_failures: boot.failures,
        warnings: ds.balance_warnings(),
    })
}
