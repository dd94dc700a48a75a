//! Semi-parametric bootstrap: sequences are resampled with replacement
//! within each (length, final-Pauli class) stratum, then every resampled
//! sequence's counts are redrawn binomially at its observed rate.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::analysis::{fit_all, FitQuantities};
use super::dataset::{RBDataset, RBRecord};
use crate::error::{param, Error, Result};
use crate::par::map_indexed;
use crate::rng::{task_rng, DOMAIN_BOOTSTRAP};

pub const MIN_RESAMPLES: usize = 100;
/// Largest tolerated fraction of failed refits.
pub const MAX_FAILURE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub resamples: usize,
    pub failures: usize,
    /// Standard deviation of each quantity over successful refits.
    pub sigma: FitQuantities,
}

fn resample(strata: &BTreeMap<(usize, u8), Vec<RBRecord>>, seed: u64, index: u64) -> Result<RBDataset> {
    let mut rng = task_rng(seed, DOMAIN_BOOTSTRAP, index);
    let mut out = Vec::new();
    for recs in strata.values() {
        for _ in 0..recs.len() {
            let r = recs[rng.random_range(0..recs.len())];
            let dark = Binomial::new(r.shots, r.dark_frequency()).map_err(|e| param(e.to_string()))?.sample(&mut rng);
            out.push(RBRecord { dark_counts: dark, bright_counts: r.shots - dark, seq_id: out.len(), ..r });
        }
    }
    Ok(RBDataset { records: out })
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn bootstrap(ds: &RBDataset, n_resamples: usize, expected_ratio: f64, seed: u64) -> Result<BootstrapResult> {
    if n_resamples < MIN_RESAMPLES {
        return Err(param(format!("bootstrap needs at least {MIN_RESAMPLES} resamples, got {n_resamples}")));
    }
    let mut strata: BTreeMap<(usize, u8), Vec<RBRecord>> = BTreeMap::new();
    for r in &ds.records {
        strata.entry((r.length, r.target_outcome)).or_default().push(*r);
    }
    let fits: Vec<Option<FitQuantities>> = map_indexed(n_resamples, |i| {
        resample(&strata, seed, i as u64).ok().and_then(|d| fit_all(&d, expected_ratio).ok())
    });
    let ok: Vec<FitQuantities> = fits.into_iter().flatten().collect();
    let failures = n_resamples - ok.len();
    if failures as f64 > MAX_FAILURE_FRACTION * n_resamples as f64 {
        return Err(Error::Instability { failures, total: n_resamples });
    }
    let col = |f: fn(&FitQuantities) -> f64| std_dev(&ok.iter().map(f).collect::<Vec<_>>());
    let sigma = FitQuantities {
        amplitude: col(|q| q.amplitude),
        decay_base: col(|q| q.decay_base),
        b0: col(|q| q.b0),
        c0: col(|q| q.c0),
        t_minus: col(|q| q.t_minus),
        leakage: col(|q| q.leakage),
        seepage: col(|q| q.seepage),
        average_error: col(|q| q.average_error),
        scattering_standard: col(|q| q.scattering_standard),
        scattering_leakage: col(|q| q.scattering_leakage),
    };
    Ok(BootstrapResult { resamples: n_resamples, failures, sigma })
}
