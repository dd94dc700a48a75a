//! WebAssembly bindings for the browser demo. Each entry point returns a
//! JSON string that the page parses and plots.

use mcmr_core::micromotion::{
    depump_probability, first_null_modulation_index, fit_depump, simulate_depump, suppression_factor, RateModel,
    DEFAULT_SERIES_CUTOFF,
};
use mcmr_core::rb::{decay_curve_table, run_experiment, ExperimentConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Suppression against modulation index on `points` samples of `[0, n_max]`.
#[wasm_bindgen]
pub fn suppression_curve(omega_over_gamma: f64, n_max: f64, points: usize) -> Result<String, JsError> {
    if points < 2 || !(n_max.is_finite() && n_max > 0.0) {
        return Err(js_err("need n_max > 0 and at least 2 points"));
    }
    let mut curve = Vec::with_capacity(points);
    for i in 0..points {
        let n = n_max * i as f64 / (points - 1) as f64;
        curve.push([n, suppression_factor(n, omega_over_gamma, DEFAULT_SERIES_CUTOFF).map_err(js_err)?]);
    }
    Ok(json!({ "curve": curve, "first_null": first_null_modulation_index() }).to_string())
}

/// Simulated depumping counts at rate `gamma` (1/s) and their fit.
#[wasm_bindgen]
pub fn depump_curve(gamma: f64, shots: u64, seed: u64) -> Result<String, JsError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(js_err("gamma must be > 0"));
    }
    let step = 0.4 / (3.0 * gamma);
    let times: Vec<f64> = (1..=10).map(|i| step * i as f64).collect();
    let data = simulate_depump(&RateModel::equal(gamma), &times, shots, seed).map_err(js_err)?;
    let fit = fit_depump(&data, false).map_err(js_err)?;
    let model: Vec<[f64; 2]> = (0..=100)
        .map(|i| {
            let t = 10.0 * step * i as f64 / 100.0;
            [t, fit.amplitude * 1.5 * depump_probability(fit.gamma, t)]
        })
        .collect();
    let measured: Vec<[f64; 2]> = times.iter().zip(data.frequencies()).map(|(t, f)| [*t, f]).collect();
    Ok(json!({ "data": measured, "model": model, "fit": fit }).to_string())
}

/// One probe qubit benchmarked under a measurement or reset crosstalk
/// channel of strength `gamma_t`.
#[wasm_bindgen]
pub fn rb_decay(kind: &str, gamma_t: f64, seed: u64) -> Result<String, JsError> {
    if !matches!(kind, "measurement" | "reset") {
        return Err(js_err(format!("unknown channel kind {kind:?}")));
    }
    let cfg: ExperimentConfig = serde_json::from_value(json!({
        "name": "demo",
        "probe_qubits": [0],
        "channels": [{ "kind": kind, "gamma_t": gamma_t }],
        "sampling": { "lengths": [2, 11, 41, 81], "sequences_per_length": 20, "shots": 100, "resamples": 100 },
        "seed": seed,
    }))
    .map_err(js_err)?;
    let (report, data) = run_experiment(&cfg).map_err(js_err)?;
    let probe = &report.probes[0];
    let table = decay_curve_table(&data.probes[0].1, &probe.analysis);
    Ok(json!({ "table": table, "injected": probe.injected, "analysis": probe.analysis }).to_string())
}
