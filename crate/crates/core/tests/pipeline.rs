use mcmr_core::micromotion::{
    first_null_modulation_index, fit_depump, simulate_depump, suppression_scan, MicromotionConfig, MicromotionSpec,
    RateModel,
};
use mcmr_core::rb::{
    campaign_presets, decay_curve_table, read_focus_csv, run_experiment, write_focus_csv, Campaign, RBDataset,
};

fn trap() -> MicromotionConfig {
    MicromotionSpec {
        rf_frequency_hz: 40e6,
        secular_frequency_hz: 2.5e6,
        linewidth_hz: 2e6,
        wavelength_m: 369.5e-9,
        beam_angle_deg: 45.0,
        displacement_m: 0.0,
    }
    .into()
}

#[test]
fn scan_has_its_minimum_at_the_first_null() {
    let cfg = trap();
    let d0 = cfg.displacement_for_index(first_null_modulation_index()).unwrap();
    let grid: Vec<f64> = (0..=200).map(|i| 2.0 * d0 * i as f64 / 200.0).collect();
    let scan = suppression_scan(&cfg, &grid).unwrap();
    assert!((scan[0].suppression - 1.0).abs() < 1e-12);
    let best = scan.iter().min_by(|a, b| a.suppression.total_cmp(&b.suppression)).unwrap();
    assert!((best.displacement_m - d0).abs() <= 2.0 * d0 / 200.0);
    assert!(best.suppression < 0.05);
}

#[test]
fn depump_fit_recovers_the_simulated_rate() {
    let gamma = 6.25;
    let model = RateModel::measurement([gamma; 3]);
    let times: Vec<f64> = (0..12).map(|i| 0.02 * i as f64).collect();
    let data = simulate_depump(&model, &times, 2000, 11).unwrap();
    for free in [false, true] {
        let fit = fit_depump(&data, free).unwrap();
        assert!((fit.gamma - gamma).abs() < 4.0 * fit.gamma_sigma, "{fit:?}");
        let tau = fit.time_constant.unwrap();
        assert!((tau - 1.0 / gamma).abs() < 4.0 * fit.time_constant_sigma.unwrap());
    }
}

#[test]
fn preset_experiment_runs_end_to_end() {
    let campaign = campaign_presets();
    let mut cfg = campaign.experiments.iter().find(|e| e.name == "Dark measurement").unwrap().clone();
    cfg.sampling.resamples = 100;
    let (report, data) = run_experiment(&cfg).unwrap();
    assert_eq!(report.probes.len(), 2);
    for p in &report.probes {
        let a = &p.analysis;
        let z = (a.average_error - p.injected.average_error) / a.sigma.average_error;
        assert!(z.abs() < 4.0, "probe {} z = {z}", p.qubit);
    }
    // Zone 2 scatters more than zone 1.
    assert!(report.probes[1].injected.average_error > report.probes[0].injected.average_error);

    for (q, ds) in &data.probes {
        let a = &report.probes.iter().find(|p| p.qubit == *q).unwrap().analysis;
        let table = decay_curve_table(ds, a);
        assert_eq!(table.len(), cfg.sampling.lengths.len());
        for row in &table {
            assert!((row.standard_mean - row.standard_fit).abs() < 0.05);
            assert!((row.leakage_mean - row.leakage_fit).abs() < 0.05);
        }
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(&RBDataset::read_csv(buf.as_slice()).unwrap(), ds);
    }

    let mut buf = Vec::new();
    write_focus_csv(&data.focus, &mut buf).unwrap();
    assert_eq!(read_focus_csv(buf.as_slice()).unwrap(), data.focus);
    assert_eq!(report.spam.len(), 1);
    assert!(report.spam[0].error.unwrap() < 0.05);
}

#[test]
fn preset_control_errors_match_the_measured_baseline() {
    let campaign = campaign_presets();
    let control = &campaign.experiments[0];
    let expected = [(0usize, 0.19e-3), (2usize, 0.31e-3)];
    for (q, eps) in expected {
        let ch = control.probe_channel(q).unwrap();
        let injected = mcmr_core::channels::average_infidelity(&ch);
        assert!((injected - eps).abs() < 1e-12, "probe {q}: {injected}");
    }
}

#[test]
fn campaign_json_round_trips() {
    let c = campaign_presets();
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(Campaign::from_json(&text).unwrap(), c);
    assert!(Campaign::from_json("{\"experiments\": []}").is_err());
}
