use mcmr_demo::{depump_curve, rb_decay, suppression_curve};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn suppression_curve_starts_at_one_and_dips_near_the_first_null() {
    let v = parse(suppression_curve(10.0, 5.0, 501).unwrap());
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 501);
    assert!((curve[0][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let (n_min, _) = curve
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .filter(|p| p.0 < 3.0)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((n_min - v["first_null"].as_f64().unwrap()).abs() < 0.02);
}

#[test]
fn depump_curve_recovers_its_rate() {
    let v = parse(depump_curve(156.25, 2000, 3).unwrap());
    let gamma = v["fit"]["gamma"].as_f64().unwrap();
    assert!((gamma / 156.25 - 1.0).abs() < 0.1, "{gamma}");
    assert_eq!(v["data"].as_array().unwrap().len(), 10);
    assert_eq!(v["model"].as_array().unwrap().len(), 101);
}

#[test]
fn rb_decay_reports_a_table_per_length() {
    let v = parse(rb_decay("reset", 1e-2, 5).unwrap());
    assert_eq!(v["table"].as_array().unwrap().len(), 4);
    let injected = v["injected"]["average_error"].as_f64().unwrap();
    let estimated = v["analysis"]["average_error"].as_f64().unwrap();
    assert!((estimated - injected).abs() < 5.0 * v["analysis"]["sigma"]["average_error"].as_f64().unwrap());
}
