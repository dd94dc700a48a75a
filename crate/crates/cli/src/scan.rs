use std::path::Path;

use mcmr_core::fmt_f64;
use mcmr_core::micromotion::{
    first_null_modulation_index, second_null_modulation_index, suppression_scan, MicromotionConfig, MicromotionSpec,
};

use crate::error::{CliError, CliResult};
use crate::output;

pub struct ScanArgs {
    pub max_displacement: f64,
    pub points: usize,
    pub displacements: Option<Vec<f64>>,
}

/// Scan CSV. Null positions precede the header as `#` comment lines.
pub fn render(spec: MicromotionSpec, args: &ScanArgs) -> CliResult<Vec<u8>> {
    let cfg = MicromotionConfig::from(spec);
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    let grid = match &args.displacements {
        Some(d) if d.is_empty() => return Err(CliError::config("displacement grid is empty")),
        Some(d) => d.clone(),
        None => {
            if args.points < 2 || !(args.max_displacement.is_finite() && args.max_displacement > 0.0) {
                return Err(CliError::config("need --points >= 2 and --max-displacement > 0"));
            }
            let n = args.points - 1;
            (0..=n).map(|i| args.max_displacement * i as f64 / n as f64).collect()
        }
    };
    let scan = suppression_scan(&cfg, &grid)?;

    let mut out = String::new();
    for (name, n) in [("first_null", first_null_modulation_index()), ("second_null", second_null_modulation_index())] {
        match cfg.displacement_for_index(n) {
            Ok(d) => out.push_str(&format!("# {name} displacement_m={} modulation_index={}\n", fmt_f64(d), fmt_f64(n))),
            Err(e) => out.push_str(&format!("# {name} unreachable: {e}\n")),
        }
    }
    let body = output::csv(
        &["displacement_m", "modulation_index", "suppression"],
        scan.iter().map(|p| [fmt_f64(p.displacement_m), fmt_f64(p.modulation_index), fmt_f64(p.suppression)]),
    )?;
    let mut bytes = out.into_bytes();
    bytes.extend(body);
    Ok(bytes)
}

pub fn run(config: &Path, args: &ScanArgs, out: Option<&Path>) -> CliResult<()> {
    let text = output::read_config(config)?;
    let spec: MicromotionSpec =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", config.display())))?;
    output::emit(out, &render(spec, args)?)
}
