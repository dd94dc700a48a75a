use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn read_config(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

pub fn read_data(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::other(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Writes to `path`, or to stdout when none is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::other(e.to_string())),
    }
}

pub fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::other(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

pub fn csv<I, R>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let err = |e: csv::Error| CliError::other(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::other(e.to_string()))
}

/// File-name form of an experiment name.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("Dark measurement & reset (1)"), "dark_measurement_reset_1");
        assert_eq!(slug("Bleed-through"), "bleed_through");
    }
}
