//! Benchmarking datasets and their CSV forms.
//!
//! Probe CSV header: `length,seq_id,pauli,target_outcome,shots,dark_counts,bright_counts`.
//! Focus CSV header: `length,seq_id,slot,qubit,measurement,expected,shots,bright_counts`,
//! where `expected` is `0`, `1` or `none`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::clifford::Pauli;
use crate::error::{Error, Result};

pub const PROBE_HEADER: [&str; 7] =
    ["length", "seq_id", "pauli", "target_outcome", "shots", "dark_counts", "bright_counts"];
pub const FOCUS_HEADER: [&str; 8] =
    ["length", "seq_id", "slot", "qubit", "measurement", "expected", "shots", "bright_counts"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBRecord {
    pub length: usize,
    pub seq_id: usize,
    pub pauli: Pauli,
    pub target_outcome: u8,
    pub shots: u64,
    pub dark_counts: u64,
    pub bright_counts: u64,
}

impl RBRecord {
    pub fn target_counts(&self) -> u64 {
        if self.target_outcome == 0 {
            self.dark_counts
        } else {
            self.bright_counts
        }
    }

    pub fn target_frequency(&self) -> f64 {
        self.target_counts() as f64 / self.shots as f64
    }

    pub fn dark_frequency(&self) -> f64 {
        self.dark_counts as f64 / self.shots as f64
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.length == 0 {
            return Err("length must be >= 1".into());
        }
        if self.shots == 0 {
            return Err("shots must be >= 1".into());
        }
        if self.dark_counts + self.bright_counts != self.shots {
            return Err(format!(
                "dark_counts + bright_counts = {} differs from shots = {}",
                self.dark_counts + self.bright_counts,
                self.shots
            ));
        }
        if self.target_outcome != self.pauli.target_outcome() {
            return Err(format!(
                "target_outcome {} inconsistent with final Pauli {}",
                self.target_outcome,
                self.pauli.label()
            ));
        }
        Ok(())
    }
}

/// Probe-qubit counts, one record per sequence.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RBDataset {
    pub records: Vec<RBRecord>,
}

fn schema(line: u64, message: impl Into<String>) -> Error {
    Error::Schema { line: line as usize, message: message.into() }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    schema(line, e.to_string())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T> {
    let raw = rec.get(idx).ok_or_else(|| schema(line, format!("missing column {name}")))?;
    raw.trim().parse().map_err(|_| schema(line, format!("bad value {raw:?} for {name}")))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, want: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(csv_error)?;
    let got: Vec<&str> = header.iter().map(|h| h.trim()).collect();
    if got != want {
        return Err(schema(1, format!("expected header {}, got {}", want.join(","), got.join(","))));
    }
    Ok(())
}

impl RBDataset {
    pub fn new(mut records: Vec<RBRecord>) -> Result<Self> {
        for r in &records {
            r.validate().map_err(Error::Config)?;
        }
        records.sort_by_key(|r| (r.length, r.seq_id));
        Ok(Self { records })
    }

    /// Distinct lengths, ascending.
    pub fn lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.records.iter().map(|r| r.length).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    pub fn by_length(&self) -> BTreeMap<usize, Vec<&RBRecord>> {
        let mut m: BTreeMap<usize, Vec<&RBRecord>> = BTreeMap::new();
        for r in &self.records {
            m.entry(r.length).or_default().push(r);
        }
        m
    }

    /// `(length, mean target-outcome frequency)` per length.
    pub fn standard_points(&self) -> Vec<(usize, f64)> {
        self.by_length()
            .into_iter()
            .map(|(l, rs)| (l, rs.iter().map(|r| r.target_frequency()).sum::<f64>() / rs.len() as f64))
            .collect()
    }

    /// `(length, mean dark-outcome frequency)` per length.
    pub fn leakage_points(&self) -> Vec<(usize, f64)> {
        self.by_length()
            .into_iter()
            .map(|(l, rs)| (l, rs.iter().map(|r| r.dark_frequency()).sum::<f64>() / rs.len() as f64))
            .collect()
    }

    /// Per length, the number of dark-target (`1`/`Z`) and bright-target
    /// (`X`/`Y`) sequences.
    pub fn pauli_balance(&self) -> BTreeMap<usize, (usize, usize)> {
        let mut m: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for r in &self.records {
            let e = m.entry(r.length).or_default();
            if r.target_outcome == 0 {
                e.0 += 1
            } else {
                e.1 += 1
            }
        }
        m
    }

    /// One message per length whose final Paulis are unbalanced.
    pub fn balance_warnings(&self) -> Vec<String> {
        self.pauli_balance()
            .into_iter()
            .filter(|(_, (d, b))| d != b)
            .map(|(l, (d, b))| {
                format!(
                    "length {l}: {d} 1/Z vs {b} X/Y final Paulis; unbalanced selection inflates the leakage-analysis variance and can mimic leakage"
                )
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(PROBE_HEADER)?;
        for r in &self.records {
            wtr.write_record([
                r.length.to_string(),
                r.seq_id.to_string(),
                r.pauli.label().to_string(),
                r.target_outcome.to_string(),
                r.shots.to_string(),
                r.dark_counts.to_string(),
                r.bright_counts.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Parses the probe CSV; errors name the offending line (header = 1).
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        check_header(&mut rdr, &PROBE_HEADER)?;
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(csv_error)?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            if row.len() != PROBE_HEADER.len() {
                return Err(schema(line, format!("expected {} fields, got {}", PROBE_HEADER.len(), row.len())));
            }
            let pauli_raw: String = field(&row, 2, "pauli", line)?;
            let pauli =
                Pauli::parse(pauli_raw.trim()).ok_or_else(|| schema(line, format!("unknown Pauli {pauli_raw:?}")))?;
            let rec = RBRecord {
                length: field(&row, 0, "length", line)?,
                seq_id: field(&row, 1, "seq_id", line)?,
                pauli,
                target_outcome: field(&row, 3, "target_outcome", line)?,
                shots: field(&row, 4, "shots", line)?,
                dark_counts: field(&row, 5, "dark_counts", line)?,
                bright_counts: field(&row, 6, "bright_counts", line)?,
            };
            rec.validate().map_err(|m| schema(line, m))?;
            records.push(rec);
        }
        if records.is_empty() {
            return Err(schema(1, "dataset has no records"));
        }
        Self::new(records)
    }
}

/// Focus-qubit outcomes for one measurement in one interleaved slot,
/// aggregated over shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusRecord {
    pub length: usize,
    pub seq_id: usize,
    /// Interleaved slot, `0..length`.
    pub slot: usize,
    pub qubit: usize,
    /// Index of the measurement within the slot's operation list.
    pub measurement: usize,
    /// Ideal outcome, `None` when the ideal state is not a basis state.
    pub expected: Option<u8>,
    pub shots: u64,
    pub bright_counts: u64,
}

impl FocusRecord {
    pub fn errors(&self) -> Option<u64> {
        self.expected.map(|e| if e == 1 { self.shots - self.bright_counts } else { self.bright_counts })
    }
}

pub fn write_focus_csv<W: Write>(records: &[FocusRecord], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FOCUS_HEADER)?;
    for r in records {
        wtr.write_record([
            r.length.to_string(),
            r.seq_id.to_string(),
            r.slot.to_string(),
            r.qubit.to_string(),
            r.measurement.to_string(),
            r.expected.map(|e| e.to_string()).unwrap_or_else(|| "none".into()),
            r.shots.to_string(),
            r.bright_counts.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_focus_csv<R: Read>(r: R) -> Result<Vec<FocusRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    check_header(&mut rdr, &FOCUS_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let expected_raw: String = field(&row, 5, "expected", line)?;
        let expected = match expected_raw.trim() {
            "none" => None,
            "0" => Some(0),
            "1" => Some(1),
            other => return Err(schema(line, format!("bad expected outcome {other:?}"))),
        };
        let rec = FocusRecord {
            length: field(&row, 0, "length", line)?,
            seq_id: field(&row, 1, "seq_id", line)?,
            slot: field(&row, 2, "slot", line)?,
            qubit: field(&row, 3, "qubit", line)?,
            measurement: field(&row, 4, "measurement", line)?,
            expected,
            shots: field(&row, 6, "shots", line)?,
            bright_counts: field(&row, 7, "bright_counts", line)?,
        };
        if rec.shots == 0 || rec.bright_counts > rec.shots {
            return Err(schema(line, "bright_counts must lie in [0, shots] with shots >= 1"));
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RBDataset {
        RBDataset::new(vec![
            RBRecord {
                length: 2,
                seq_id: 0,
                pauli: Pauli::I,
                target_outcome: 0,
                shots: 10,
                dark_counts: 9,
                bright_counts: 1,
            },
            RBRecord {
                length: 2,
                seq_id: 1,
                pauli: Pauli::X,
                target_outcome: 1,
                shots: 10,
                dark_counts: 2,
                bright_counts: 8,
            },
        ])
        .unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let ds = sample();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(RBDataset::read_csv(buf.as_slice()).unwrap(), ds);
    }

    #[test]
    fn truncated_row_reports_line() {
        let text = "length,seq_id,pauli,target_outcome,shots,dark_counts,bright_counts\n2,0,I,0,10,9,1\n2,1,X,1\n";
        match RBDataset::read_csv(text.as_bytes()) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_counts_report_line() {
        let text = "length,seq_id,pauli,target_outcome,shots,dark_counts,bright_counts\n2,0,I,0,10,9,2\n";
        assert!(matches!(RBDataset::read_csv(text.as_bytes()), Err(Error::Schema { line: 2, .. })));
    }

    #[test]
    fn balance_warning() {
        let mut ds = sample();
        assert!(ds.balance_warnings().is_empty());
        ds.records[1].pauli = Pauli::Z;
        ds.records[1].target_outcome = 0;
        assert_eq!(ds.balance_warnings().len(), 1);
    }

    #[test]
    fn focus_round_trip() {
        let recs = vec![
            FocusRecord {
                length: 2,
                seq_id: 0,
                slot: 1,
                qubit: 3,
                measurement: 0,
                expected: None,
                shots: 5,
                bright_counts: 2,
            },
            FocusRecord {
                length: 2,
                seq_id: 0,
                slot: 1,
                qubit: 3,
                measurement: 1,
                expected: Some(0),
                shots: 5,
                bright_counts: 0,
            },
        ];
        let mut buf = Vec::new();
        write_focus_csv(&recs, &mut buf).unwrap();
        assert_eq!(read_focus_csv(buf.as_slice()).unwrap(), recs);
    }
}
