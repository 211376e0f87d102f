//! Report emission: the flat record schema, CSV/JSON writers and readers,
//! and per-run error-curve files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use desolve::report::Hyperparameters;
use desolve::ErrorReport;

use crate::bench::{BenchRow, CurveData};
use crate::CliError;

/// Output format of `emit_report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Invalid(format!("unknown format {other:?}"))),
        }
    }
}

/// Flat per-run record; the field order is the emitted CSV column order.
/// Error columns are empty (CSV) or null (JSON) for failed rows, and the
/// hyperparameter columns not applicable to the method stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub problem: String,
    pub method: String,
    pub n_train: usize,
    pub train_time_s: f64,
    pub max_err_train: Option<f64>,
    pub mse_train: Option<f64>,
    pub max_err_test: Option<f64>,
    pub mse_test: Option<f64>,
    pub hp_m: Option<usize>,
    pub hp_sigma: Option<f64>,
    pub hp_gamma: Option<f64>,
    pub converged: bool,
}

/// The exact emitted CSV header.
pub const CSV_HEADER: &str = "problem,method,n_train,train_time_s,max_err_train,mse_train,max_err_test,mse_test,hp_m,hp_sigma,hp_gamma,converged";

impl Record {
    pub fn from_report(report: &ErrorReport) -> Record {
        let (hp_m, hp_sigma, hp_gamma) = match report.hyperparameters {
            Hyperparameters::BasisCount(m) => (Some(m), None, None),
            Hyperparameters::Kernel { sigma, gamma } => (None, Some(sigma), Some(gamma)),
        };
        Record {
            problem: report.problem_id.to_string(),
            method: report.method.to_string(),
            n_train: report.n_train,
            train_time_s: report.train_time_s,
            max_err_train: Some(report.max_err_train),
            mse_train: Some(report.mse_train),
            max_err_test: Some(report.max_err_test),
            mse_test: Some(report.mse_test),
            hp_m,
            hp_sigma,
            hp_gamma,
            converged: report.converged,
        }
    }
}

/// Writes the records to `path` in the requested format. Floats are
/// emitted as shortest round-trip decimals by both serializers.
pub fn emit_report(records: &[Record], format: Format, path: &Path) -> Result<(), CliError> {
    if records.is_empty() {
        return Err(CliError::Invalid("no records to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_path(path).map_err(csv_io)?;
            for r in records {
                writer.serialize(r).map_err(csv_io)?;
            }
            writer.flush()?;
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(records)
                .map_err(|e| CliError::Io(e.to_string()))?;
            fs::write(path, text)?;
        }
    }
    Ok(())
}

/// Reads records back from either format, inferring it from the file
/// extension (`.json` is JSON, anything else parses as CSV).
pub fn read_records(path: &Path) -> Result<Vec<Record>, CliError> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("bad report json: {e}")))
    } else {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut out = Vec::new();
        for row in reader.deserialize() {
            out.push(row.map_err(|e| CliError::Invalid(format!("bad report csv: {e}")))?);
        }
        Ok(out)
    }
}

/// Writes one `(coordinates, |error|)` curve file per run into `dir`,
/// named `{problem}_{method}_n{count}.csv`.
pub fn emit_curves(rows: &[BenchRow], dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for row in rows {
        let Some(curve) = &row.curve else { continue };
        let name = format!(
            "{}_{}_n{}.csv",
            row.record.problem.to_lowercase(),
            row.record.method,
            row.record.n_train
        );
        let mut writer = csv::Writer::from_path(dir.join(name)).map_err(csv_io)?;
        match curve {
            CurveData::OneD(points) => {
                writer.write_record(["t", "abs_err"]).map_err(csv_io)?;
                for (t, err) in points {
                    writer
                        .write_record([t.to_string(), err.to_string()])
                        .map_err(csv_io)?;
                }
            }
            CurveData::TwoD(points) => {
                writer.write_record(["x", "y", "abs_err"]).map_err(csv_io)?;
                for (x, y, err) in points {
                    writer
                        .write_record([x.to_string(), y.to_string(), err.to_string()])
                        .map_err(csv_io)?;
                }
            }
        }
        writer.flush()?;
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<Record> {
        vec![
            Record {
                problem: "P1".into(),
                method: "tfc".into(),
                n_train: 100,
                train_time_s: 1.25e-3,
                max_err_train: Some(2.2e-16),
                mse_train: Some(1.75e-32),
                max_err_test: Some(2.2e-16),
                mse_test: Some(1.1e-32),
                hp_m: Some(26),
                hp_sigma: None,
                hp_gamma: None,
                converged: true,
            },
            Record {
                problem: "P4".into(),
                method: "csvm".into(),
                n_train: 100,
                train_time_s: 8.4e-2,
                max_err_train: Some(4.4e-8),
                mse_train: Some(2.7e-16),
                max_err_test: Some(5.6e-8),
                mse_test: Some(2.95e-16),
                hp_m: None,
                hp_sigma: Some(0.8891),
                hp_gamma: Some(1e14),
                converged: true,
            },
        ]
    }

    #[test]
    fn csv_header_matches_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_report(&sample_records(), Format::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        // Method-specific columns stay empty.
        let tfc_row = text.lines().nth(1).unwrap();
        assert!(tfc_row.ends_with(",26,,,true"), "row: {tfc_row}");
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let records = sample_records();
        emit_report(&records, Format::Csv, &path).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let records = sample_records();
        emit_report(&records, Format::Json, &path).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
    }

    #[test]
    fn empty_reports_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_report(&[], Format::Csv, &dir.path().join("x.csv"));
        assert!(matches!(err, Err(CliError::Invalid(_))));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = emit_report(
            &sample_records(),
            Format::Csv,
            Path::new("/nonexistent-dir/cannot/write.csv"),
        );
        assert!(matches!(err, Err(CliError::Io(_))));
    }
}
