//! CSV tables for sweeps and strategy comparisons.

use std::path::Path;

use thiserror::Error;

use crate::experiment::{ComparisonRow, SweepResult, SweepRow};

pub const SWEEP_HEADER: [&str; 10] = [
    "theta",
    "disparity",
    "trials",
    "placement_feasible_pct",
    "success_pct",
    "mean_rate_strong",
    "mean_rate_weak",
    "mean_power_strong",
    "mean_power_weak",
    "mean_sum_rate",
];

pub const COMPARISON_HEADER: [&str; 14] = [
    "strategy",
    "mode",
    "theta",
    "disparity",
    "trials",
    "placement_feasible_pct",
    "success_pct",
    "mean_rate_strong",
    "mean_rate_weak",
    "mean_power_strong",
    "mean_power_weak",
    "mean_sum_rate",
    "mean_weak_distance",
    "out_of_cell_rejections",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: header does not match the sweep schema")]
    Header { path: String },
    #[error("{path}: row {row}: {message}")]
    Row {
        path: String,
        row: usize,
        message: String,
    },
    #[error("{path}: no data rows")]
    Empty { path: String },
}

fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        String::new()
    }
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn sweep_fields(row: &SweepRow) -> [String; 10] {
    [
        real(row.theta),
        real(row.disparity),
        row.trials.to_string(),
        real(row.placement_feasible_pct),
        real(row.success_pct),
        optional(row.mean_rate_strong),
        optional(row.mean_rate_weak),
        optional(row.mean_power_strong),
        optional(row.mean_power_weak),
        optional(row.mean_sum_rate),
    ]
}

/// Sweep table as CSV text.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let rows =
        std::iter::once(SWEEP_HEADER.map(String::from)).chain(result.rows.iter().map(sweep_fields));
    for record in rows {
        writer.write_record(&record).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("ASCII output")
}

/// Comparison table as CSV text. Strategies without a fixed disparity leave
/// that column empty.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(COMPARISON_HEADER)
        .expect("writing to memory");
    for entry in rows {
        let [theta, disparity, rest @ ..] = sweep_fields(&entry.row);
        let mut record = vec![
            entry.label.clone(),
            entry.mode.to_string(),
            theta,
            disparity,
        ];
        record.extend(rest);
        record.push(optional(entry.row.mean_weak_distance));
        record.push(entry.row.out_of_cell_rejections.to_string());
        writer.write_record(&record).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("UTF-8 labels")
}

fn write_text(path: &Path, text: &str) -> Result<(), CsvError> {
    std::fs::write(path, text).map_err(|e| CsvError::Write {
        path: path.display().to_string(),
        source: e.into(),
    })
}

/// Writes a sweep table.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), CsvError> {
    write_text(path, &sweep_csv(result))
}

pub fn emit_comparison_csv(rows: &[ComparisonRow], path: &Path) -> Result<(), CsvError> {
    write_text(path, &comparison_csv(rows))
}

/// Reads a sweep table back. Rows are numbered from 1 for the first data
/// line; the header is row 0.
pub fn read_sweep_csv(path: &Path) -> Result<SweepResult, CsvError> {
    let label = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|source| CsvError::Read {
        path: label.clone(),
        source,
    })?;
    let header = reader.headers().map_err(|source| CsvError::Read {
        path: label.clone(),
        source,
    })?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(CsvError::Header { path: label });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let bad = |message: String| CsvError::Row {
            path: label.clone(),
            row,
            message,
        };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != SWEEP_HEADER.len() {
            return Err(bad(format!(
                "expected {} fields, found {}",
                SWEEP_HEADER.len(),
                record.len()
            )));
        }
        let required = |k: usize| -> Result<f64, CsvError> {
            record[k].parse::<f64>().map_err(|_| {
                bad(format!(
                    "`{}` is not a number: {:?}",
                    SWEEP_HEADER[k], &record[k]
                ))
            })
        };
        let optional = |k: usize| -> Result<Option<f64>, CsvError> {
            if record[k].is_empty() {
                Ok(None)
            } else {
                required(k).map(Some)
            }
        };
        rows.push(SweepRow {
            theta: required(0)?,
            disparity: required(1)?,
            trials: record[2]
                .parse()
                .map_err(|_| bad(format!("`trials` is not a count: {:?}", &record[2])))?,
            placement_feasible_pct: required(3)?,
            success_pct: required(4)?,
            mean_rate_strong: optional(5)?,
            mean_rate_weak: optional(6)?,
            mean_power_strong: optional(7)?,
            mean_power_weak: optional(8)?,
            mean_sum_rate: optional(9)?,
            mean_weak_distance: None,
            out_of_cell_rejections: 0,
        });
    }
    if rows.is_empty() {
        return Err(CsvError::Empty { path: label });
    }
    Ok(SweepResult { rows })
}
