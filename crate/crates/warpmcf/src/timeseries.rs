//! CSV time series, one file per monitor.

use std::fs::File;
use std::path::{Path, PathBuf};

use warpmcf_core::counterflow::MeasureSample;
use warpmcf_core::monitors::{BoundReport, BoundSample};

pub const MONITOR_COLUMNS: [&str; 4] = ["t", "measured", "bound", "margin"];

pub const COUNTERFLOW_COLUMNS: [&str; 6] =
    ["t", "sup_v_eq", "sup_v_geo", "min_transversality_eq", "min_transversality_geo", "length"];

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// 17 significant digits, enough to recover every `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn write_rows<const N: usize>(path: &Path, columns: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<(), SeriesError> {
    let csv_err = |source| SeriesError::Csv { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(|source| SeriesError::Io { path: path.to_path_buf(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.map(format_number)).map_err(csv_err)?;
    }
    w.flush().map_err(|source| SeriesError::Io { path: path.to_path_buf(), source })
}

/// `(t, measured, bound, margin)` in sample order.
pub fn write_series(path: &Path, samples: &[BoundSample]) -> Result<(), SeriesError> {
    write_rows(path, MONITOR_COLUMNS, samples.iter().map(|s| [s.t, s.measured, s.bound, s.margin]))
}

/// One `<monitor>.csv` per report inside `dir`; returns the paths written.
pub fn write_timeseries(dir: &Path, reports: &[BoundReport]) -> Result<Vec<PathBuf>, SeriesError> {
    reports
        .iter()
        .map(|r| {
            let path = dir.join(format!("{}.csv", r.id.key()));
            write_series(&path, &r.samples).map(|()| path)
        })
        .collect()
}

pub fn write_counterflow_series(path: &Path, history: &[MeasureSample]) -> Result<(), SeriesError> {
    let rows = history.iter().map(|s| {
        [s.t, s.sup_v_eq, s.sup_v_geo, s.min_transversality_eq, s.min_transversality_geo, s.length]
    });
    write_rows(path, COUNTERFLOW_COLUMNS, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn sample(t: f64, measured: f64, bound: f64) -> BoundSample {
        BoundSample { t, measured, bound, margin: bound - measured, node: 0 }
    }

    #[test]
    fn empty_series_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gradient.csv");
        write_series(&p, &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "t,measured,bound,margin\n");
    }

    #[test]
    fn rows_in_time_order_with_redundant_margin() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gradient.csv");
        let samples = [sample(0.0, 1.1, 1.25), sample(0.1, 1.0 / 3.0, 1.2)];
        write_series(&p, &samples).unwrap();
        let mut rd = csv::Reader::from_path(&p).unwrap();
        assert_eq!(rd.headers().unwrap(), &csv::StringRecord::from(MONITOR_COLUMNS.to_vec()));
        let rows: Vec<Vec<f64>> =
            rd.records().map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows[0][0] < rows[1][0]);
        for (row, s) in rows.iter().zip(&samples) {
            assert_eq!(row[1].to_bits(), s.measured.to_bits());
            assert_eq!(row[3], row[2] - row[1]);
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(f64::INFINITY), "inf");
        let x = 2.0f64.sqrt();
        assert_eq!(format_number(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
