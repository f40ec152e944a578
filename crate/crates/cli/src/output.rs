//! CSV and JSON serialization.
//!
//! The CSV schema is frozen: downstream plotting reads it by header name.
//!
//! | column           | meaning                                                 |
//! |------------------|---------------------------------------------------------|
//! | `axis_value`     | sweep files only: value of the swept parameter          |
//! | `step`           | step index `k`, starting at 0                           |
//! | `wt`             | dimensionless time `w·k·T`                              |
//! | `nu`             | particle number density                                 |
//! | `g2`             | vacuum persistence probability                          |
//! | `lambda`         | rate function `-ln(g2)/N`, with `g2` floored at 1e-300  |
//! | `negativity`     | negativity across the configured cut                    |
//! | `log_negativity` | logarithmic negativity across the cut                   |
//! | `retention`      | post-selection survival probability; empty when off     |

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use schwinger_core::observables::ObservableRecord;

use crate::config::RunConfig;

pub const CSV_HEADER: [&str; 8] = [
    "step",
    "wt",
    "nu",
    "g2",
    "lambda",
    "negativity",
    "log_negativity",
    "retention",
];

pub const AXIS_COLUMN: &str = "axis_value";

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn record_fields(r: &ObservableRecord) -> [String; 8] {
    [
        r.step.to_string(),
        format_float(r.wt),
        format_float(r.nu),
        format_float(r.g2),
        format_float(r.lambda),
        format_float(r.negativity),
        format_float(r.log_negativity),
        r.retention.map(format_float).unwrap_or_default(),
    ]
}

pub fn write_records<W: Write>(out: W, records: &[ObservableRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format sweep table: one block of rows per point, in input order.
pub fn write_sweep<W: Write>(out: W, points: &[(f64, Vec<ObservableRecord>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once(AXIS_COLUMN).chain(CSV_HEADER))?;
    for (value, records) in points {
        let v = format_float(*value);
        for r in records {
            w.write_record(std::iter::once(v.clone()).chain(record_fields(r)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Aggregate numbers of one series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub rows: usize,
    pub max_nu: f64,
    pub max_log_negativity: f64,
    pub min_retention: Option<f64>,
    /// Rows whose `lambda` uses the `g2` floor.
    pub clipped_lambda_rows: usize,
}

impl SeriesSummary {
    pub fn of(records: &[ObservableRecord]) -> Self {
        let max = |f: fn(&ObservableRecord) -> f64| {
            records.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
        };
        Self {
            rows: records.len(),
            max_nu: max(|r| r.nu),
            max_log_negativity: max(|r| r.log_negativity),
            min_retention: records
                .iter()
                .filter_map(|r| r.retention)
                .reduce(f64::min),
            clipped_lambda_rows: records.iter().filter(|r| r.lambda_clipped).count(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub csv_columns: [&'static str; 8],
    pub series: SeriesSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPointSummary {
    pub axis_value: f64,
    pub series: SeriesSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub axis: &'static str,
    pub values: Vec<f64>,
    pub points: Vec<SweepPointSummary>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(step: usize, retention: Option<f64>) -> ObservableRecord {
        ObservableRecord {
            step,
            wt: 0.25 * step as f64,
            nu: 0.1,
            g2: 1e-310,
            lambda: 172.69388197455342,
            lambda_clipped: true,
            negativity: 0.0,
            log_negativity: 0.0,
            retention,
        }
    }

    #[test]
    fn header_and_empty_retention() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[rec(0, None), rec(1, Some(0.5))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,wt,nu,g2,lambda,negativity,log_negativity,retention");
        assert_eq!(lines[1], "0,0,0.1,1e-310,172.69388197455342,0,0,");
        assert_eq!(lines[2], "1,0.25,0.1,1e-310,172.69388197455342,0,0,0.5");
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-5, 3.0e-300, 0.1 + 0.2, 1e20, 5e-324] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(4.0), "4");
    }

    #[test]
    fn sweep_rows_lead_with_axis_value() {
        let mut buf = Vec::new();
        write_sweep(&mut buf, &[(2.0, vec![rec(0, None)]), (0.5, vec![rec(0, None)])]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("axis_value,step,wt"));
        assert!(lines[1].starts_with("2,0,"));
        assert!(lines[2].starts_with("0.5,0,"));
    }

    #[test]
    fn summary_aggregates() {
        let s = SeriesSummary::of(&[rec(0, Some(0.9)), rec(1, Some(0.7))]);
        assert_eq!(s.rows, 2);
        assert_eq!(s.min_retention, Some(0.7));
        assert_eq!(s.clipped_lambda_rows, 2);
    }
}
