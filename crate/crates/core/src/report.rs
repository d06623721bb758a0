//! CSV and JSON renderings of the metrics, correlation, and group-test tables.

use std::fmt::Write as _;
use std::io::Read;

use serde::Serialize;
use thiserror::Error;

use crate::comm::CommReport;
use crate::metrics::{Metric, RepoMetrics};
use crate::scalar::Scalar;
use crate::stats::{CorrelationResult, GroupTestResult, MetricOutcome};

pub const METRICS_HEADER: &str =
    "repo,shared_vocab,avg_cc,name_entropy,comment_density,readability_score,maintainability_index";
pub const CORRELATION_HEADER: &str = "metric,pearson_r,pearson_p,spearman_rho,spearman_p";
pub const GROUP_TEST_HEADER: &str = "metric,u_value,p_value";
pub const DENSITY_HEADER: &str = "group,turn_index,adjusted_density";

/// Cell written for a statistic that could not be computed.
pub const NA: &str = "NA";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("schema mismatch: expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Shortest round-trip decimal after rounding to at most 4 fractional digits.
pub fn format_table_number(value: f64) -> String {
    if !value.is_finite() {
        return NA.to_string();
    }
    let rounded = (value * 1e4).round() / 1e4;
    let s = format!("{rounded:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn full_precision<T: Scalar>(v: Option<T>) -> String {
    v.and_then(|x| x.to_f64()).map(|x| format!("{x}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Metrics table; null metrics become empty fields, values keep full precision.
pub fn write_metrics_csv<T: Scalar>(rows: &[RepoMetrics<T>]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_field(&r.repo));
        for m in Metric::ALL {
            out.push(',');
            out.push_str(&full_precision(r.get(m)));
        }
        out.push('\n');
    }
    out
}

/// Smoothed density series of every group, one row per turn.
pub fn write_density_csv<T: Scalar>(reports: &[CommReport<T>]) -> String {
    let mut out = String::from(DENSITY_HEADER);
    out.push('\n');
    for r in reports {
        for p in &r.density_by_turn {
            let _ =
                writeln!(out, "{},{},{}", csv_field(&r.group), p.turn_index, full_precision(Some(p.adjusted_density)));
        }
    }
    out
}

pub fn read_metrics_csv<T: Scalar, R: Read>(reader: R) -> Result<Vec<RepoMetrics<T>>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != METRICS_HEADER {
        return Err(ReportError::Header { expected: METRICS_HEADER.into(), found: header });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| ReportError::BadRow { row, reason: e.to_string() })?;
        let mut r = RepoMetrics::empty(&rec[0]);
        for (k, m) in Metric::ALL.into_iter().enumerate() {
            let cell = &rec[k + 1];
            if cell.is_empty() || cell == NA {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| ReportError::BadRow { row, reason: format!("{m}: not a number: {cell:?}") })?;
            r.set(m, T::from_f64(v));
        }
        rows.push(r);
    }
    Ok(rows)
}

fn cell<T: Scalar>(v: T) -> String {
    v.to_f64().map(format_table_number).unwrap_or_else(|| NA.into())
}

pub fn write_correlations_csv<T: Scalar>(rows: &[MetricOutcome<CorrelationResult<T>>]) -> String {
    let mut out = format!("{CORRELATION_HEADER}\n");
    for r in rows {
        match &r.outcome {
            Ok(c) => writeln!(
                out,
                "{},{},{},{},{}",
                r.metric,
                cell(c.pearson_r),
                cell(c.pearson_p),
                cell(c.spearman_rho),
                cell(c.spearman_p)
            ),
            Err(_) => writeln!(out, "{},{NA},{NA},{NA},{NA}", r.metric),
        }
        .expect("write to string");
    }
    out
}

pub fn write_group_tests_csv<T: Scalar>(rows: &[MetricOutcome<GroupTestResult<T>>]) -> String {
    let mut out = format!("{GROUP_TEST_HEADER}\n");
    for r in rows {
        match &r.outcome {
            Ok(g) => writeln!(out, "{},{},{}", r.metric, cell(g.u_value), cell(g.p_value)),
            Err(_) => writeln!(out, "{},{NA},{NA}", r.metric),
        }
        .expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct OutcomeJson<'a, R> {
    metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// JSON array mirroring the CSV tables at full precision; failed metrics
/// carry an `error` string instead of a `result`.
pub fn outcomes_json<R: Serialize>(rows: &[MetricOutcome<R>]) -> String {
    let items: Vec<OutcomeJson<'_, R>> = rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(v) => OutcomeJson { metric: r.metric, result: Some(v), error: None },
            Err(e) => OutcomeJson { metric: r.metric, result: None, error: Some(e.to_string()) },
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&items).expect("outcomes serialize");
    s.push('\n');
    s
}
