//! Correlation and group-difference tests over per-repository metric rows.

mod correlation;
mod mann_whitney;
pub mod special;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{Metric, RepoMetrics};
use crate::scalar::Scalar;

pub use correlation::{mid_ranks, pearson, spearman};
pub use mann_whitney::{
    exact_two_sided_p, mann_whitney, u_null_counts, u_statistic, MannWhitney, UMethod, EXACT_LIMIT,
};

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty group")]
    EmptyGroup,
    #[error("insufficient rows: need {needed}, have {have}")]
    InsufficientRows { needed: usize, have: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult<T> {
    pub metric: String,
    pub pearson_r: T,
    pub pearson_p: T,
    pub spearman_rho: T,
    pub spearman_p: T,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupTestResult<T> {
    pub metric: String,
    pub u_value: T,
    pub p_value: T,
    pub method: UMethod,
    pub group_size: usize,
    pub high_group: Vec<String>,
    pub low_group: Vec<String>,
}

/// Outcome of one per-metric test; failures are kept per metric so a
/// degenerate column does not sink the whole table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOutcome<R> {
    pub metric: Metric,
    pub outcome: Result<R, StatsError>,
}

/// Pairs the independent variable with `metric`, keeping rows where both are present.
fn paired_columns<T: Scalar>(rows: &[RepoMetrics<T>], metric: Metric) -> (Vec<T>, Vec<T>) {
    rows.iter().filter_map(|r| Some((r.get(Metric::SharedVocab)?, r.get(metric)?))).unzip()
}

/// Pearson and Spearman of every dependent metric against shared vocabulary.
pub fn correlate_all<T: Scalar>(
    rows: &[RepoMetrics<T>],
) -> Result<Vec<MetricOutcome<CorrelationResult<T>>>, StatsError> {
    if rows.len() < 3 {
        return Err(StatsError::InsufficientRows { needed: 3, have: rows.len() });
    }
    Ok(Metric::DEPENDENT
        .iter()
        .map(|&metric| {
            let (x, y) = paired_columns(rows, metric);
            let outcome = pearson(&x, &y).and_then(|(r, rp)| {
                let (rho, sp) = spearman(&x, &y)?;
                Ok(CorrelationResult {
                    metric: metric.name().to_string(),
                    pearson_r: r,
                    pearson_p: rp,
                    spearman_rho: rho,
                    spearman_p: sp,
                    n: x.len(),
                })
            });
            MetricOutcome { metric, outcome }
        })
        .collect())
}

/// Default group size: `min(5, floor(n / 2))`.
pub fn default_group_size(rows_with_key: usize) -> usize {
    (rows_with_key / 2).min(5)
}

type Groups<T> = (Vec<RepoMetrics<T>>, Vec<RepoMetrics<T>>);

/// Top-`k` and bottom-`k` rows by `key`, descending, ties broken by repo name.
pub fn split_groups<T: Scalar>(rows: &[RepoMetrics<T>], key: Metric, k: usize) -> Result<Groups<T>, StatsError> {
    let mut keyed: Vec<(T, &RepoMetrics<T>)> =
        rows.iter().filter_map(|r| r.get(key).filter(|v| v.is_finite()).map(|v| (v, r))).collect();
    if k == 0 || keyed.len() < 2 * k {
        return Err(StatsError::InsufficientRows { needed: 2 * k.max(1), have: keyed.len() });
    }
    keyed.sort_by(|(va, ra), (vb, rb)| vb.partial_cmp(va).expect("finite keys").then_with(|| ra.repo.cmp(&rb.repo)));
    let high = keyed[..k].iter().map(|(_, r)| (*r).clone()).collect();
    let low = keyed[keyed.len() - k..].iter().map(|(_, r)| (*r).clone()).collect();
    Ok((high, low))
}

/// Mann–Whitney U of every dependent metric, high vs low shared-vocabulary group.
pub fn compare_groups<T: Scalar>(
    rows: &[RepoMetrics<T>],
    k: usize,
) -> Result<Vec<MetricOutcome<GroupTestResult<T>>>, StatsError> {
    let (high, low) = split_groups(rows, Metric::SharedVocab, k)?;
    let names = |g: &[RepoMetrics<T>]| g.iter().map(|r| r.repo.clone()).collect::<Vec<_>>();
    let high_names = names(&high);
    let low_names = names(&low);
    Ok(Metric::DEPENDENT
        .iter()
        .map(|&metric| {
            let a: Vec<T> = high.iter().filter_map(|r| r.get(metric)).collect();
            let b: Vec<T> = low.iter().filter_map(|r| r.get(metric)).collect();
            let outcome = mann_whitney(&a, &b).map(|mw| GroupTestResult {
                metric: metric.name().to_string(),
                u_value: mw.u,
                p_value: mw.p,
                method: mw.method,
                group_size: k,
                high_group: high_names.clone(),
                low_group: low_names.clone(),
            });
            MetricOutcome { metric, outcome }
        })
        .collect())
}
