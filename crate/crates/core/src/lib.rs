//! Lexical alignment between source code and documentation, code-quality
//! metrics, the statistics that relate them, communication-log metrics, and
//! a glossary linter.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the `f64` instantiation used by the command-line tool.

pub mod comm;
pub mod ingest;
pub mod lint;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod source;
pub mod stats;
pub mod text;

pub use scalar::Scalar;

pub type RepoMetricsF64 = metrics::RepoMetrics<f64>;
pub type RepoMetricsF32 = metrics::RepoMetrics<f32>;
pub type CorrelationResultF64 = stats::CorrelationResult<f64>;
pub type CorrelationResultF32 = stats::CorrelationResult<f32>;
pub type GroupTestResultF64 = stats::GroupTestResult<f64>;
pub type GroupTestResultF32 = stats::GroupTestResult<f32>;
pub type CommReportF64 = comm::CommReport<f64>;
pub type CommReportF32 = comm::CommReport<f32>;
pub type RepoAnalysisF64 = metrics::RepoAnalysis<f64>;
