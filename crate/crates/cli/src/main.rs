//! Command-line entry point.
//!
//! Exit codes: 0 success (tables may contain NA cells), 1 lint findings,
//! 2 usage or operational error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lexalign", version, about = "Shared-vocabulary and code-quality metrics for repositories")]
pub struct Cli {
    /// Output format (default depends on the subcommand).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for file analysis.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    FunctionDocstring,
    GlobalDoc,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Code file extension (repeatable; replaces the default set).
    #[arg(long = "code-ext")]
    pub code_ext: Vec<String>,
    /// Documentation file extension (repeatable; replaces the default set).
    #[arg(long = "doc-ext")]
    pub doc_ext: Vec<String>,
    /// Extra directory name to exclude (repeatable).
    #[arg(long = "exclude-dir")]
    pub exclude_dir: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    #[command(flatten)]
    pub ingest: IngestArgs,
    /// Shared-vocabulary granularity.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Do not count names inside type annotations as identifiers.
    #[arg(long)]
    pub no_annotation_identifiers: bool,
    /// Stopword file (one token per line) replacing the built-in list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Drop fenced code blocks from documentation text.
    #[arg(long)]
    pub exclude_code_fences: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the metrics row for one repository (directory or zip).
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Write the parsed file models as JSON.
        #[arg(long)]
        dump_model: Option<PathBuf>,
    },
    /// Compute metrics rows for several repositories.
    Batch {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Pearson and Spearman correlations of each metric against shared vocabulary.
    Correlate { csv: PathBuf },
    /// Mann-Whitney U tests between the top-k and bottom-k shared-vocabulary repositories.
    CompareGroups {
        csv: PathBuf,
        /// Group size (default min(5, n/2)).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
    },
    /// Communication metrics from a chat-log CSV.
    Comm {
        log: PathBuf,
        /// Trailing moving-average window over turns.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        window: Option<u32>,
        /// Average every gap between consecutive messages instead of user→assistant latency.
        #[arg(long)]
        any_gap: bool,
        /// Also write the smoothed density series as CSV.
        #[arg(long)]
        density_csv: Option<PathBuf>,
    },
    /// Check a corpus against a glossary.
    Lint {
        path: PathBuf,
        #[arg(long)]
        glossary: Option<PathBuf>,
        /// Report spellings one edit away from a canonical term.
        #[arg(long)]
        near_miss: bool,
        /// Also check non-docstring string literals.
        #[arg(long)]
        include_strings: bool,
        #[command(flatten)]
        ingest: IngestArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
