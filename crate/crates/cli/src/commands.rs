use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use lexalign_core::comm::{self, ResponseMode};
use lexalign_core::ingest::{self, IngestConfig};
use lexalign_core::lint::{self, LintOptions, ReportFormat};
use lexalign_core::metrics::{analyze_repo, AnalysisConfig, Metric, RepoMetrics, VocabMode};
use lexalign_core::report;
use lexalign_core::source::ParseOptions;
use lexalign_core::stats;
use lexalign_core::text::Normalizer;
use lexalign_core::RepoMetricsF64;

use crate::config::FileConfig;
use crate::{AnalysisArgs, Cli, Command, Format, IngestArgs, ModeArg};

const DEFAULT_WINDOW: usize = 3;

struct Ctx {
    file: FileConfig,
    format: Option<Format>,
    output: Option<PathBuf>,
    pool: rayon::ThreadPool,
}

impl Ctx {
    fn format_or(&self, default: Format, allowed: &[Format], command: &str) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("--format {f:?} is not supported by {command}");
        }
        Ok(f)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => write_file(path, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let jobs = cli
        .jobs
        .map(usize::from)
        .or(file.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        bail!("jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let ctx = Ctx { file, format: cli.format, output: cli.output, pool };

    match cli.command {
        Command::Analyze { path, analysis, dump_model } => analyze(&ctx, &path, &analysis, dump_model.as_deref()),
        Command::Batch { paths, analysis } => batch(&ctx, &paths, &analysis),
        Command::Correlate { csv } => correlate(&ctx, &csv),
        Command::CompareGroups { csv, k } => compare_groups(&ctx, &csv, k.map(|k| k as usize)),
        Command::Comm { log, window, any_gap, density_csv } => {
            comm(&ctx, &log, window.map(|w| w as usize), any_gap, density_csv.as_deref())
        }
        Command::Lint { path, glossary, near_miss, include_strings, ingest } => {
            lint(&ctx, &path, glossary, near_miss, include_strings, &ingest)
        }
    }
}

fn ingest_config(file: &FileConfig, args: &IngestArgs) -> IngestConfig {
    let mut cfg = file.ingest.clone().unwrap_or_default();
    if !args.code_ext.is_empty() {
        cfg.code_extensions = args.code_ext.iter().cloned().collect();
    }
    if !args.doc_ext.is_empty() {
        cfg.doc_extensions = args.doc_ext.iter().cloned().collect();
    }
    cfg.exclude_dirs.extend(args.exclude_dir.iter().cloned());
    cfg.normalized()
}

fn analysis_config(file: &FileConfig, args: &AnalysisArgs) -> Result<AnalysisConfig> {
    let mode = match args.mode {
        Some(ModeArg::FunctionDocstring) => VocabMode::FunctionDocstring,
        Some(ModeArg::GlobalDoc) => VocabMode::GlobalDoc,
        None => file.shared_vocab_mode.unwrap_or_default(),
    };
    let mut normalizer = match args.stopwords.as_ref().or(file.stopwords.as_ref()) {
        Some(p) => Normalizer::from_stopword_file(p).with_context(|| format!("reading stopwords {}", p.display()))?,
        None => Normalizer::default(),
    };
    normalizer.keep_code_fences = !(args.exclude_code_fences || file.exclude_code_fences.unwrap_or(false));
    let annotation_identifiers = !args.no_annotation_identifiers && file.annotation_identifiers.unwrap_or(true);
    Ok(AnalysisConfig { parse: ParseOptions { annotation_identifiers }, mode, normalizer })
}

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    shared_vocab_mode: &'static str,
    #[serde(flatten)]
    metrics: &'a RepoMetricsF64,
    diagnostics: &'a [String],
}

fn report_diagnostics(repo: &str, diagnostics: &[String]) {
    for d in diagnostics {
        eprintln!("{repo}: {d}");
    }
}

fn analyze(ctx: &Ctx, path: &Path, args: &AnalysisArgs, dump_model: Option<&Path>) -> Result<u8> {
    let format = ctx.format_or(Format::Json, &[Format::Json, Format::Csv], "analyze")?;
    let ingest_cfg = ingest_config(&ctx.file, &args.ingest);
    let cfg = analysis_config(&ctx.file, args)?;
    let manifest = ingest::scan_corpus(path, &ingest_cfg)?;
    let analysis = ctx.pool.install(|| analyze_repo::<f64>(&manifest, &cfg));
    eprintln!("shared_vocab mode: {}", analysis.mode.label());
    report_diagnostics(&analysis.metrics.repo, &analysis.diagnostics);
    if let Some(p) = dump_model {
        write_file(p, &(serde_json::to_string_pretty(&analysis.models)? + "\n"))?;
    }
    let text = match format {
        Format::Csv => report::write_metrics_csv(std::slice::from_ref(&analysis.metrics)),
        _ => {
            let doc = AnalyzeJson {
                shared_vocab_mode: analysis.mode.label(),
                metrics: &analysis.metrics,
                diagnostics: &analysis.diagnostics,
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn batch(ctx: &Ctx, paths: &[PathBuf], args: &AnalysisArgs) -> Result<u8> {
    let format = ctx.format_or(Format::Csv, &[Format::Json, Format::Csv], "batch")?;
    let ingest_cfg = ingest_config(&ctx.file, &args.ingest);
    let cfg = analysis_config(&ctx.file, args)?;
    let results: Vec<(RepoMetricsF64, Vec<String>, bool)> = ctx.pool.install(|| {
        paths
            .par_iter()
            .map(|p| match ingest::scan_corpus(p, &ingest_cfg) {
                Ok(manifest) => {
                    let a = analyze_repo::<f64>(&manifest, &cfg);
                    (a.metrics, a.diagnostics, true)
                }
                Err(e) => (RepoMetrics::empty(&ingest::repo_name(p)), vec![e.to_string()], false),
            })
            .collect()
    });
    let mut diag_count = 0;
    for (row, diags, _) in &results {
        diag_count += diags.len();
        report_diagnostics(&row.repo, diags);
    }
    if diag_count > 0 {
        eprintln!("{diag_count} diagnostic(s)");
    }
    if results.iter().all(|(_, _, ok)| !ok) {
        bail!("every input failed");
    }
    let mut rows: Vec<RepoMetricsF64> = results.into_iter().map(|(r, _, _)| r).collect();
    rows.sort_by(|a, b| a.repo.cmp(&b.repo));
    let text = match format {
        Format::Csv => report::write_metrics_csv(&rows),
        _ => serde_json::to_string_pretty(&rows)? + "\n",
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn read_table(path: &Path) -> Result<Vec<RepoMetricsF64>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    report::read_metrics_csv(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn correlate(ctx: &Ctx, csv: &Path) -> Result<u8> {
    let format = ctx.format_or(Format::Csv, &[Format::Json, Format::Csv], "correlate")?;
    let rows = read_table(csv)?;
    let out = stats::correlate_all(&rows)?;
    for o in &out {
        if let Err(e) = &o.outcome {
            eprintln!("{}: {e}", o.metric);
        }
    }
    let text = match format {
        Format::Csv => report::write_correlations_csv(&out),
        _ => report::outcomes_json(&out),
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn compare_groups(ctx: &Ctx, csv: &Path, k: Option<usize>) -> Result<u8> {
    let format = ctx.format_or(Format::Csv, &[Format::Json, Format::Csv], "compare-groups")?;
    let rows = read_table(csv)?;
    let keyed = rows.iter().filter(|r| r.get(Metric::SharedVocab).is_some()).count();
    let k = k.or(ctx.file.group_size).unwrap_or_else(|| stats::default_group_size(keyed));
    let out = stats::compare_groups(&rows, k)?;
    for o in &out {
        if let Err(e) = &o.outcome {
            eprintln!("{}: {e}", o.metric);
        }
    }
    let text = match format {
        Format::Csv => report::write_group_tests_csv(&out),
        _ => report::outcomes_json(&out),
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn comm(ctx: &Ctx, log: &Path, window: Option<usize>, any_gap: bool, density_path: Option<&Path>) -> Result<u8> {
    let format = ctx.format_or(Format::Json, &[Format::Json, Format::Csv], "comm")?;
    let f = File::open(log).with_context(|| format!("opening {}", log.display()))?;
    let messages = comm::read_log(BufReader::new(f))?;
    let window = window.or(ctx.file.window).unwrap_or(DEFAULT_WINDOW);
    let mode = if any_gap { ResponseMode::AnyGap } else { ctx.file.response_mode.unwrap_or_default() };
    let reports = comm::comm_reports::<f64>(messages, window, mode)?;
    for r in reports.iter().filter(|r| r.avg_response_time_s.is_none()) {
        eprintln!("{}: no message pairs; avg_response_time_s is null", r.group);
    }
    let series = report::write_density_csv(&reports);
    if let Some(p) = density_path {
        write_file(p, &series)?;
    }
    let text = match format {
        Format::Csv => series,
        _ => serde_json::to_string_pretty(&reports)? + "\n",
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn lint(
    ctx: &Ctx,
    path: &Path,
    glossary: Option<PathBuf>,
    near_miss: bool,
    include_strings: bool,
    ingest_args: &IngestArgs,
) -> Result<u8> {
    let format = match ctx.format_or(Format::Text, &[Format::Text, Format::Json], "lint")? {
        Format::Json => ReportFormat::Json,
        _ => ReportFormat::Text,
    };
    let glossary_path =
        glossary.or_else(|| ctx.file.glossary.clone()).ok_or_else(|| anyhow!("lint requires --glossary <file>"))?;
    let glossary = lint::load_glossary(&glossary_path)?;
    let manifest = ingest::scan_corpus(path, &ingest_config(&ctx.file, ingest_args))?;
    let options = LintOptions {
        near_miss: near_miss || ctx.file.near_miss.unwrap_or(false),
        include_strings: include_strings || ctx.file.include_strings.unwrap_or(false),
    };
    let findings = ctx.pool.install(|| lint::lint_corpus(&manifest, &glossary, options))?;
    let (text, status) = lint::lint_report(&findings, format);
    ctx.emit(&text)?;
    Ok(status as u8)
}
