//! Repository-level metrics: the shared-vocabulary score and the five
//! quality metrics that make up one row of the metrics table.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CorpusFile, CorpusManifest};
use crate::scalar::{count, lit, Scalar};
use crate::source::{parse_source, FileModel, ParseOptions};
use crate::text::{text_stats, Normalizer, TextStats, TokenSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
pub enum MetricError {
    #[error("no code files")]
    NoCodeFiles,
    #[error("no identifiers")]
    NoIdentifiers,
    #[error("no function units")]
    NoFunctions,
    #[error("no non-blank source lines")]
    EmptyCorpus,
    #[error("no comment or docstring prose")]
    NoProse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SharedVocab,
    AvgCc,
    NameEntropy,
    CommentDensity,
    ReadabilityScore,
    MaintainabilityIndex,
}

impl Metric {
    /// Column order of the metrics CSV.
    pub const ALL: [Metric; 6] = [
        Metric::SharedVocab,
        Metric::AvgCc,
        Metric::NameEntropy,
        Metric::CommentDensity,
        Metric::ReadabilityScore,
        Metric::MaintainabilityIndex,
    ];

    /// Dependent metrics in the order correlation and group tables report them.
    pub const DEPENDENT: [Metric; 5] = [
        Metric::AvgCc,
        Metric::NameEntropy,
        Metric::ReadabilityScore,
        Metric::CommentDensity,
        Metric::MaintainabilityIndex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SharedVocab => "shared_vocab",
            Metric::AvgCc => "avg_cc",
            Metric::NameEntropy => "name_entropy",
            Metric::CommentDensity => "comment_density",
            Metric::ReadabilityScore => "readability_score",
            Metric::MaintainabilityIndex => "maintainability_index",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// One repository's row. `None` marks a metric that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoMetrics<T> {
    pub repo: String,
    pub shared_vocab: Option<T>,
    pub avg_cc: Option<T>,
    pub name_entropy: Option<T>,
    pub comment_density: Option<T>,
    pub readability_score: Option<T>,
    pub maintainability_index: Option<T>,
}

impl<T: Scalar> RepoMetrics<T> {
    pub fn empty(repo: &str) -> Self {
        RepoMetrics {
            repo: repo.to_string(),
            shared_vocab: None,
            avg_cc: None,
            name_entropy: None,
            comment_density: None,
            readability_score: None,
            maintainability_index: None,
        }
    }

    pub fn get(&self, metric: Metric) -> Option<T> {
        match metric {
            Metric::SharedVocab => self.shared_vocab,
            Metric::AvgCc => self.avg_cc,
            Metric::NameEntropy => self.name_entropy,
            Metric::CommentDensity => self.comment_density,
            Metric::ReadabilityScore => self.readability_score,
            Metric::MaintainabilityIndex => self.maintainability_index,
        }
    }

    pub fn set(&mut self, metric: Metric, value: Option<T>) {
        let slot = match metric {
            Metric::SharedVocab => &mut self.shared_vocab,
            Metric::AvgCc => &mut self.avg_cc,
            Metric::NameEntropy => &mut self.name_entropy,
            Metric::CommentDensity => &mut self.comment_density,
            Metric::ReadabilityScore => &mut self.readability_score,
            Metric::MaintainabilityIndex => &mut self.maintainability_index,
        };
        *slot = value;
    }

    pub fn is_all_null(&self) -> bool {
        Metric::ALL.iter().all(|&m| self.get(m).is_none())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VocabMode {
    /// Mean Jaccard over documented function units (identifiers vs. own docstring).
    #[default]
    FunctionDocstring,
    /// One Jaccard between all code identifier tokens and all documentation-file tokens.
    GlobalDoc,
}

impl VocabMode {
    pub fn label(self) -> &'static str {
        match self {
            VocabMode::FunctionDocstring => "function-docstring",
            VocabMode::GlobalDoc => "global-doc",
        }
    }
}

/// `|A ∩ B| / |A ∪ B|`, with two empty sets scoring 0.
pub fn jaccard<T: Scalar>(a: &BTreeSet<String>, b: &BTreeSet<String>) -> T {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return T::zero();
    }
    count::<T>(inter) / count::<T>(union)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VocabScore<T> {
    pub score: T,
    pub mode: VocabMode,
    /// Units (FunctionDocstring) or set pairs (GlobalDoc) that entered the mean.
    pub samples: usize,
    pub warning: Option<String>,
}

pub fn shared_vocab_score<T: Scalar>(
    models: &[FileModel],
    docs: &[&CorpusFile],
    mode: VocabMode,
    normalizer: &Normalizer,
) -> Result<VocabScore<T>, MetricError> {
    if models.is_empty() {
        return Err(MetricError::NoCodeFiles);
    }
    match mode {
        VocabMode::FunctionDocstring => {
            let scores: Vec<T> = models
                .iter()
                .flat_map(|m| &m.units)
                .filter_map(|u| {
                    let doc = u.docstring.as_deref().filter(|d| !d.trim().is_empty())?;
                    let a = normalizer.normalize_identifiers(u.identifiers.keys());
                    let b = normalizer.normalize_text(doc);
                    Some(jaccard::<T>(&a.tokens, &b.tokens))
                })
                .collect();
            if scores.is_empty() {
                return Ok(VocabScore {
                    score: T::zero(),
                    mode,
                    samples: 0,
                    warning: Some("no documented function units; shared_vocab = 0".into()),
                });
            }
            let score = scores.iter().copied().sum::<T>() / count(scores.len());
            Ok(VocabScore { score, mode, samples: scores.len(), warning: None })
        }
        VocabMode::GlobalDoc => {
            let mut code = TokenSet::empty(crate::text::TokenSource::CodeIdentifiers);
            for m in models {
                code.extend(&normalizer.normalize_identifiers(m.all_identifiers().keys()));
            }
            let mut doc = TokenSet::empty(crate::text::TokenSource::DocText);
            for f in docs {
                doc.extend(&normalizer.normalize_text(&f.content));
            }
            let warning = docs.is_empty().then(|| "no documentation files; shared_vocab = 0".to_string());
            Ok(VocabScore { score: jaccard(&code.tokens, &doc.tokens), mode, samples: 1, warning })
        }
    }
}

/// Shannon entropy of a frequency histogram divided by `log2(k)`, for
/// `k` non-zero bins; 0 when `k <= 1`.
pub fn normalized_entropy<T: Scalar>(counts: impl IntoIterator<Item = usize>) -> T {
    let counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let k = counts.len();
    if k <= 1 {
        return T::zero();
    }
    let total: T = count(counts.iter().sum());
    let h = shannon_entropy::<T>(&counts, total);
    (h / count::<T>(k).log2()).max(T::zero()).min(T::one())
}

/// `−Σ p log2 p` over non-zero counts.
pub fn shannon_entropy<T: Scalar>(counts: &[usize], total: T) -> T {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = count::<T>(c) / total;
            -p * p.log2()
        })
        .sum()
}

pub fn name_entropy<T: Scalar>(models: &[FileModel]) -> Result<T, MetricError> {
    let mut all = crate::source::Multiset::new();
    for m in models {
        all.merge(&m.all_identifiers());
    }
    if all.total() == 0 {
        return Err(MetricError::NoIdentifiers);
    }
    Ok(normalized_entropy(all.iter().map(|(_, n)| n)))
}

pub fn avg_cyclomatic<T: Scalar>(models: &[FileModel]) -> Result<T, MetricError> {
    let ccs: Vec<usize> = models.iter().flat_map(|m| &m.units).map(|u| u.cyclomatic()).collect();
    if ccs.is_empty() {
        return Err(MetricError::NoFunctions);
    }
    Ok(count::<T>(ccs.iter().sum()) / count::<T>(ccs.len()))
}

pub fn comment_density<T: Scalar>(models: &[FileModel]) -> Result<T, MetricError> {
    let comments: usize = models.iter().map(|m| m.comment_lines).sum();
    let total: usize = models.iter().map(|m| m.total_lines).sum();
    if total == 0 {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(count::<T>(comments) / count::<T>(total))
}

/// `206.835 − 1.015 · words/sentences − 84.6 · syllables/words`
pub fn flesch_reading_ease<T: Scalar>(stats: TextStats) -> Option<T> {
    if stats.words == 0 {
        return None;
    }
    let words: T = count(stats.words);
    let sentences: T = count(stats.sentences.max(1));
    let syllables: T = count(stats.syllables);
    Some(lit::<T>(206.835) - lit::<T>(1.015) * (words / sentences) - lit::<T>(84.6) * (syllables / words))
}

/// Flesch reading ease over every comment and docstring in the corpus.
pub fn readability<T: Scalar>(models: &[FileModel]) -> Result<T, MetricError> {
    let prose: Vec<String> = models.iter().map(FileModel::prose).filter(|p| !p.is_empty()).collect();
    flesch_reading_ease(text_stats(&prose.join("\n"))).ok_or(MetricError::NoProse)
}

/// Classic 171-point maintainability index rescaled to 0–100 and clamped.
pub fn mi_formula<T: Scalar>(volume: T, avg_cc: T, sloc: T) -> T {
    let one = T::one();
    let raw = lit::<T>(171.0)
        - lit::<T>(5.2) * volume.max(one).ln()
        - lit::<T>(0.23) * avg_cc
        - lit::<T>(16.2) * sloc.max(one).ln();
    (lit::<T>(100.0) * raw / lit::<T>(171.0)).max(T::zero()).min(lit(100.0))
}

/// Halstead volume summed over files, mean CC (1 when there are no units),
/// and total SLOC.
pub fn maintainability_index<T: Scalar>(models: &[FileModel]) -> Result<T, MetricError> {
    let sloc: usize = models.iter().map(FileModel::sloc).sum();
    if sloc == 0 {
        return Err(MetricError::EmptyCorpus);
    }
    let volume: T = models.iter().map(|m| m.halstead.volume::<T>()).sum();
    let cc = avg_cyclomatic(models).unwrap_or_else(|_| T::one());
    Ok(mi_formula(volume, cc, count(sloc)))
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisConfig {
    pub parse: ParseOptions,
    pub mode: VocabMode,
    pub normalizer: Normalizer,
}

#[derive(Debug, Clone)]
pub struct RepoAnalysis<T> {
    pub metrics: RepoMetrics<T>,
    pub mode: VocabMode,
    pub diagnostics: Vec<String>,
    pub models: Vec<FileModel>,
}

/// Parses every code file (in parallel on the current rayon pool) and
/// computes the full metrics row. Metric failures become `None` with a
/// diagnostic instead of aborting the row.
pub fn analyze_repo<T: Scalar>(manifest: &CorpusManifest, config: &AnalysisConfig) -> RepoAnalysis<T> {
    let code: Vec<&CorpusFile> = manifest.code_files().collect();
    let docs: Vec<&CorpusFile> = manifest.doc_files().collect();
    let models: Vec<FileModel> = code.par_iter().map(|f| parse_source(f, config.parse)).collect();

    let mut diagnostics = Vec::new();
    for s in &manifest.skipped {
        diagnostics.push(format!("skipped {}: {}", s.path, s.reason));
    }
    for m in models.iter().filter(|m| !m.diagnostics.is_empty()) {
        for d in &m.diagnostics {
            diagnostics.push(format!("{}: {}", m.path, d));
        }
    }

    let mut metrics = RepoMetrics::empty(&manifest.repo_name());
    let mut record = |metric: Metric, r: Result<T, MetricError>, diags: &mut Vec<String>| match r {
        Ok(v) => metrics.set(metric, Some(v)),
        Err(e) => diags.push(format!("{}: {}", metric, e)),
    };
    let vocab = shared_vocab_score::<T>(&models, &docs, config.mode, &config.normalizer).map(|v| {
        if let Some(w) = &v.warning {
            diagnostics.push(format!("shared_vocab: {w}"));
        }
        v.score
    });
    record(Metric::SharedVocab, vocab, &mut diagnostics);
    record(Metric::AvgCc, avg_cyclomatic(&models), &mut diagnostics);
    record(Metric::NameEntropy, name_entropy(&models), &mut diagnostics);
    record(Metric::CommentDensity, comment_density(&models), &mut diagnostics);
    record(Metric::ReadabilityScore, readability(&models), &mut diagnostics);
    record(Metric::MaintainabilityIndex, maintainability_index(&models), &mut diagnostics);

    RepoAnalysis { metrics, mode: config.mode, diagnostics, models }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::parse_text;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn model(src: &str) -> FileModel {
        parse_text("m.py", src, ParseOptions::default())
    }

    #[test]
    fn jaccard_examples() {
        let j: f64 = jaccard(&set(&["get", "user", "id"]), &set(&["returns", "user", "id"]));
        assert_eq!(j, 0.5);
        assert_eq!(jaccard::<f64>(&set(&["a1", "b2"]), &set(&["a1", "b2"])), 1.0);
        assert_eq!(jaccard::<f64>(&set(&["aa"]), &set(&["bb"])), 0.0);
        assert_eq!(jaccard::<f64>(&set(&[]), &set(&[])), 0.0);
    }

    #[test]
    fn function_docstring_mode() {
        let m = model("def get_user_id(user):\n    \"\"\"Returns the user id.\"\"\"\n    return user.id\n\ndef undocumented():\n    pass\n");
        // identifiers {get,user,id} vs doc {returns,user,id} -> 2/4
        let s = shared_vocab_score::<f64>(&[m], &[], VocabMode::FunctionDocstring, &Normalizer::default()).unwrap();
        assert_eq!(s.score, 0.5);
        assert_eq!(s.samples, 1);
        assert!(s.warning.is_none());
    }

    #[test]
    fn no_documented_units_scores_zero_with_warning() {
        let m = model("def f(x):\n    return x\n");
        let s = shared_vocab_score::<f64>(&[m], &[], VocabMode::FunctionDocstring, &Normalizer::default()).unwrap();
        assert_eq!(s.score, 0.0);
        assert!(s.warning.is_some());
        assert_eq!(
            shared_vocab_score::<f64>(&[], &[], VocabMode::GlobalDoc, &Normalizer::default()).unwrap_err(),
            MetricError::NoCodeFiles
        );
    }

    #[test]
    fn global_doc_mode() {
        let m = model("def load_config(path):\n    return path\n");
        let doc = CorpusFile {
            path: "README.md".into(),
            kind: crate::ingest::FileKind::Doc,
            content: "Load the config from a path. Then run.".into(),
            size_bytes: 0,
        };
        // code {load, config, path}; doc {load, config, path, run}
        let s =
            shared_vocab_score::<f64>(std::slice::from_ref(&m), &[&doc], VocabMode::GlobalDoc, &Normalizer::default())
                .unwrap();
        assert_eq!(s.score, 0.75);
        let s = shared_vocab_score::<f64>(&[m], &[], VocabMode::GlobalDoc, &Normalizer::default()).unwrap();
        assert_eq!(s.score, 0.0);
        assert!(s.warning.is_some());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(normalized_entropy::<f64>([2, 2]), 1.0);
        assert_eq!(normalized_entropy::<f64>([4]), 0.0);
        let h: f64 = normalized_entropy([3, 1]);
        assert!((h - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert_eq!(name_entropy::<f64>(&[model("# nothing\n")]).unwrap_err(), MetricError::NoIdentifiers);
    }

    #[test]
    fn cyclomatic_examples() {
        let two = model("def a():\n    return 1\n\ndef b():\n    return 2\n");
        assert_eq!(avg_cyclomatic::<f64>(&[two]).unwrap(), 1.0);
        let g = model("def g(a):\n    if a and a > 0:\n        return a\n    return 0\n");
        assert_eq!(avg_cyclomatic::<f64>(std::slice::from_ref(&g)).unwrap(), 3.0);
        let f = model("def f(x):\n    return x + 1\n");
        assert_eq!(avg_cyclomatic::<f64>(&[f, g]).unwrap(), 2.0);
        assert_eq!(avg_cyclomatic::<f64>(&[model("x = 1\n")]).unwrap_err(), MetricError::NoFunctions);
    }

    #[test]
    fn comment_density_examples() {
        let mut src = String::new();
        for i in 0..100 {
            if i < 10 {
                src.push_str("# c\n");
            } else {
                src.push_str("x = 1\n");
            }
        }
        assert_eq!(comment_density::<f64>(&[model(&src)]).unwrap(), 0.1);
        assert_eq!(comment_density::<f64>(&[model("x = 1\n")]).unwrap(), 0.0);
        assert_eq!(comment_density::<f64>(&[model("# a\n# b\n")]).unwrap(), 1.0);
        assert_eq!(comment_density::<f64>(&[model("\n\n")]).unwrap_err(), MetricError::EmptyCorpus);
    }

    #[test]
    fn flesch_examples() {
        let cat: f64 = flesch_reading_ease(text_stats("The cat sat.")).unwrap();
        assert!((cat - 119.19).abs() < 1e-9);
        let v: f64 = flesch_reading_ease(TextStats { words: 10, sentences: 2, syllables: 20 }).unwrap();
        assert!((v - 32.56).abs() < 1e-9);
        assert_eq!(readability::<f64>(&[model("x = 1\n")]).unwrap_err(), MetricError::NoProse);
        let r: f64 = readability(&[model("# The cat sat.\nx = 1\n")]).unwrap();
        assert!((r - 119.19).abs() < 1e-9);
    }

    #[test]
    fn mi_examples() {
        let v: f64 = mi_formula(1.0, 1.0, 1.0);
        assert!((v - 100.0 * 170.77 / 171.0).abs() < 1e-9);
        assert!((v - 99.865_497).abs() < 1e-6);
        assert_eq!(mi_formula::<f64>(1e300, 1.0, 1e300), 0.0);
        let v: f64 = mi_formula(10f64.exp(), 2.0, 5f64.exp());
        assert!((v - 100.0 * 37.54 / 171.0).abs() < 1e-9);
        assert!((v - 21.953_216).abs() < 1e-6);
        assert_eq!(maintainability_index::<f64>(&[model("# only\n")]).unwrap_err(), MetricError::EmptyCorpus);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("bogus".parse::<Metric>().is_err());
    }
}
