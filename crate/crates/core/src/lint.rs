//! Glossary enforcement: flags deprecated aliases and near-miss spellings of
//! canonical terms in identifiers, comments, docstrings, and documentation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CorpusFile, CorpusManifest, FileKind};
use crate::source::{parse_detailed, string_body, ParseOptions, TokenKind};
use crate::text::split_identifier;

/// Near misses are only reported for tokens at least this long.
pub const NEAR_MISS_MIN_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum LintError {
    #[error("cannot read glossary {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("glossary parse error: {0}")]
    Parse(String),
    #[error("duplicate glossary term {0:?}")]
    DuplicateTerm(String),
    #[error("alias {alias:?} of {term:?} collides with {other:?}")]
    AliasCollision { alias: String, term: String, other: String },
    #[error("invalid glossary entry {term:?}: {reason}")]
    InvalidEntry { term: String, reason: String },
    #[error("glossary is empty")]
    EmptyGlossary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Category {
    #[serde(alias = "engineering_wide", alias = "engineering-wide")]
    EngineeringWide,
    #[serde(alias = "domain_specific", alias = "domain-specific")]
    DomainSpecific,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub term: String,
    #[serde(default)]
    pub definition: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub category: Category,
}

#[derive(Debug, Clone, Default)]
pub struct Glossary {
    entries: Vec<GlossaryEntry>,
    terms: BTreeSet<String>,
    alias_to_term: BTreeMap<String, String>,
}

fn is_normalized(token: &str) -> bool {
    !token.is_empty() && token.trim() == token && token.to_lowercase() == token
}

impl Glossary {
    /// Validates entries: normalized tokens, unique terms, aliases distinct
    /// and never equal to any term or to another entry's alias.
    pub fn new(entries: Vec<GlossaryEntry>) -> Result<Self, LintError> {
        let mut terms = BTreeSet::new();
        for e in &entries {
            if !is_normalized(&e.term) {
                return Err(LintError::InvalidEntry {
                    term: e.term.clone(),
                    reason: "term must be lowercase and non-empty".into(),
                });
            }
            if !terms.insert(e.term.clone()) {
                return Err(LintError::DuplicateTerm(e.term.clone()));
            }
        }
        let mut alias_to_term = BTreeMap::new();
        for e in &entries {
            let mut own = BTreeSet::new();
            for a in &e.aliases {
                if !is_normalized(a) {
                    return Err(LintError::InvalidEntry {
                        term: e.term.clone(),
                        reason: format!("alias {a:?} must be lowercase and non-empty"),
                    });
                }
                if a == &e.term {
                    return Err(LintError::InvalidEntry {
                        term: e.term.clone(),
                        reason: "term listed as its own alias".into(),
                    });
                }
                if !own.insert(a) {
                    return Err(LintError::InvalidEntry {
                        term: e.term.clone(),
                        reason: format!("alias {a:?} repeated"),
                    });
                }
                if terms.contains(a) {
                    return Err(LintError::AliasCollision { alias: a.clone(), term: e.term.clone(), other: a.clone() });
                }
                if let Some(prev) = alias_to_term.insert(a.clone(), e.term.clone()) {
                    return Err(LintError::AliasCollision { alias: a.clone(), term: e.term.clone(), other: prev });
                }
            }
        }
        Ok(Glossary { entries, terms, alias_to_term })
    }

    pub fn from_json(text: &str) -> Result<Self, LintError> {
        let entries: Vec<GlossaryEntry> = serde_json::from_str(text).map_err(|e| LintError::Parse(e.to_string()))?;
        Glossary::new(entries)
    }

    pub fn entries(&self) -> &[GlossaryEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check(&self, token: &str, near_miss: bool) -> Option<(String, FindingKind)> {
        if self.terms.contains(token) {
            return None;
        }
        if let Some(term) = self.alias_to_term.get(token) {
            return Some((term.clone(), FindingKind::DeprecatedAlias));
        }
        if near_miss && token.chars().count() >= NEAR_MISS_MIN_LEN {
            // terms iterate sorted, so the first hit is deterministic
            return self
                .terms
                .iter()
                .find(|t| damerau_levenshtein(token, t) == 1)
                .map(|t| (t.clone(), FindingKind::NearMiss));
        }
        None
    }
}

pub fn load_glossary(path: &Path) -> Result<Glossary, LintError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| LintError::Io { path: path.display().to_string(), source: e })?;
    Glossary::from_json(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FindingKind {
    DeprecatedAlias,
    NearMiss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FindingContext {
    Identifier,
    Comment,
    DocText,
    /// Non-docstring string literal; only checked with `include_strings`.
    StringLiteral,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LintFinding {
    pub path: String,
    pub line: usize,
    pub found: String,
    pub suggested: String,
    pub kind: FindingKind,
    pub context: FindingContext,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LintOptions {
    pub near_miss: bool,
    pub include_strings: bool,
}

/// Optimal-string-alignment distance (adjacent transpositions cost 1).
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[n][m]
}

/// Lowercased word tokens of prose: runs of alphanumerics and underscores
/// containing a letter, so snake_case terms survive intact.
fn prose_words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| w.chars().any(char::is_alphabetic))
        .map(str::to_lowercase)
}

/// Whole identifier plus its split fragments, lowercased and deduplicated.
fn identifier_candidates(ident: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    out.insert(ident.to_lowercase());
    for frag in split_identifier(ident) {
        if frag.chars().any(char::is_alphabetic) {
            out.insert(frag.to_lowercase());
        }
    }
    out
}

struct Sink<'a> {
    path: &'a str,
    glossary: &'a Glossary,
    near_miss: bool,
    out: Vec<LintFinding>,
}

impl Sink<'_> {
    fn check(&mut self, token: &str, line: usize, context: FindingContext) {
        if let Some((suggested, kind)) = self.glossary.check(token, self.near_miss) {
            self.out.push(LintFinding {
                path: self.path.to_string(),
                line,
                found: token.to_string(),
                suggested,
                kind,
                context,
            });
        }
    }

    fn prose(&mut self, text: &str, first_line: usize, context: FindingContext) {
        for (offset, line) in text.split('\n').enumerate() {
            for w in prose_words(line) {
                self.check(&w, first_line + offset, context);
            }
        }
    }
}

fn lint_file(file: &CorpusFile, glossary: &Glossary, options: LintOptions) -> Vec<LintFinding> {
    let mut sink = Sink { path: &file.path, glossary, near_miss: options.near_miss, out: Vec::new() };
    match file.kind {
        FileKind::Doc => sink.prose(&file.content, 1, FindingContext::DocText),
        FileKind::Code => {
            let parsed = parse_detailed(&file.path, &file.content, ParseOptions::default());
            for (i, tok) in parsed.lexed.tokens.iter().enumerate() {
                match tok.kind {
                    TokenKind::Name => {
                        for cand in identifier_candidates(&tok.text) {
                            sink.check(&cand, tok.line, FindingContext::Identifier);
                        }
                    }
                    TokenKind::Str => {
                        // the body starts on the token's first line
                        let body = string_body(&tok.text);
                        if parsed.docstring_tokens.contains(&i) {
                            sink.prose(body, tok.line, FindingContext::DocText);
                        } else if options.include_strings {
                            sink.prose(body, tok.line, FindingContext::StringLiteral);
                        }
                    }
                    _ => {}
                }
            }
            for c in &parsed.lexed.comments {
                sink.prose(&c.body, c.line, FindingContext::Comment);
            }
        }
        FileKind::Other => {}
    }
    sink.out
}

/// Lints every code and documentation file; findings are sorted by
/// (path, line, found) with kind and context as tie-breakers.
pub fn lint_corpus(
    manifest: &CorpusManifest,
    glossary: &Glossary,
    options: LintOptions,
) -> Result<Vec<LintFinding>, LintError> {
    if glossary.is_empty() {
        return Err(LintError::EmptyGlossary);
    }
    let mut findings: Vec<LintFinding> =
        manifest.files.par_iter().flat_map_iter(|f| lint_file(f, glossary, options)).collect();
    findings.sort();
    Ok(findings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Renders findings and returns the exit status: 0 when clean, 1 otherwise.
pub fn lint_report(findings: &[LintFinding], format: ReportFormat) -> (String, i32) {
    let status = i32::from(!findings.is_empty());
    let body = match format {
        ReportFormat::Text => findings
            .iter()
            .map(|f| format!("{}:{}: found '{}', suggest '{}' ({:?})\n", f.path, f.line, f.found, f.suggested, f.kind))
            .collect(),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(findings).expect("findings serialize");
            s.push('\n');
            s
        }
    };
    (body, status)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(term: &str, aliases: &[&str]) -> GlossaryEntry {
        GlossaryEntry {
            term: term.into(),
            definition: String::new(),
            aliases: aliases.iter().map(|s| s.to_string()).collect(),
            category: Category::EngineeringWide,
        }
    }

    fn manifest(files: &[(&str, FileKind, &str)]) -> CorpusManifest {
        CorpusManifest {
            root: "r".into(),
            files: files
                .iter()
                .map(|(p, k, c)| CorpusFile {
                    path: p.to_string(),
                    kind: *k,
                    content: c.to_string(),
                    size_bytes: c.len() as u64,
                })
                .collect(),
            skipped: vec![],
        }
    }

    #[test]
    fn glossary_validation() {
        assert!(Glossary::new(vec![entry("user_id", &["uid"])]).is_ok());
        assert!(matches!(
            Glossary::new(vec![entry("cache", &[]), entry("cache", &["memo"])]),
            Err(LintError::DuplicateTerm(t)) if t == "cache"
        ));
        assert!(matches!(
            Glossary::new(vec![entry("user_id", &[]), entry("account", &["user_id"])]),
            Err(LintError::AliasCollision { .. })
        ));
        assert!(matches!(
            Glossary::new(vec![entry("account", &["user_id"]), entry("user_id", &[])]),
            Err(LintError::AliasCollision { .. })
        ));
        assert!(matches!(Glossary::new(vec![entry("Cache", &[])]), Err(LintError::InvalidEntry { .. })));
        assert!(matches!(Glossary::new(vec![entry("cache", &["cache"])]), Err(LintError::InvalidEntry { .. })));
        assert!(matches!(Glossary::new(vec![entry("cache", &["c", "c"])]), Err(LintError::InvalidEntry { .. })));
    }

    #[test]
    fn json_format() {
        let g = Glossary::from_json(
            r#"[{"term":"user_id","definition":"Primary key of a user","aliases":["uid"],"category":"EngineeringWide"},
                {"term":"ledger","definition":"","aliases":[],"category":"domain_specific"}]"#,
        )
        .unwrap();
        assert_eq!(g.entries().len(), 2);
        assert_eq!(g.entries()[1].category, Category::DomainSpecific);
        assert!(matches!(Glossary::from_json("{"), Err(LintError::Parse(_))));
    }

    #[test]
    fn distance() {
        assert_eq!(damerau_levenshtein("usr_id", "user_id"), 1);
        assert_eq!(damerau_levenshtein("ledegr", "ledger"), 1);
        assert_eq!(damerau_levenshtein("abc", "abc"), 0);
        assert_eq!(damerau_levenshtein("", "ab"), 2);
        assert_eq!(damerau_levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn alias_in_code() {
        let g = Glossary::new(vec![entry("user_id", &["uid"])]).unwrap();
        let m = manifest(&[("a.py", FileKind::Code, "uid = 4\n")]);
        let f = lint_corpus(&m, &g, LintOptions::default()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].found.as_str(), f[0].suggested.as_str()), ("uid", "user_id"));
        assert_eq!((f[0].kind, f[0].context, f[0].line), (FindingKind::DeprecatedAlias, FindingContext::Identifier, 1));
        // fragments flag too
        let m = manifest(&[("a.py", FileKind::Code, "x = 1\ndef getUid():\n    pass\n")]);
        let f = lint_corpus(&m, &g, LintOptions::default()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].found.as_str(), f[0].line), ("uid", 2));
    }

    #[test]
    fn near_miss_in_comment() {
        let g = Glossary::new(vec![entry("user_id", &["uid"])]).unwrap();
        let m = manifest(&[("a.py", FileKind::Code, "# usr_id of the caller\nx = 1\n")]);
        assert!(lint_corpus(&m, &g, LintOptions::default()).unwrap().is_empty());
        let f = lint_corpus(&m, &g, LintOptions { near_miss: true, ..LintOptions::default() }).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FindingKind::NearMiss);
        assert_eq!(f[0].context, FindingContext::Comment);
        assert_eq!(f[0].found, "usr_id");
        assert_eq!(f[0].suggested, "user_id");
    }

    #[test]
    fn canonical_terms_are_clean() {
        let g = Glossary::new(vec![entry("user_id", &["uid"]), entry("ledger", &["book"])]).unwrap();
        let m = manifest(&[
            (
                "a.py",
                FileKind::Code,
                "def post(ledger, user_id):\n    \"\"\"Post to the ledger.\"\"\"\n    return ledger\n",
            ),
            ("README.md", FileKind::Doc, "The ledger keyed by user_id.\n"),
        ]);
        let opts = LintOptions { near_miss: true, include_strings: true };
        assert!(lint_corpus(&m, &g, opts).unwrap().is_empty());
    }

    #[test]
    fn strings_only_with_flag_and_docstrings_always() {
        let g = Glossary::new(vec![entry("user_id", &["uid"])]).unwrap();
        let src = "def f():\n    \"\"\"Doc line.\n    Takes a uid.\"\"\"\n    return 'uid'\n";
        let m = manifest(&[("a.py", FileKind::Code, src)]);
        let f = lint_corpus(&m, &g, LintOptions::default()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].context, f[0].line), (FindingContext::DocText, 3));
        let f = lint_corpus(&m, &g, LintOptions { include_strings: true, ..LintOptions::default() }).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!((f[1].context, f[1].line), (FindingContext::StringLiteral, 4));
    }

    #[test]
    fn doc_files_report_lines() {
        let g = Glossary::new(vec![entry("user_id", &["uid"])]).unwrap();
        let m = manifest(&[("docs/x.md", FileKind::Doc, "intro\n\nPass the `uid` here.\n")]);
        let f = lint_corpus(&m, &g, LintOptions::default()).unwrap();
        assert_eq!((f[0].line, f[0].context), (3, FindingContext::DocText));
    }

    #[test]
    fn empty_glossary_is_an_error() {
        let g = Glossary::new(vec![]).unwrap();
        assert!(matches!(lint_corpus(&manifest(&[]), &g, LintOptions::default()), Err(LintError::EmptyGlossary)));
    }

    #[test]
    fn report_formats() {
        assert_eq!(lint_report(&[], ReportFormat::Text), (String::new(), 0));
        let f = LintFinding {
            path: "a.py".into(),
            line: 3,
            found: "uid".into(),
            suggested: "user_id".into(),
            kind: FindingKind::DeprecatedAlias,
            context: FindingContext::Identifier,
        };
        let (text, status) = lint_report(std::slice::from_ref(&f), ReportFormat::Text);
        assert_eq!(text, "a.py:3: found 'uid', suggest 'user_id' (DeprecatedAlias)\n");
        assert_eq!(status, 1);
        let (json, status) = lint_report(&[f], ReportFormat::Json);
        assert_eq!(status, 1);
        let expected = "[\n  {\n    \"path\": \"a.py\",\n    \"line\": 3,\n    \"found\": \"uid\",\n    \"suggested\": \"user_id\",\n    \"kind\": \"DeprecatedAlias\",\n    \"context\": \"Identifier\"\n  }\n]\n";
        assert_eq!(json, expected);
    }
}
