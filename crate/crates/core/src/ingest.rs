//! Corpus discovery: walks a directory tree or a zip archive and classifies
//! every file as code, documentation, or other.
//!
//! Output is sorted by normalized relative path so repeated scans of the same
//! tree produce identical manifests no matter how file reads are scheduled.
//! Zip archives whose entries all sit under one top-level folder (the layout
//! of hosted-repository downloads) have that folder stripped, so a directory
//! and its zipped form produce the same paths.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("source not found: {0}")]
    SourceNotFound(PathBuf),
    #[error("archive corrupt: {path}: {reason}")]
    ArchiveCorrupt { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FileKind {
    Code,
    Doc,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// Lowercase extensions without the leading dot.
    pub code_extensions: BTreeSet<String>,
    pub doc_extensions: BTreeSet<String>,
    /// Directory names excluded wherever they appear as a path segment.
    pub exclude_dirs: BTreeSet<String>,
    /// Exclude directories whose name starts with '.'.
    pub exclude_hidden_dirs: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        IngestConfig {
            code_extensions: set(&["py"]),
            doc_extensions: set(&["md", "rst", "txt"]),
            exclude_dirs: set(&["node_modules", "venv", ".venv", "build", "dist", "__pycache__", "site-packages"]),
            exclude_hidden_dirs: true,
        }
    }
}

impl IngestConfig {
    /// Normalizes user-supplied extensions (`.PY` → `py`).
    pub fn normalized(mut self) -> Self {
        let norm = |set: &BTreeSet<String>| {
            set.iter().map(|e| e.trim().trim_start_matches('.').to_lowercase()).filter(|e| !e.is_empty()).collect()
        };
        self.code_extensions = norm(&self.code_extensions);
        self.doc_extensions = norm(&self.doc_extensions);
        self
    }

    fn excludes_dir(&self, segment: &str) -> bool {
        (self.exclude_hidden_dirs && segment.starts_with('.') && segment != "." && segment != "..")
            || self.exclude_dirs.contains(segment)
    }

    /// True when any directory segment of `rel_path` is excluded.
    pub fn excludes_path(&self, rel_path: &str) -> bool {
        let mut segments: Vec<&str> = rel_path.split('/').collect();
        segments.pop();
        segments.iter().any(|s| self.excludes_dir(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFile {
    /// Relative path with '/' separators.
    pub path: String,
    pub kind: FileKind,
    /// Lossily decoded UTF-8. Empty for `Other` files, which are never read.
    pub content: String,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub root: String,
    pub files: Vec<CorpusFile>,
    pub skipped: Vec<SkippedFile>,
}

impl CorpusManifest {
    pub fn code_files(&self) -> impl Iterator<Item = &CorpusFile> {
        self.files.iter().filter(|f| f.kind == FileKind::Code)
    }

    pub fn doc_files(&self) -> impl Iterator<Item = &CorpusFile> {
        self.files.iter().filter(|f| f.kind == FileKind::Doc)
    }

    /// Repository name: the final component of the scanned source path.
    pub fn repo_name(&self) -> String {
        repo_name(Path::new(&self.root))
    }
}

pub fn repo_name(source: &Path) -> String {
    source
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_string_lossy().into_owned())
}

/// Classifies by final extension, case-insensitively.
pub fn classify_extension(path: &str, config: &IngestConfig) -> FileKind {
    let name = path.rsplit(['/', '\\']).next().unwrap_or(path);
    let ext = match name.rsplit_once('.') {
        Some((stem, ext)) if !stem.is_empty() && !ext.is_empty() => ext.to_lowercase(),
        _ => return FileKind::Other,
    };
    if config.code_extensions.contains(&ext) {
        FileKind::Code
    } else if config.doc_extensions.contains(&ext) {
        FileKind::Doc
    } else {
        FileKind::Other
    }
}

/// Scans a directory or a zip archive into a sorted manifest.
pub fn scan_corpus(source: &Path, config: &IngestConfig) -> Result<CorpusManifest, IngestError> {
    let meta = std::fs::metadata(source).map_err(|_| IngestError::SourceNotFound(source.to_path_buf()))?;
    let (mut files, mut skipped) =
        if meta.is_dir() { scan_directory(source, config) } else { scan_zip(source, config)? };
    files.sort_by(|a, b| a.path.cmp(&b.path));
    skipped.sort_by(|a, b| a.path.cmp(&b.path).then_with(|| a.reason.cmp(&b.reason)));
    Ok(CorpusManifest { root: source.to_string_lossy().into_owned(), files, skipped })
}

fn decode(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn scan_directory(root: &Path, config: &IngestConfig) -> (Vec<CorpusFile>, Vec<SkippedFile>) {
    let mut skipped = Vec::new();
    let mut pending = Vec::new();
    let walker = WalkDir::new(root).follow_links(false).sort_by_file_name().into_iter().filter_entry(|e| {
        e.depth() == 0 || !e.file_type().is_dir() || !config.excludes_dir(&e.file_name().to_string_lossy())
    });
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(err) => {
                let path = err.path().and_then(|p| p.strip_prefix(root).ok()).map(rel_string).unwrap_or_default();
                skipped.push(SkippedFile { path, reason: format!("walk error: {err}") });
                continue;
            }
        };
        if entry.file_type().is_dir() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays under root");
        let rel_path = rel_string(rel);
        if rel.to_str().is_none() {
            skipped.push(SkippedFile { path: rel_path, reason: "path is not valid UTF-8".into() });
            continue;
        }
        if entry.file_type().is_symlink() {
            skipped.push(SkippedFile { path: rel_path, reason: "symlink not followed".into() });
            continue;
        }
        let kind = classify_extension(&rel_path, config);
        pending.push((rel_path, entry.into_path(), kind));
    }

    let results: Vec<Result<CorpusFile, SkippedFile>> =
        pending.into_par_iter().map(|(path, abs, kind)| read_file(path, &abs, kind)).collect();
    let mut files = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(f) => files.push(f),
            Err(s) => skipped.push(s),
        }
    }
    (files, skipped)
}

fn read_file(path: String, abs: &Path, kind: FileKind) -> Result<CorpusFile, SkippedFile> {
    let fail = |e: std::io::Error| SkippedFile { path: path.clone(), reason: format!("read error: {e}") };
    if kind == FileKind::Other {
        let size = std::fs::symlink_metadata(abs).map_err(fail)?.len();
        return Ok(CorpusFile { path, kind, content: String::new(), size_bytes: size });
    }
    let bytes = std::fs::read(abs).map_err(fail)?;
    Ok(CorpusFile { size_bytes: bytes.len() as u64, content: decode(&bytes), path, kind })
}

fn rel_string(p: &Path) -> String {
    p.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

const S_IFMT: u32 = 0o170000;
const S_IFLNK: u32 = 0o120000;

fn scan_zip(source: &Path, config: &IngestConfig) -> Result<(Vec<CorpusFile>, Vec<SkippedFile>), IngestError> {
    let corrupt = |reason: String| IngestError::ArchiveCorrupt { path: source.to_path_buf(), reason };
    let file = File::open(source).map_err(|e| IngestError::Io { path: source.to_path_buf(), source: e })?;
    let mut archive = zip::ZipArchive::new(file).map_err(|e| corrupt(e.to_string()))?;

    struct Entry {
        index: usize,
        path: String,
        is_dir: bool,
        is_symlink: bool,
    }
    let mut skipped = Vec::new();
    let mut entries = Vec::new();
    for index in 0..archive.len() {
        let zf = archive.by_index_raw(index).map_err(|e| corrupt(e.to_string()))?;
        let raw_name = zf.name().replace('\\', "/");
        let Some(safe) = zf.enclosed_name() else {
            skipped.push(SkippedFile { path: raw_name, reason: "unsafe archive path".into() });
            continue;
        };
        let path = rel_string(&safe);
        if path.is_empty() {
            continue;
        }
        let is_symlink = zf.unix_mode().is_some_and(|m| m & S_IFMT == S_IFLNK);
        entries.push(Entry { index, path, is_dir: zf.is_dir(), is_symlink });
    }

    let strip = single_top_level_dir(entries.iter().map(|e| (e.path.as_str(), e.is_dir)));
    let mut seen = HashSet::new();
    let mut files = Vec::new();
    for e in entries.into_iter().filter(|e| !e.is_dir) {
        let path = match &strip {
            Some(top) => e.path[top.len() + 1..].to_string(),
            None => e.path.clone(),
        };
        if config.excludes_path(&path) {
            continue;
        }
        if e.is_symlink {
            skipped.push(SkippedFile { path, reason: "symlink not followed".into() });
            continue;
        }
        if !seen.insert(path.clone()) {
            skipped.push(SkippedFile { path, reason: "duplicate archive entry".into() });
            continue;
        }
        let kind = classify_extension(&path, config);
        let mut zf = archive.by_index(e.index).map_err(|err| corrupt(err.to_string()))?;
        if kind == FileKind::Other {
            files.push(CorpusFile { path, kind, content: String::new(), size_bytes: zf.size() });
            continue;
        }
        let mut bytes = Vec::with_capacity(zf.size() as usize);
        match zf.read_to_end(&mut bytes) {
            Ok(_) => files.push(CorpusFile { size_bytes: bytes.len() as u64, content: decode(&bytes), path, kind }),
            Err(err) => skipped.push(SkippedFile { path, reason: format!("read error: {err}") }),
        }
    }
    Ok((files, skipped))
}

/// The shared first segment when every entry lives under one top-level directory.
fn single_top_level_dir<'a>(entries: impl Iterator<Item = (&'a str, bool)>) -> Option<String> {
    let mut top: Option<&str> = None;
    let mut any_file = false;
    for (path, is_dir) in entries {
        let (first, rest) = match path.split_once('/') {
            Some((f, r)) => (f, r),
            None if is_dir => (path, ""),
            None => return None,
        };
        if !is_dir && rest.is_empty() {
            return None;
        }
        any_file |= !is_dir;
        match top {
            None => top = Some(first),
            Some(t) if t == first => {}
            Some(_) => return None,
        }
    }
    top.filter(|_| any_file).map(str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let c = IngestConfig::default();
        assert_eq!(classify_extension("x/y.PY", &c), FileKind::Code);
        assert_eq!(classify_extension("docs/guide.rst", &c), FileKind::Doc);
        assert_eq!(classify_extension("Makefile", &c), FileKind::Other);
        assert_eq!(classify_extension("a/.md", &c), FileKind::Other);
        assert_eq!(classify_extension("archive.tar.txt", &c), FileKind::Doc);
    }

    #[test]
    fn config_normalization() {
        let c = IngestConfig { code_extensions: [".PY".to_string(), "Pyi".into()].into(), ..IngestConfig::default() }
            .normalized();
        assert_eq!(classify_extension("m.pyi", &c), FileKind::Code);
        assert_eq!(classify_extension("m.py", &c), FileKind::Code);
    }

    #[test]
    fn exclusion_is_segment_based() {
        let c = IngestConfig::default();
        assert!(c.excludes_path("venv/x.py"));
        assert!(c.excludes_path("a/node_modules/b/c.md"));
        assert!(c.excludes_path(".git/config.txt"));
        assert!(!c.excludes_path("myvenv.py"));
        assert!(!c.excludes_path("myvenv/x.py"));
        assert!(!c.excludes_path("venv.py"));
        assert!(!c.excludes_path(".hidden_file.py"));
    }

    #[test]
    fn top_level_detection() {
        let one = [("repo-main/", true), ("repo-main/a.py", false), ("repo-main/pkg/mod.py", false)];
        assert_eq!(single_top_level_dir(one.into_iter()), Some("repo-main".into()));
        let flat = [("a.py", false), ("pkg/mod.py", false)];
        assert_eq!(single_top_level_dir(flat.into_iter()), None);
        let two = [("x/a.py", false), ("y/b.py", false)];
        assert_eq!(single_top_level_dir(two.into_iter()), None);
        let only_dirs = [("x/", true)];
        assert_eq!(single_top_level_dir(only_dirs.into_iter()), None);
    }
}
