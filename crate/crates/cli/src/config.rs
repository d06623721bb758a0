//! Optional JSON run configuration. Command-line flags take precedence.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use lexalign_core::comm::ResponseMode;
use lexalign_core::ingest::IngestConfig;
use lexalign_core::metrics::VocabMode;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub ingest: Option<IngestConfig>,
    pub shared_vocab_mode: Option<VocabMode>,
    pub annotation_identifiers: Option<bool>,
    pub stopwords: Option<PathBuf>,
    pub exclude_code_fences: Option<bool>,
    pub group_size: Option<usize>,
    pub window: Option<usize>,
    pub response_mode: Option<ResponseMode>,
    pub glossary: Option<PathBuf>,
    pub near_miss: Option<bool>,
    pub include_strings: Option<bool>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
