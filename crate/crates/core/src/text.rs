//! Token normalization for identifiers and prose, plus the word, sentence,
//! and syllable counts that feed the readability score.

use std::collections::BTreeSet;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

const BUILTIN_STOPWORDS: &str = include_str!("stopwords.txt");

/// Fragments shorter than this are dropped.
pub const MIN_TOKEN_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenSource {
    CodeIdentifiers,
    DocText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSet {
    pub tokens: BTreeSet<String>,
    pub source: TokenSource,
}

impl TokenSet {
    pub fn empty(source: TokenSource) -> Self {
        TokenSet { tokens: BTreeSet::new(), source }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn extend(&mut self, other: &TokenSet) {
        self.tokens.extend(other.tokens.iter().cloned());
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
}

/// Stopword list and options shared by identifier and prose normalization.
#[derive(Debug, Clone)]
pub struct Normalizer {
    stopwords: BTreeSet<String>,
    /// Keep fenced code blocks (```) in documentation text.
    pub keep_code_fences: bool,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer { stopwords: parse_stopwords(BUILTIN_STOPWORDS), keep_code_fences: true }
    }
}

fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

impl Normalizer {
    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Normalizer {
            stopwords: words.into_iter().map(|w| w.as_ref().trim().to_lowercase()).filter(|w| !w.is_empty()).collect(),
            keep_code_fences: true,
        }
    }

    /// Loads a stopword file, one token per line (`#` starts a comment line).
    pub fn from_stopword_file(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Normalizer { stopwords: parse_stopwords(&text), keep_code_fences: true })
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    fn accept(&self, fragment: &str) -> Option<String> {
        let lower = fragment.to_lowercase();
        let ok = lower.chars().count() >= MIN_TOKEN_LEN
            && lower.chars().any(char::is_alphabetic)
            && !self.stopwords.contains(&lower);
        ok.then_some(lower)
    }

    /// Splits identifiers into lowercase word fragments and collects them as a set.
    pub fn normalize_identifiers<I, S>(&self, identifiers: I) -> TokenSet
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = TokenSet::empty(TokenSource::CodeIdentifiers);
        for ident in identifiers {
            for frag in split_identifier(ident.as_ref()) {
                if let Some(tok) = self.accept(&frag) {
                    set.tokens.insert(tok);
                }
            }
        }
        set
    }

    /// Word tokens of natural-language text.
    pub fn normalize_text(&self, text: &str) -> TokenSet {
        let mut set = TokenSet::empty(TokenSource::DocText);
        let owned;
        let text = if self.keep_code_fences {
            text
        } else {
            owned = strip_code_fences(text);
            &owned
        };
        for word in alphanumeric_runs(text) {
            if let Some(tok) = self.accept(word) {
                set.tokens.insert(tok);
            }
        }
        set
    }
}

/// Maximal alphanumeric runs that contain at least one letter.
pub fn alphanumeric_runs(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| w.chars().any(char::is_alphabetic))
}

/// Removes lines inside ``` fences, fence lines included.
pub fn strip_code_fences(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut inside = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            inside = !inside;
            continue;
        }
        if !inside {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
}

fn class_of(c: char) -> CharClass {
    if c.is_numeric() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else {
        CharClass::Lower
    }
}

/// Splits an identifier on separators, camelCase humps, acronym boundaries
/// (`HTTPServer` → `HTTP`, `Server`) and letter/digit transitions.
/// Case is preserved; empty fragments are never returned.
pub fn split_identifier(ident: &str) -> Vec<String> {
    let mut out = Vec::new();
    for run in ident.split(|c: char| !c.is_alphanumeric()) {
        let chars: Vec<char> = run.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let prev = class_of(chars[i - 1]);
            let cur = class_of(chars[i]);
            let boundary = match (prev, cur) {
                (CharClass::Lower, CharClass::Upper) => true,
                (CharClass::Digit, CharClass::Digit) => false,
                (CharClass::Digit, _) | (_, CharClass::Digit) => true,
                (CharClass::Upper, CharClass::Upper) => {
                    i + 1 < chars.len() && class_of(chars[i + 1]) == CharClass::Lower
                }
                _ => false,
            };
            if boundary {
                out.push(chars[start..i].iter().collect());
                start = i;
            }
        }
        if start < chars.len() {
            out.push(chars[start..].iter().collect());
        }
    }
    out
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable estimate for one word; always at least 1.
pub fn syllables(word: &str) -> usize {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).flat_map(char::to_lowercase).collect();
    let mut groups = 0;
    let mut in_group = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    if groups > 1 && letters.last() == Some(&'e') {
        groups -= 1;
    }
    groups.max(1)
}

/// Word, sentence, and syllable counts of prose.
pub fn text_stats(text: &str) -> TextStats {
    let mut stats = TextStats::default();
    for word in text.split_whitespace().filter(|w| w.chars().any(char::is_alphabetic)) {
        stats.words += 1;
        stats.syllables += syllables(word);
    }
    if stats.words == 0 {
        return TextStats::default();
    }
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '.' | '!' | '?') {
                j += 1;
            }
            if j == chars.len() || chars[j].is_whitespace() {
                stats.sentences += 1;
            }
            i = j;
        } else {
            i += 1;
        }
    }
    stats.sentences = stats.sentences.max(1);
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identifier_examples() {
        let n = Normalizer::default();
        assert_eq!(n.normalize_identifiers(["getUserId", "user_id"]).tokens, set(&["get", "user", "id"]));
        assert!(n.normalize_identifiers(["x", "y"]).is_empty());
        assert_eq!(n.normalize_identifiers(["HTTPServer"]).tokens, set(&["http", "server"]));
    }

    #[test]
    fn split_rules() {
        assert_eq!(split_identifier("parseHTTPResponse2Json"), ["parse", "HTTP", "Response", "2", "Json"]);
        assert_eq!(split_identifier("__init__"), ["init"]);
        assert_eq!(split_identifier("UserID"), ["User", "ID"]);
        assert_eq!(split_identifier("utf8Decode"), ["utf", "8", "Decode"]);
        assert_eq!(split_identifier("ABC"), ["ABC"]);
        assert!(split_identifier("___").is_empty());
    }

    #[test]
    fn splitting_invariance() {
        let n = Normalizer::default();
        let a = n.normalize_identifiers(["user_id"]);
        assert_eq!(a, n.normalize_identifiers(["userId"]));
        assert_eq!(a, n.normalize_identifiers(["UserID"]));
    }

    #[test]
    fn text_examples() {
        let n = Normalizer::default();
        assert_eq!(n.normalize_text("Returns the user id.").tokens, set(&["returns", "user", "id"]));
        assert!(n.normalize_text("").is_empty());
        assert!(n.normalize_text("A a THE").is_empty());
        assert_eq!(n.normalize_text("retry 3 times, 42x").tokens, set(&["retry", "times", "42x"]));
    }

    #[test]
    fn code_fences_toggle() {
        let doc = "Intro text.\n```\nfetch_rows(limit)\n```\nOutro.";
        let mut n = Normalizer::default();
        assert!(n.normalize_text(doc).tokens.contains("fetch"));
        n.keep_code_fences = false;
        let t = n.normalize_text(doc).tokens;
        assert!(!t.contains("fetch") && !t.contains("limit"));
        assert!(t.contains("outro"));
    }

    #[test]
    fn custom_stopwords_replace_builtin() {
        let n = Normalizer::with_stopwords(["user"]);
        assert_eq!(n.normalize_text("the user").tokens, set(&["the"]));
    }

    #[test]
    fn stats_examples() {
        assert_eq!(text_stats("The cat sat."), TextStats { words: 3, sentences: 1, syllables: 3 });
        assert_eq!(text_stats(""), TextStats::default());
        assert_eq!(text_stats("Go. Stop!"), TextStats { words: 2, sentences: 2, syllables: 2 });
        assert_eq!(text_stats("no terminator here"), TextStats { words: 3, sentences: 1, syllables: 6 });
        assert_eq!(text_stats("Wait... what?! 3.14 is pi"), TextStats { words: 4, sentences: 2, syllables: 4 });
    }

    #[test]
    fn syllable_heuristic() {
        assert_eq!(syllables("the"), 1);
        assert_eq!(syllables("make"), 1);
        assert_eq!(syllables("readability"), 5);
        assert_eq!(syllables("rhythm"), 1);
        assert_eq!(syllables("queue"), 1);
        assert_eq!(syllables("psst"), 1);
        assert_eq!(syllables("Yellow,"), 2);
    }

    #[test]
    fn builtin_list_size() {
        let n = Normalizer::default();
        assert!((120..=140).contains(&n.stopwords().len()));
        for w in ["get", "user", "id", "returns", "server", "http"] {
            assert!(!n.is_stopword(w), "{w}");
        }
    }
}
