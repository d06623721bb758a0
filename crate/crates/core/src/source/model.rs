use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::lexer::{lex, string_body, Lexed, Token, TokenKind};
use crate::ingest::CorpusFile;
use crate::scalar::{count, Scalar};

/// Keywords that each add one decision point. Conditional expressions and
/// comprehension clauses are covered because they use `if` and `for`.
pub const DECISION_KEYWORDS: &[&str] = &["if", "elif", "for", "while", "except", "and", "or", "assert"];

/// Keywords that are not Halstead operators.
pub const DECLARATION_KEYWORDS: &[&str] = &["def", "class", "import", "from", "global", "nonlocal", "pass"];

/// Occurrence counts keyed by string, in sorted order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset(BTreeMap<String, usize>);

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, item: &str) {
        *self.0.entry(item.to_string()).or_insert(0) += 1;
    }

    pub fn add_n(&mut self, item: &str, n: usize) {
        if n > 0 {
            *self.0.entry(item.to_string()).or_insert(0) += n;
        }
    }

    pub fn merge(&mut self, other: &Multiset) {
        for (k, &n) in &other.0 {
            self.add_n(k, n);
        }
    }

    pub fn get(&self, item: &str) -> usize {
        self.0.get(item).copied().unwrap_or(0)
    }

    /// Total occurrences.
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Number of distinct items.
    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &n)| (k.as_str(), n))
    }

    /// Distinct items, sorted.
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl<S: AsRef<str>> FromIterator<S> for Multiset {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for s in iter {
            m.add(s.as_ref());
        }
        m
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalsteadCounts {
    pub distinct_operators: usize,
    pub distinct_operands: usize,
    pub total_operators: usize,
    pub total_operands: usize,
}

impl HalsteadCounts {
    /// Operands are names and literals; operators are operator/delimiter
    /// tokens and every keyword except declarations.
    pub fn from_tokens<'a>(tokens: impl IntoIterator<Item = &'a Token>) -> Self {
        let mut operators = HashSet::new();
        let mut operands = HashSet::new();
        let mut h = HalsteadCounts::default();
        for t in tokens {
            match t.kind {
                TokenKind::Name | TokenKind::Number | TokenKind::Str => {
                    h.total_operands += 1;
                    operands.insert(t.text.as_str());
                }
                TokenKind::Op => {
                    h.total_operators += 1;
                    operators.insert(t.text.as_str());
                }
                TokenKind::Keyword => {
                    if !DECLARATION_KEYWORDS.contains(&t.text.as_str()) {
                        h.total_operators += 1;
                        operators.insert(t.text.as_str());
                    }
                }
            }
        }
        h.distinct_operators = operators.len();
        h.distinct_operands = operands.len();
        h
    }

    pub fn vocabulary(&self) -> usize {
        self.distinct_operators + self.distinct_operands
    }

    pub fn length(&self) -> usize {
        self.total_operators + self.total_operands
    }

    /// `(N1 + N2) · log2(η1 + η2)`, or 0 when the vocabulary is below 2.
    pub fn volume<T: Scalar>(&self) -> T {
        let vocab = self.vocabulary();
        if vocab < 2 {
            return T::zero();
        }
        count::<T>(self.length()) * count::<T>(vocab).log2()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    /// Dotted path of enclosing classes and functions, e.g. `Class.method`.
    pub qualified_name: String,
    pub start_line: usize,
    pub end_line: usize,
    pub identifiers: Multiset,
    pub docstring: Option<String>,
    pub decision_points: usize,
    pub halstead: HalsteadCounts,
    pub sloc: usize,
}

impl SourceUnit {
    pub fn cyclomatic(&self) -> usize {
        self.decision_points + 1
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileModel {
    pub path: String,
    pub units: Vec<SourceUnit>,
    /// Identifiers outside every function unit (module and class bodies).
    pub module_identifiers: Multiset,
    /// Lines whose first non-blank character starts a comment.
    pub comment_lines: usize,
    /// Non-blank physical lines.
    pub total_lines: usize,
    pub comment_text: String,
    pub docstring_text: String,
    pub halstead: HalsteadCounts,
    /// Structure could not be recovered; only lexical facts are present.
    pub degraded: bool,
    pub diagnostics: Vec<String>,
}

impl FileModel {
    /// Non-blank, non-comment lines.
    pub fn sloc(&self) -> usize {
        self.total_lines - self.comment_lines
    }

    /// Every identifier occurrence in the file.
    pub fn all_identifiers(&self) -> Multiset {
        let mut all = self.module_identifiers.clone();
        for u in &self.units {
            all.merge(&u.identifiers);
        }
        all
    }

    /// Comment and docstring prose, in that order.
    pub fn prose(&self) -> String {
        match (self.comment_text.is_empty(), self.docstring_text.is_empty()) {
            (true, _) => self.docstring_text.clone(),
            (_, true) => self.comment_text.clone(),
            _ => format!("{}\n{}", self.comment_text, self.docstring_text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParseOptions {
    /// Count names inside parameter, return, and variable annotations as identifiers.
    pub annotation_identifiers: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { annotation_identifiers: true }
    }
}

/// A file model together with the token-level facts it was built from.
#[derive(Debug, Clone)]
pub struct ParsedSource {
    pub model: FileModel,
    pub lexed: Lexed,
    /// Indices of string tokens that are docstrings.
    pub docstring_tokens: BTreeSet<usize>,
    /// Indices of name tokens inside annotations.
    pub annotation_tokens: BTreeSet<usize>,
}

pub fn parse_source(file: &CorpusFile, options: ParseOptions) -> FileModel {
    parse_text(&file.path, &file.content, options)
}

pub fn parse_text(path: &str, src: &str, options: ParseOptions) -> FileModel {
    parse_detailed(path, src, options).model
}

/// Function units in source order, nested definitions flattened.
pub fn extract_units(model: &FileModel) -> Vec<SourceUnit> {
    model.units.clone()
}

#[derive(Default)]
struct Structure {
    units: Vec<UnitSpan>,
    /// Owning unit per token.
    owner: Vec<Option<usize>>,
    annotations: BTreeSet<usize>,
    docstrings: BTreeSet<usize>,
    /// Docstrings of the module, classes, and units, in source order.
    docstring_texts: Vec<String>,
}

struct UnitSpan {
    qualified_name: String,
    start_line: usize,
    end_line: usize,
    docstring: Option<String>,
}

struct Scope {
    indent: usize,
    name: String,
    unit: Option<usize>,
    body_started: bool,
}

pub fn parse_detailed(path: &str, src: &str, options: ParseOptions) -> ParsedSource {
    if src.contains('\0') {
        let model = FileModel {
            path: path.to_string(),
            degraded: true,
            diagnostics: vec!["NUL byte in source: not tokenizable as text".into()],
            ..FileModel::default()
        };
        return ParsedSource {
            model,
            lexed: Lexed::default(),
            docstring_tokens: BTreeSet::new(),
            annotation_tokens: BTreeSet::new(),
        };
    }

    let lexed = lex(src);
    let mut diagnostics = lexed.diagnostics.clone();
    let structure = if diagnostics.is_empty() {
        match build_structure(&lexed) {
            Ok(s) => Some(s),
            Err(msg) => {
                diagnostics.push(msg);
                None
            }
        }
    } else {
        None
    };
    let degraded = structure.is_none();
    let structure = structure.unwrap_or_else(|| Structure {
        owner: vec![None; lexed.tokens.len()],
        annotations: lexical_annotations(&lexed),
        ..Structure::default()
    });

    let comment_line_set: BTreeSet<usize> = lexed.comments.iter().filter(|c| c.own_line).map(|c| c.line).collect();
    let blank: Vec<bool> = src.lines().map(|l| l.trim().is_empty()).collect();
    let counts_as_sloc =
        |line: usize| line >= 1 && blank.get(line - 1).is_some_and(|b| !b) && !comment_line_set.contains(&line);

    let keep_name = |i: usize| options.annotation_identifiers || !structure.annotations.contains(&i);
    let mut module_identifiers = Multiset::new();
    let mut unit_ids = vec![Multiset::new(); structure.units.len()];
    let mut unit_tokens: Vec<Vec<&Token>> = vec![Vec::new(); structure.units.len()];
    let mut unit_decisions = vec![0usize; structure.units.len()];
    for (i, tok) in lexed.tokens.iter().enumerate() {
        let owner = structure.owner[i];
        if let Some(u) = owner {
            unit_tokens[u].push(tok);
            if tok.kind == TokenKind::Keyword && DECISION_KEYWORDS.contains(&tok.text.as_str()) {
                unit_decisions[u] += 1;
            }
        }
        if tok.kind == TokenKind::Name && keep_name(i) {
            match owner {
                Some(u) => unit_ids[u].add(&tok.text),
                None => module_identifiers.add(&tok.text),
            }
        }
    }

    let units = structure
        .units
        .iter()
        .enumerate()
        .map(|(u, span)| SourceUnit {
            qualified_name: span.qualified_name.clone(),
            start_line: span.start_line,
            end_line: span.end_line,
            identifiers: std::mem::take(&mut unit_ids[u]),
            docstring: span.docstring.clone(),
            decision_points: unit_decisions[u],
            halstead: HalsteadCounts::from_tokens(unit_tokens[u].iter().copied()),
            sloc: (span.start_line..=span.end_line).filter(|&l| counts_as_sloc(l)).count(),
        })
        .collect();

    let comment_text =
        lexed.comments.iter().map(|c| c.body.trim()).filter(|b| !b.is_empty()).collect::<Vec<_>>().join("\n");
    let model = FileModel {
        path: path.to_string(),
        units,
        module_identifiers,
        comment_lines: comment_line_set.len(),
        total_lines: lexed.non_blank_lines,
        comment_text,
        docstring_text: structure.docstring_texts.join("\n"),
        halstead: HalsteadCounts::from_tokens(&lexed.tokens),
        degraded,
        diagnostics,
    };
    ParsedSource { model, docstring_tokens: structure.docstrings, annotation_tokens: structure.annotations, lexed }
}

fn is_op(t: &Token, s: &str) -> bool {
    t.kind == TokenKind::Op && t.text == s
}

fn opens(t: &Token) -> bool {
    t.kind == TokenKind::Op && matches!(t.text.as_str(), "(" | "[" | "{")
}

fn closes(t: &Token) -> bool {
    t.kind == TokenKind::Op && matches!(t.text.as_str(), ")" | "]" | "}")
}

enum HeaderKind {
    Def,
    Class,
}

struct Header {
    kind: HeaderKind,
    name: String,
    /// Offset of the name token within the line.
    name_at: usize,
    /// Offset of the ':' closing the header.
    colon_at: usize,
}

fn parse_header(toks: &[Token]) -> Result<Option<Header>, String> {
    let mut i = 0;
    if toks.first().is_some_and(|t| t.kind == TokenKind::Keyword && t.text == "async") {
        i = 1;
    }
    let kind = match toks.get(i) {
        Some(t) if t.kind == TokenKind::Keyword && t.text == "def" => HeaderKind::Def,
        Some(t) if t.kind == TokenKind::Keyword && t.text == "class" => HeaderKind::Class,
        _ => return Ok(None),
    };
    let line = toks[i].line;
    let name_tok = toks
        .get(i + 1)
        .filter(|t| t.kind == TokenKind::Name)
        .ok_or_else(|| format!("line {line}: malformed definition header"))?;
    let mut depth = 0usize;
    for (j, t) in toks.iter().enumerate().skip(i + 2) {
        if opens(t) {
            depth += 1;
        } else if closes(t) {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && is_op(t, ":") {
            return Ok(Some(Header { kind, name: name_tok.text.clone(), name_at: i + 1, colon_at: j }));
        }
    }
    Err(format!("line {line}: definition header without ':'"))
}

/// Token offsets (within the header line) of annotation names in a `def` header.
fn def_annotations(toks: &[Token], header: &Header) -> Vec<usize> {
    #[derive(PartialEq)]
    enum Mode {
        Param,
        Annotation,
        Default,
    }
    let mut marked = Vec::new();
    let mut depth = 0usize;
    let mut mode = Mode::Param;
    let mut returns = false;
    for (j, t) in toks.iter().enumerate().take(header.colon_at).skip(header.name_at + 1) {
        if opens(t) {
            depth += 1;
            if depth == 1 {
                mode = Mode::Param;
                continue;
            }
        } else if closes(t) {
            depth = depth.saturating_sub(1);
            continue;
        } else if depth == 1 && is_op(t, ",") {
            mode = Mode::Param;
            continue;
        } else if depth == 1 && is_op(t, ":") && mode == Mode::Param {
            mode = Mode::Annotation;
            continue;
        } else if depth == 1 && is_op(t, "=") {
            mode = Mode::Default;
            continue;
        } else if depth == 0 && is_op(t, "->") {
            returns = true;
            continue;
        }
        let annotated = returns || (depth >= 1 && mode == Mode::Annotation);
        if annotated && t.kind == TokenKind::Name {
            marked.push(j);
        }
    }
    marked
}

/// Token offsets of annotation names in `target: annotation [= value]`.
fn assignment_annotations(toks: &[Token]) -> Vec<usize> {
    if toks.first().map(|t| t.kind) != Some(TokenKind::Name) {
        return Vec::new();
    }
    let mut j = 1;
    while j + 1 < toks.len() && is_op(&toks[j], ".") && toks[j + 1].kind == TokenKind::Name {
        j += 2;
    }
    if !toks.get(j).is_some_and(|t| is_op(t, ":")) {
        return Vec::new();
    }
    let mut marked = Vec::new();
    let mut depth = 0usize;
    for (k, t) in toks.iter().enumerate().skip(j + 1) {
        if opens(t) {
            depth += 1;
        } else if closes(t) {
            depth = depth.saturating_sub(1);
        } else if depth == 0 && is_op(t, "=") {
            break;
        } else if t.kind == TokenKind::Name {
            marked.push(k);
        }
    }
    marked
}

/// Annotation detection without block structure, used for degraded files.
fn lexical_annotations(lexed: &Lexed) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for line in &lexed.lines {
        let toks = lexed.line_tokens(line);
        if let Ok(Some(h)) = parse_header(toks) {
            if matches!(h.kind, HeaderKind::Def) {
                out.extend(def_annotations(toks, &h).into_iter().map(|j| line.start + j));
            }
        } else {
            out.extend(assignment_annotations(toks).into_iter().map(|j| line.start + j));
        }
    }
    out
}

fn docstring_of(toks: &[Token]) -> Option<String> {
    if toks.is_empty() || toks.iter().any(|t| t.kind != TokenKind::Str) {
        return None;
    }
    Some(toks.iter().map(|t| string_body(&t.text)).collect::<String>())
}

fn build_structure(lexed: &Lexed) -> Result<Structure, String> {
    let mut s = Structure { owner: vec![None; lexed.tokens.len()], ..Structure::default() };
    let mut stack: Vec<Scope> = Vec::new();
    let mut module_started = false;

    for line in &lexed.lines {
        let toks = lexed.line_tokens(line);
        while stack.last().is_some_and(|top| line.indent <= top.indent) {
            stack.pop();
        }

        // first statement of the current body: docstring candidate
        let doc = match stack.last_mut() {
            Some(top) if !top.body_started => {
                top.body_started = true;
                docstring_of(toks).map(|d| (top.unit, d))
            }
            None if !module_started => docstring_of(toks).map(|d| (None, d)),
            _ => None,
        };
        if let Some((unit, text)) = doc {
            s.docstrings.extend(line.start..line.end);
            if let Some(u) = unit {
                s.units[u].docstring = Some(text.clone());
            }
            s.docstring_texts.push(text);
        }
        module_started = true;

        let line_end = toks.last().map_or(0, |t| t.end_line);
        for scope in &stack {
            if let Some(u) = scope.unit {
                s.units[u].end_line = s.units[u].end_line.max(line_end);
            }
        }
        let enclosing = stack.iter().rev().find_map(|sc| sc.unit);

        let Some(header) = parse_header(toks)? else {
            for i in line.start..line.end {
                s.owner[i] = enclosing;
            }
            s.annotations.extend(assignment_annotations(toks).into_iter().map(|j| line.start + j));
            continue;
        };

        let qualified_name = stack
            .iter()
            .map(|sc| sc.name.as_str())
            .chain(std::iter::once(header.name.as_str()))
            .collect::<Vec<_>>()
            .join(".");
        let unit = match header.kind {
            HeaderKind::Def => {
                s.units.push(UnitSpan {
                    qualified_name,
                    start_line: toks[0].line,
                    end_line: line_end,
                    docstring: None,
                });
                s.annotations.extend(def_annotations(toks, &header).into_iter().map(|j| line.start + j));
                Some(s.units.len() - 1)
            }
            HeaderKind::Class => None,
        };
        let owner = unit.or(enclosing);
        for i in line.start..line.end {
            s.owner[i] = owner;
        }

        let inline_body = &toks[header.colon_at + 1..];
        let mut scope = Scope { indent: line.indent, name: header.name, unit, body_started: false };
        if !inline_body.is_empty() {
            scope.body_started = true;
            if let Some(text) = docstring_of(inline_body) {
                s.docstrings.extend(line.start + header.colon_at + 1..line.end);
                if let Some(u) = unit {
                    s.units[u].docstring = Some(text.clone());
                }
                s.docstring_texts.push(text);
            }
        }
        stack.push(scope);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> FileModel {
        parse_text("t.py", src, ParseOptions::default())
    }

    fn names(m: &FileModel) -> Vec<&str> {
        m.units.iter().map(|u| u.qualified_name.as_str()).collect()
    }

    #[test]
    fn branchless_function() {
        let m = parse("def f(x):\n    return x + 1\n");
        assert_eq!(names(&m), ["f"]);
        let u = &m.units[0];
        assert_eq!(u.identifiers, ["f", "x", "x"].into_iter().collect());
        assert_eq!(u.decision_points, 0);
        assert_eq!(u.cyclomatic(), 1);
        assert_eq!((u.start_line, u.end_line, u.sloc), (1, 2, 2));
        assert!(m.module_identifiers.is_empty());
    }

    #[test]
    fn if_and_count_two() {
        let m = parse("def g(a):\n    if a and a > 0:\n        return a\n    return 0\n");
        assert_eq!(m.units[0].decision_points, 2);
        assert_eq!(m.units[0].cyclomatic(), 3);
    }

    #[test]
    fn module_level_only() {
        let m = parse("# note\n\nx = 1\n");
        assert!(m.units.is_empty());
        assert_eq!(m.comment_lines, 1);
        assert_eq!(m.total_lines, 2);
        assert_eq!(m.module_identifiers, ["x"].into_iter().collect());
        assert_eq!(m.comment_text, "note");
    }

    #[test]
    fn methods_and_nesting() {
        let m = parse("class C:\n    def m1(self):\n        pass\n\n    def m2(self):\n        pass\n");
        assert_eq!(names(&m), ["C.m1", "C.m2"]);
        assert_eq!(m.module_identifiers, ["C"].into_iter().collect());
        let m = parse("def outer():\n    y = 1\n    def inner():\n        return 2\n    return inner\n");
        assert_eq!(names(&m), ["outer", "outer.inner"]);
        assert_eq!((m.units[0].start_line, m.units[0].end_line), (1, 5));
        assert_eq!((m.units[1].start_line, m.units[1].end_line), (3, 4));
        assert_eq!(m.units[0].identifiers, ["outer", "y", "inner"].into_iter().collect());
        assert_eq!(m.units[1].identifiers, ["inner"].into_iter().collect());
    }

    #[test]
    fn lambda_decisions_go_to_enclosing_unit() {
        let base = parse("def h(xs):\n    key = lambda v: v\n    return sorted(xs, key=key)\n");
        let tern = parse("def h(xs):\n    key = lambda v: v if v else 0\n    return sorted(xs, key=key)\n");
        assert_eq!(names(&tern), ["h"]);
        assert_eq!(tern.units[0].cyclomatic(), base.units[0].cyclomatic() + 1);
    }

    #[test]
    fn decision_table() {
        let src = "\
def k(items):
    for i in items:
        while i:
            i -= 1
    try:
        pass
    except ValueError:
        pass
    except KeyError:
        pass
    else:
        pass
    finally:
        pass
    with open('f') as fh:
        pass
    assert items
    ys = [a for a in items if a or not a]
    return 1 if ys else 2
";
        // for, while, except x2, assert, comp for, comp if, or, ternary if
        assert_eq!(parse(src).units[0].decision_points, 9);
    }

    #[test]
    fn docstrings() {
        let src = "\"\"\"Module doc.\"\"\"\n\nclass A:\n    'Class doc.'\n    def m(self):\n        \"\"\"Method doc.\"\"\"\n        return 1\n\ndef f(): 'inline doc'\n\ndef g():\n    x = 1\n    'not a docstring'\n";
        let m = parse(src);
        assert_eq!(m.units[0].docstring.as_deref(), Some("Method doc."));
        assert_eq!(m.units[1].docstring.as_deref(), Some("inline doc"));
        assert_eq!(m.units[2].docstring, None);
        assert_eq!(m.docstring_text, "Module doc.\nClass doc.\nMethod doc.\ninline doc");
        // docstring lines are not comment lines
        assert_eq!(m.comment_lines, 0);
    }

    #[test]
    fn decorators_and_async() {
        let m = parse("@cache\nasync def fetch(url):\n    async for x in url:\n        await x\n");
        assert_eq!(names(&m), ["fetch"]);
        assert_eq!(m.units[0].start_line, 2);
        assert_eq!(m.units[0].decision_points, 1);
        assert_eq!(m.module_identifiers, ["cache"].into_iter().collect());
    }

    #[test]
    fn annotation_identifiers_flag() {
        let src =
            "def f(a: int, b: Dict[str, int] = {}, *, c=lambda q: q) -> Optional[str]:\n    n: int = 0\n    return a\n";
        let with = parse(src).units[0].identifiers.clone();
        let without =
            parse_text("t.py", src, ParseOptions { annotation_identifiers: false }).units[0].identifiers.clone();
        for name in ["int", "Dict", "str", "Optional"] {
            assert!(with.get(name) > 0, "{name}");
            assert_eq!(without.get(name), 0, "{name}");
        }
        for name in ["a", "b", "c", "q", "n"] {
            assert_eq!(with.get(name), without.get(name), "{name}");
        }
    }

    #[test]
    fn degraded_fallback_keeps_lexical_facts() {
        let m = parse("def f(x:\n    return x  # dangling\n");
        assert!(m.degraded);
        assert!(m.units.is_empty());
        assert_eq!(m.module_identifiers.get("x"), 2);
        assert_eq!(m.comment_text, "dangling");
        let m = parse("a = 1\0\n");
        assert!(m.degraded && m.units.is_empty() && m.total_lines == 0);
        assert!(!m.diagnostics.is_empty());
    }

    #[test]
    fn halstead_counts_and_volume() {
        // def f ( x ) : return x + 1
        // operators: ( ) : return +   -> N1 = 5, n1 = 5
        // operands:  f x x 1          -> N2 = 4, n2 = 3
        let m = parse("def f(x):\n    return x + 1\n");
        let h = m.units[0].halstead;
        assert_eq!(
            h,
            HalsteadCounts { distinct_operators: 5, distinct_operands: 3, total_operators: 5, total_operands: 4 }
        );
        assert!((h.volume::<f64>() - 9.0 * 8f64.log2()).abs() < 1e-12);
        assert_eq!(HalsteadCounts::default().volume::<f64>(), 0.0);
    }

    #[test]
    fn sloc_excludes_comments_and_blanks() {
        let m = parse("def f():\n    # c\n\n    return 1\n");
        assert_eq!(m.units[0].sloc, 2);
        assert_eq!(m.sloc(), 2);
    }
}
