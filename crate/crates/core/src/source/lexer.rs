//! Python tokenizer.
//!
//! Produces a flat token list grouped into logical lines (implicit joining
//! inside brackets, explicit backslash continuation), plus every comment with
//! its physical line. Malformed input never aborts: problems are reported as
//! diagnostics and the scan continues, so callers can fall back to a purely
//! lexical view.

use serde::Serialize;

/// Hard keywords. Soft keywords (`match`, `case`, `type`, `_`) lex as names.
pub const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

const OPERATORS_3: &[&str] = &["**=", "//=", ">>=", "<<=", "..."];
const OPERATORS_2: &[&str] =
    &["**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":="];
const OPERATORS_1: &str = "+-*/%@&|^~<>()[]{},:.;=";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TokenKind {
    Name,
    Keyword,
    Op,
    Number,
    Str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based physical line where the token starts.
    pub line: usize,
    /// 1-based physical line where the token ends (differs for multi-line strings).
    pub end_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comment {
    pub line: usize,
    /// Text after the '#'.
    pub body: String,
    /// Nothing but whitespace precedes it on its physical line.
    pub own_line: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogicalLine {
    /// Indentation width of the first physical line (tabs advance to multiples of 8).
    pub indent: usize,
    /// Half-open range into `Lexed::tokens`.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
    pub lines: Vec<LogicalLine>,
    pub diagnostics: Vec<String>,
    /// Physical lines containing any non-whitespace character.
    pub non_blank_lines: usize,
}

impl Lexed {
    pub fn line_tokens(&self, line: &LogicalLine) -> &[Token] {
        &self.tokens[line.start..line.end]
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    depth: usize,
    out: Lexed,
    line_start_token: usize,
    line_indent: Option<usize>,
}

pub fn lex(src: &str) -> Lexed {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        depth: 0,
        out: Lexed::default(),
        line_start_token: 0,
        line_indent: None,
    };
    lx.out.non_blank_lines = src.lines().filter(|l| !l.trim().is_empty()).count();
    lx.run();
    lx.out
}

impl Lexer {
    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn diag(&mut self, msg: String) {
        self.out.diagnostics.push(format!("line {}: {}", self.line, msg));
    }

    fn end_logical_line(&mut self) {
        let end = self.out.tokens.len();
        if end > self.line_start_token {
            self.out.lines.push(LogicalLine {
                indent: self.line_indent.unwrap_or(0),
                start: self.line_start_token,
                end,
            });
        }
        self.line_start_token = end;
        self.line_indent = None;
    }

    fn push(&mut self, kind: TokenKind, text: String, line: usize) {
        let end_line = self.line;
        self.out.tokens.push(Token { kind, text, line, end_line });
    }

    /// Measures indentation at the start of a physical line and skips it.
    fn indentation(&mut self) -> usize {
        let mut width = 0;
        while let Some(c) = self.peek(0) {
            match c {
                ' ' => width += 1,
                '\t' => width = (width / 8 + 1) * 8,
                '\x0c' => width = 0,
                _ => break,
            }
            self.pos += 1;
        }
        width
    }

    fn run(&mut self) {
        let mut at_line_start = true;
        while self.pos < self.chars.len() {
            if at_line_start {
                at_line_start = false;
                let width = self.indentation();
                if self.depth == 0 && self.line_indent.is_none() {
                    // Only a line that starts a new logical line sets its indent.
                    let blank = matches!(self.peek(0), None | Some('\n') | Some('\r') | Some('#'));
                    if !blank && self.out.tokens.len() == self.line_start_token {
                        self.line_indent = Some(width);
                    }
                }
                if self.peek(0) == Some('#') {
                    self.comment(true);
                }
                continue;
            }
            let c = self.chars[self.pos];
            match c {
                '\n' => {
                    self.pos += 1;
                    if self.depth == 0 {
                        self.end_logical_line();
                    }
                    self.line += 1;
                    at_line_start = true;
                }
                '\r' => {
                    self.pos += 1;
                    if self.peek(0) != Some('\n') {
                        if self.depth == 0 {
                            self.end_logical_line();
                        }
                        self.line += 1;
                        at_line_start = true;
                    }
                }
                ' ' | '\t' | '\x0c' => self.pos += 1,
                '#' => self.comment(false),
                '\\' => {
                    // explicit line joining
                    let mut k = self.pos + 1;
                    if self.chars.get(k) == Some(&'\r') {
                        k += 1;
                    }
                    if self.chars.get(k) == Some(&'\n') {
                        self.pos = k + 1;
                        self.line += 1;
                        // continuation lines carry no indentation meaning
                        while matches!(self.peek(0), Some(' ' | '\t' | '\x0c')) {
                            self.pos += 1;
                        }
                    } else {
                        self.diag("stray backslash".into());
                        self.pos += 1;
                    }
                }
                '"' | '\'' => self.string(0),
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    self.number()
                }
                c if c.is_alphabetic() || c == '_' => self.name(),
                _ => self.operator(),
            }
        }
        if self.depth > 0 {
            self.diag(format!("{} unclosed bracket(s) at end of file", self.depth));
        }
        self.end_logical_line();
    }

    fn comment(&mut self, own_line: bool) {
        let hash = self.pos;
        let start = self.pos + 1;
        while self.peek(0).is_some_and(|c| c != '\n' && c != '\r') {
            self.pos += 1;
        }
        let body: String = self.chars[start..self.pos].iter().collect();
        let own_line = own_line || self.only_whitespace_before(hash);
        self.out.comments.push(Comment { line: self.line, body, own_line });
    }

    fn only_whitespace_before(&self, hash: usize) -> bool {
        let line_start = self.chars[..hash].iter().rposition(|&c| c == '\n' || c == '\r').map_or(0, |i| i + 1);
        self.chars[line_start..hash].iter().all(|c| c.is_whitespace())
    }

    fn name(&mut self) {
        let start = self.pos;
        while self.peek(0).is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if matches!(self.peek(0), Some('"' | '\'')) && is_string_prefix(&text) {
            self.pos = start;
            self.string(text.chars().count());
            return;
        }
        let kind = if is_keyword(&text) { TokenKind::Keyword } else { TokenKind::Name };
        self.push(kind, text, self.line);
    }

    fn number(&mut self) {
        let start = self.pos;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                let exp = matches!(c, 'e' | 'E') && !self.is_hex_literal(start);
                self.pos += 1;
                if exp && matches!(self.peek(0), Some('+' | '-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        self.push(TokenKind::Number, text, self.line);
    }

    fn is_hex_literal(&self, start: usize) -> bool {
        self.chars.get(start) == Some(&'0') && matches!(self.chars.get(start + 1), Some('x' | 'X'))
    }

    /// Scans a string literal whose prefix is `prefix_len` characters long.
    fn string(&mut self, prefix_len: usize) {
        let start = self.pos;
        let start_line = self.line;
        self.pos += prefix_len;
        let quote = self.chars[self.pos];
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        let mut terminated = false;
        while let Some(c) = self.peek(0) {
            if c == '\\' {
                if self.peek(1) == Some('\n') {
                    self.line += 1;
                }
                self.pos += 2;
                continue;
            }
            if c == '\n' {
                if !triple {
                    break;
                }
                self.line += 1;
            }
            if c == quote && (!triple || (self.peek(1) == Some(quote) && self.peek(2) == Some(quote))) {
                self.pos += if triple { 3 } else { 1 };
                terminated = true;
                break;
            }
            self.pos += 1;
        }
        self.pos = self.pos.min(self.chars.len());
        if !terminated {
            let what = if triple { "triple-quoted" } else { "single-line" };
            self.out.diagnostics.push(format!("line {start_line}: unterminated {what} string"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        self.push(TokenKind::Str, text, start_line);
    }

    fn operator(&mut self) {
        for (len, table) in [(3usize, OPERATORS_3), (2, OPERATORS_2)] {
            if self.pos + len <= self.chars.len() {
                let cand: String = self.chars[self.pos..self.pos + len].iter().collect();
                if table.contains(&cand.as_str()) {
                    self.pos += len;
                    self.push(TokenKind::Op, cand, self.line);
                    return;
                }
            }
        }
        let c = self.chars[self.pos];
        self.pos += 1;
        if !OPERATORS_1.contains(c) {
            self.diag(format!("unexpected character {c:?}"));
            return;
        }
        match c {
            '(' | '[' | '{' => self.depth += 1,
            ')' | ']' | '}' => {
                if self.depth == 0 {
                    self.diag(format!("unmatched {c:?}"));
                } else {
                    self.depth -= 1;
                }
            }
            _ => {}
        }
        self.push(TokenKind::Op, c.to_string(), self.line);
    }
}

fn is_string_prefix(word: &str) -> bool {
    matches!(word.to_ascii_lowercase().as_str(), "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf" | "t" | "tr" | "rt")
}

/// Body of a string literal token with prefix and quotes removed.
pub fn string_body(token_text: &str) -> &str {
    let body = token_text.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    for q in ["\"\"\"", "'''", "\"", "'"] {
        if let Some(rest) = body.strip_prefix(q) {
            return rest.strip_suffix(q).unwrap_or(rest);
        }
    }
    body
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        lex(src).tokens.into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn basic_tokens() {
        use TokenKind::*;
        let toks = kinds("def f(x):\n    return x + 1\n");
        assert_eq!(
            toks,
            vec![
                (Keyword, "def".into()),
                (Name, "f".into()),
                (Op, "(".into()),
                (Name, "x".into()),
                (Op, ")".into()),
                (Op, ":".into()),
                (Keyword, "return".into()),
                (Name, "x".into()),
                (Op, "+".into()),
                (Number, "1".into()),
            ]
        );
    }

    #[test]
    fn logical_lines_and_indent() {
        let lx = lex("a = (1,\n  2)\nif a:\n\tb = 3 \\\n  + 4\n");
        let shapes: Vec<(usize, usize)> = lx.lines.iter().map(|l| (l.indent, l.end - l.start)).collect();
        assert_eq!(shapes, vec![(0, 7), (0, 3), (8, 5)]);
        assert!(lx.diagnostics.is_empty());
    }

    #[test]
    fn strings_and_prefixes() {
        let lx = lex("x = rb'\\x00' + f\"{y}\"\ns = '''a\nb'''\n");
        let strs: Vec<&Token> = lx.tokens.iter().filter(|t| t.kind == TokenKind::Str).collect();
        assert_eq!(strs.len(), 3);
        assert_eq!(strs[2].line, 2);
        assert_eq!(strs[2].end_line, 3);
        assert_eq!(string_body(&strs[2].text), "a\nb");
        assert_eq!(string_body("r'raw'"), "raw");
    }

    #[test]
    fn comments_classified() {
        let lx = lex("# top\nx = 1  # trailing\n    # indented\ny = [\n  # inside\n  2]\n");
        let own: Vec<(usize, bool)> = lx.comments.iter().map(|c| (c.line, c.own_line)).collect();
        assert_eq!(own, vec![(1, true), (2, false), (3, true), (5, true)]);
        assert_eq!(lx.comments[1].body, " trailing");
    }

    #[test]
    fn numbers() {
        let toks = kinds("a = 1e-5 + 0xEF + 3.14j + .5 + 1_000");
        let nums: Vec<String> = toks.into_iter().filter(|(k, _)| *k == TokenKind::Number).map(|(_, t)| t).collect();
        assert_eq!(nums, ["1e-5", "0xEF", "3.14j", ".5", "1_000"]);
    }

    #[test]
    fn diagnostics_for_malformed_input() {
        assert!(!lex("s = '''never closed\n").diagnostics.is_empty());
        assert!(!lex("f(1, 2\n").diagnostics.is_empty());
        assert!(!lex("x = 1 $ 2\n").diagnostics.is_empty());
        assert!(!lex("x = 'open\ny = 2\n").diagnostics.is_empty());
    }

    #[test]
    fn crlf_line_endings() {
        let lx = lex("a = 1\r\nb = 2\r\n");
        assert_eq!(lx.lines.len(), 2);
        assert_eq!(lx.tokens[3].line, 2);
    }
}
