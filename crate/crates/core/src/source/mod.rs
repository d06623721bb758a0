//! Structural model of Python sources: function units, identifiers,
//! comments, docstrings, decision points, and Halstead token counts.
//!
//! The model is built from the token stream plus indentation-delimited block
//! structure keyed on `def`/`class` headers; no full grammar is parsed.

pub mod lexer;
mod model;

pub use lexer::{is_keyword, lex, string_body, Comment, Lexed, LogicalLine, Token, TokenKind, KEYWORDS};
pub use model::{
    extract_units, parse_detailed, parse_source, parse_text, FileModel, HalsteadCounts, Multiset, ParseOptions,
    ParsedSource, SourceUnit, DECISION_KEYWORDS, DECLARATION_KEYWORDS,
};
