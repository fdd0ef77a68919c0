//! Concrete ASCII syntax for terms, formulas and hybrid programs.
//!
//! | construct           | syntax                                   |
//! |---------------------|------------------------------------------|
//! | assignment          | `x := θ`                                 |
//! | nondet assignment   | `x := *`                                 |
//! | test                | `?P`                                     |
//! | sequence / choice   | `α; β` / `α ++ β` (`;` binds tighter)    |
//! | repetition          | `{α}*`                                   |
//! | ODE                 | `{x' = θ, y' = η & Q}`                   |
//! | connectives         | `!`, `&`, `|`, `->`, `<->`               |
//!
//! `//` starts a line comment. `≤ ≥ ≠ ∧ ∨ ¬ → ↔ ∪ −` are read as aliases.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_formula, parse_hp, parse_term};
pub use printer::{format_number, print_formula, print_hp, print_term};

/// Byte range plus 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} (offset {})",
            self.span.line, self.span.column, self.message, self.span.start
        )
    }
}
