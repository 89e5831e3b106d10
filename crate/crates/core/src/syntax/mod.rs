//! Lexing, parsing and pretty-printing.
//!
//! The concrete syntax follows the shapes of the contract programs it was
//! designed around:
//!
//! ```text
//! let receive currency amount = scale (one currency) amount in
//! match args.call_or_put with
//!   | Call -> last / first - const args.strike
//!   | Put -> const args.strike - last / first
//! ```
//!
//! Types use `->` (or `→`) for functions, `?` (or `Dyn`) for the dynamic
//! type, `{l : t; ...}` for records, `[L : t; ...]` for variants, `| r` for
//! an open row tail, `mu a. t` for recursive types and `eps` for the empty
//! row.

mod ast;
mod lexer;
mod parser;
mod pretty;

use thiserror::Error;

pub use ast::{line_col, Currency, Literal, MatchArm, Span, SurfaceType, Term, TermKind};
pub use parser::{parse_program, parse_term, parse_type, TopItem};
pub use pretty::{pretty_term, pretty_type};

/// Names that parse as infix operators.
pub const OPERATORS: &[&str] = &["+", "-", "*", "/", "**", "==", "<", "<=", ">", ">="];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
    pub message: String,
    /// Tokens that would have been accepted at this point.
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub(crate) fn lexical(src: &str, offset: usize, message: String) -> Self {
        let (line, col) = line_col(src, offset);
        SyntaxError {
            line,
            col,
            offset,
            message,
            expected: Vec::new(),
        }
    }
}
