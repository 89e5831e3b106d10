//! Call-by-value evaluation with runtime checks wherever a value crosses a
//! `?` boundary.
//!
//! Inference leaves behind a table of [`Obligations`]; [`compile`] attaches
//! each one to the term position it guards, producing an [`Expr`] that the
//! [`Interp`] runs. Checks on first-order values compare the value's tag
//! with the expected type. Functions that cross a boundary are wrapped in a
//! guard that checks every argument and result.
//!
//! [`Obligations`]: crate::infer::Obligations

mod builtins;
mod cast;
mod eval;
mod prices;
mod value;

use std::fmt;
use std::rc::Rc;

use chrono::NaiveDate;
use thiserror::Error;

use crate::infer::SiteKind;
use crate::syntax::Span;

pub use builtins::{builtin_types, builtin_values, dynamic_to_type, Prim, TYPE_REP};
pub use cast::{cast, Cast};
pub use eval::{compile, Env, Expr, Interp};
pub use prices::{PriceError, PriceTable};
pub use value::{ArithOp, Closure, Contract, Guard, Obs, PrimApp, Value};

/// Source text of one compilation unit, kept for error positions.
#[derive(Debug, PartialEq, Eq)]
pub struct SourceUnit {
    pub name: String,
    pub text: String,
}

impl SourceUnit {
    pub fn new(name: &str, text: &str) -> Rc<SourceUnit> {
        Rc::new(SourceUnit {
            name: name.to_string(),
            text: text.to_string(),
        })
    }
}

/// The program region held responsible when a check fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blame {
    pub unit: Rc<SourceUnit>,
    pub span: Span,
}

impl Blame {
    pub fn snippet(&self) -> &str {
        self.unit.text.get(self.span.start..self.span.end).unwrap_or("")
    }
}

impl fmt::Display for Blame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (line, col) = self.span.line_col(&self.unit.text);
        write!(f, "{}:{line}:{col}", self.unit.name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("runtime type error at {blame}: expected {expected}, got {actual} in `{}`", blame.snippet())]
pub struct RuntimeTypeError {
    pub blame: Blame,
    /// The kind of check that failed; `None` inside a builtin.
    pub site: Option<SiteKind>,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Type(#[from] RuntimeTypeError),
    #[error("division by zero at {0}")]
    DivisionByZero(Blame),
    #[error("integer overflow at {0}")]
    Overflow(Blame),
    #[error("no price for {company} on {date}")]
    MissingPrice { company: String, date: NaiveDate },
    #[error("`{0}` used before its definition finished")]
    Uninitialized(String),
    #[error("unbound variable `{0}` at runtime")]
    Unbound(String),
}

impl RuntimeError {
    pub fn type_error(&self) -> Option<&RuntimeTypeError> {
        match self {
            RuntimeError::Type(e) => Some(e),
            _ => None,
        }
    }
}
