//! Text format for distributed processes: parsing, elaboration and printing.

mod ast;
mod elaborate;
mod emit;
mod lexer;
mod parser;

use alloc::string::String;

use thiserror::Error;

pub use ast::*;
pub use elaborate::{elaborate, load, Model, Options};
pub use emit::{action_to_string, ea_to_string, emit, emit_with_inputs, term_to_string};
pub use lexer::Pos;
pub use parser::{parse, parse_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}:{}: {}", .pos.line, .pos.col, .kind)]
pub struct Diagnostic {
    pub pos: Pos,
    pub kind: DiagnosticKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticKind {
    #[error("{0}")]
    Lex(String),
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("`{0}` is declared more than once")]
    Duplicate(String),
    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

impl Diagnostic {
    /// Parse-stage diagnostics versus problems found while building the model.
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, DiagnosticKind::Lex(_) | DiagnosticKind::Syntax { .. })
    }
}
