//! Text formats: the `.knl` kernel language and the `.tac` program format.

mod ast;
mod lexer;
mod lower;
mod parser;
mod tac_text;

pub use ast::{Decl, Expr, ExprKind, Pos, SourceAst, Stmt};
pub use lexer::{lex, Token, TokenKind};
pub use lower::{lower, SemanticError, TEMP_PREFIX};
pub use parser::{parse_source, SyntaxError};
pub use tac_text::{content_hash, parse_tac, print_tac, TacParseError};
pub(crate) use tac_text::parse_literal;

use thiserror::Error;

use crate::ir::Program;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Parses and lowers `.knl` source.
pub fn compile_source(text: &str) -> Result<Program, CompileError> {
    Ok(lower(&parse_source(text)?)?)
}
