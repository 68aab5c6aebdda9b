//! The `little` language: syntax tree, parser, printer and name utilities.

pub mod ast;
pub mod names;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use parser::{parse, parse_expr, ParseError};
pub use printer::{unparse, unparse_expr};
