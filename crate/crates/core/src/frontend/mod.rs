//! Concrete syntax: lexing, parsing, printing, and checking whole files.

pub mod driver;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use driver::{check_source, CheckedDecl, Report};
pub use lexer::Span;
pub use parser::{parse, parse_term, Binder, SBody, STerm, SType, SurfaceDecl};
pub use printer::{print_decl, print_file, show_ctx, show_term, show_type};
