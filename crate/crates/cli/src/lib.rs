//! Theory files for the munj kernel: lexer, parser, printer, `subst`
//! elaboration and the `munj` command-line driver.

pub mod ast;
pub mod driver;
pub mod elab;
pub mod lexer;
pub mod parser;

pub use ast::{alpha_eq_file, Decl, DeclKind, Definition, Recursive, Theorem, TheoryFile};
pub use driver::{check_theorem, normalize_theorem, process, run, Mode, Options, Session, EXIT_ERROR, EXIT_OK, EXIT_REJECTED};
pub use parser::{parse_str, ParseError};
