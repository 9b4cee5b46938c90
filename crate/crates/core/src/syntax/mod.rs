//! Concrete syntax: lexer, parser, raw trees and the pretty-printer.
//!
//! A `.sstt` file is a list of `import "file"` lines followed by
//! declarations:
//!
//! ```text
//! shape Delta2 := {(t1, t2) : 2 * 2 | t2 <= t1}
//! def hom (A : U) (x y : A) : U :=
//!   <(t : Delta1) -> A [dDelta1(t) |-> recOR(t === 0 |-> x, t === 1 |-> y)]>
//! postulate funext ... : ...
//! thm name ... : statement := proof      -- or without `:= proof`
//! ```

pub mod lexer;
pub mod parser;
pub mod print;
pub mod raw;

use serde::Serialize;

pub use parser::{parse_expr, parse_module, parse_sequent, parse_tope_text, ParseError, RawSequent};
pub use print::{print_expr, print_tope, Printer};
pub use raw::{DeclKind, Pattern, Raw, RawBinder, RawCube, RawDecl, RawKind, RawTope, SourceModule};

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn join(self, other: Span) -> Span {
        if other.end > self.end {
            Span { end: other.end, ..self }
        } else {
            self
        }
    }
}
