//! A proof checker for simplicial homotopy type theory.
//!
//! The theory has three layers: cubes (the interval `2`, the point `1` and
//! finite products), topes (positive formulas over cube points, decided by
//! [`tope`]) and types, which extend Martin-Löf type theory with extension
//! types `<(t : I | psi) -> A [phi |-> a]>`.

pub mod check;
pub mod context;
pub mod corpus;
pub mod diagnostic;
pub mod elab;
pub mod syntax;
pub mod term;
pub mod tope;

pub use check::{Checker, Globals, LedgerTag};
pub use context::TriContext;
pub use diagnostic::{Diagnostic, FailureKind};
pub use term::Expr;
pub use tope::{Cube, CubeExpr, Tope};
