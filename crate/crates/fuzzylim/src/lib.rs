//! Fuzzy numbers as α-cut stacks, fuzzy arithmetic through the resolution
//! principle, and numerically certified fuzzy limits of expression-defined
//! fuzzy functions.
//!
//! The crate is organized around five pieces:
//!
//! * [`fuzzy`] — fuzzy numbers, α-cuts, metric pairs and ordering;
//! * [`expr`] — the expression language (tokenizer, parser, AST);
//! * [`eval`] — interval arithmetic and vertex evaluation over α-cut boxes;
//! * [`limit`] — the limit engine with ε-δ certification;
//! * [`theorems`] — executable checks of the limit theorems.
//!
//! All types are immutable after construction and every operation is a
//! pure function, so values can be shared freely across threads.

pub mod eval;
pub mod limit;
pub mod theorems;
pub mod cli;
pub mod expr;
pub mod fuzzy;

pub use eval::{eval_fuzzy, vertex_eval, EvalMode, VertexReport};
pub use expr::{parse, Expr};
pub use fuzzy::{AlphaGrid, DistancePair, FuzzyNumber, Interval};
