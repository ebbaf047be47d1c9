//! Redundant-argument analysis for many-sorted term rewriting systems.

pub mod analysis;
pub mod erasure;
pub mod oracle;
pub mod rewrite;
pub mod term;
pub mod trs;

pub use rewrite::{EvalOutcome, Rewriter, Strategy, DEFAULT_FUEL};
pub use term::{FuncSymbol, Position, Sort, Substitution, Term, Var};
pub use trs::{parse_trs, Rule, Signature, Trs};
