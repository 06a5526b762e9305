//! Core calculus: terms, environments, the export-format reader and the
//! approximate typing used to drive the encoding's Prop tests.

mod env;
mod parse;
mod term;
mod typing;

pub use env::{Constructor, Context, Declaration, Environment, GlobalRef, Inductive};
pub use parse::{parse_decls, parse_env, parse_term, print_decls, Pos};
pub use term::{fresh_name, Case, Sort, Term};
pub use typing::{
    beta_normalize, free_context, infer_type, is_proof, is_prop, sort_of_type_of, unfold_constants, whnf,
    whnf_with_budget, SortClass, DEFAULT_WHNF_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate name '{0}'")]
    Duplicate(String),
    #[error("unbound identifier '{name}' at {line}:{col}")]
    Unbound { name: String, line: usize, col: usize },
    #[error("reduction budget of {0} steps exceeded")]
    BudgetExceeded(usize),
    #[error("untypeable term: {0}")]
    Untypeable(String),
}
