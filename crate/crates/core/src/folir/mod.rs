//! First-order intermediate representation, TPTP output and prover answers.

mod fol;
mod szs;
mod tptp;

pub use fol::{
    simplify, FolFormula, FolTerm, LabeledAxiom, Origin, OriginKind, Problem, Role, APP, HAS_TYPE, PROVABLE,
};
pub use szs::{parse_szs, AtpResult, AtpStatus};
pub use tptp::{axioms_to_tptp, check_arity, parse_tptp, to_tptp, Mangler};

#[derive(Debug, thiserror::Error)]
pub enum FolError {
    #[error("symbol {symbol} used inconsistently: {first}, then {second}")]
    ArityClash {
        symbol: String,
        first: String,
        second: String,
    },
    #[error("TPTP parse error: {0}")]
    Parse(String),
}
