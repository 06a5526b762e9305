//! Provers: a built-in resolution prover and a driver for external TPTP
//! provers.

mod clausify;
mod external;
mod saturate;

use std::time::Instant;

pub use clausify::{clausify, Clause, Literal, EQUALITY_LABEL};
pub use external::{run_external, ExternalOptions};
pub use saturate::{saturate, saturate_with_support, Limits, ResourceKind, Saturation};

use crate::folir::{AtpResult, AtpStatus, Problem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MiniAtpError {
    #[error("could not start prover: {0}")]
    SpawnFailed(String),
    #[error("bad prover command template `{0}`")]
    BadTemplate(String),
    #[error("{0}")]
    Io(String),
}

/// Runs the built-in prover on a problem, with the negated conjecture as
/// the initial set of support. Labels of added equality clauses
/// are not reported.
pub fn prove_builtin(p: &Problem, limits: &Limits) -> AtpResult {
    let start = Instant::now();
    let clauses = clausify(p);
    let mut r = match saturate_with_support(&clauses, limits, &p.conjecture.label) {
        Saturation::Proof(labels) => {
            let mut r = AtpResult::new(AtpStatus::Theorem);
            r.used_labels = labels.into_iter().filter(|l| l != EQUALITY_LABEL).collect();
            r
        }
        Saturation::Saturated => AtpResult::new(AtpStatus::CounterSatisfiable),
        Saturation::ResourceOut(ResourceKind::Time) => AtpResult::new(AtpStatus::Timeout),
        Saturation::ResourceOut(_) => AtpResult::new(AtpStatus::GaveUp),
    };
    r.wall_time = start.elapsed();
    r
}
