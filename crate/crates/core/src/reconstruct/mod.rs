//! Intuitionistic proof reconstruction: goals and hint lemmas are encoded
//! into a first-order sequent, which is proved by depth-bounded search with
//! contraction-free left rules, congruence closure and bounded rewriting.
//! Every proof comes with a trace that an independent checker replays.

mod cc;
mod flatten;
mod formula;
mod rewrite;
mod search;
mod trace;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::folir::{FolFormula, FolTerm};

pub use cc::{congruence_close, CcQuery, Congruence};
pub use flatten::{flatten_goal, flatten_named, hints_from_labels};
pub use formula::normalize;
pub use rewrite::rewrite_pass;
pub use search::prove_seq;
pub use trace::{check_trace, ProofTrace, RewriteUse, Rule, TraceError};

/// Hypotheses, the equations among them, and a goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequent {
    pub hyps: Vec<FolFormula>,
    /// `(l, r)` for every hypothesis of the form `∀x̄. l = r`; the variables
    /// of the prefix stay free.
    pub equations: Vec<(FolTerm, FolTerm)>,
    pub goal: FolFormula,
}

impl Sequent {
    pub fn new(hyps: Vec<FolFormula>, goal: FolFormula) -> Self {
        let mut hs: Vec<FolFormula> = Vec::with_capacity(hyps.len());
        for h in hyps {
            if !hs.contains(&h) {
                hs.push(h);
            }
        }
        let equations = hs.iter().filter_map(formula::universal_equation).collect();
        Sequent {
            hyps: hs,
            equations,
            goal,
        }
    }

    pub fn is_propositional(&self) -> bool {
        self.hyps.iter().all(formula::is_ground_propositional) && formula::is_ground_propositional(&self.goal)
    }
}

impl std::fmt::Display for Sequent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, " ⊢ {}", self.goal)
    }
}

/// Lemmas to add as hypotheses and constants to unfold.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hints {
    #[serde(default)]
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub unfolds: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Bound on non-invertible rule applications along a branch; `None`
    /// searches without a bound.
    pub depth: Option<usize>,
    pub seconds: f64,
    /// Ceiling on visited sequents.
    pub max_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            depth: Some(8),
            seconds: 10.0,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailReason {
    DepthExhausted,
    TimeOut,
    NoRule,
    StepLimit,
}

impl std::fmt::Display for FailReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailReason::DepthExhausted => "DepthExhausted",
            FailReason::TimeOut => "TimeOut",
            FailReason::NoRule => "NoRule",
            FailReason::StepLimit => "StepLimit",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("reconstruction failed: {reason} after {steps} steps in {elapsed:?}")]
pub struct Fail {
    pub reason: FailReason,
    pub steps: u64,
    pub elapsed: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum ReconstructError {
    #[error("'{0}' is not a proposition")]
    NotAProp(String),
    #[error("unknown lemma or constant '{0}'")]
    UnknownLemma(String),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
    #[error(transparent)]
    Translate(#[from] crate::translate::TranslateError),
}
