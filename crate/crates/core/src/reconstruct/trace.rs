use serde::{Deserialize, Serialize};

use crate::folir::{FolFormula, FolTerm};

use super::cc::Congruence;
use super::formula::{instantiate, normalize, strip};
use super::Sequent;

use FolFormula as F;

/// One rule application and the proofs of its premises, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ProofTrace>,
}

/// An equation hypothesis instantiated for rewriting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteUse {
    pub principal: FolFormula,
    pub terms: Vec<FolTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum Rule {
    /// The goal is an atom equal to `principal` up to congruence.
    Axiom {
        principal: FolFormula,
    },
    BotL,
    TopR,
    /// The goal is an equation entailed by the ground equations.
    Congruence,
    ImpR,
    AndR,
    AllR {
        eigen: String,
    },
    AndL {
        principal: FolFormula,
    },
    OrL {
        principal: FolFormula,
    },
    ExL {
        principal: FolFormula,
        eigen: String,
    },
    ImpTopL {
        principal: FolFormula,
    },
    ImpAtomL {
        principal: FolFormula,
    },
    ImpAndL {
        principal: FolFormula,
    },
    ImpOrL {
        principal: FolFormula,
    },
    ImpExL {
        principal: FolFormula,
    },
    ImpImpL {
        principal: FolFormula,
    },
    OrR {
        left: bool,
    },
    ExR {
        witnesses: Vec<FolTerm>,
    },
    /// Instantiate, prove the premises, close the goal with the conclusion.
    Apply {
        principal: FolFormula,
        terms: Vec<FolTerm>,
    },
    /// Instantiate, prove the premises, continue with the conclusion added.
    Forward {
        principal: FolFormula,
        terms: Vec<FolTerm>,
    },
    Rewrite {
        uses: Vec<RewriteUse>,
        goal: FolFormula,
        added: Vec<FolFormula>,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom { .. } => "Axiom",
            Rule::BotL => "BotL",
            Rule::TopR => "TopR",
            Rule::Congruence => "Congruence",
            Rule::ImpR => "ImpR",
            Rule::AndR => "AndR",
            Rule::AllR { .. } => "AllR",
            Rule::AndL { .. } => "AndL",
            Rule::OrL { .. } => "OrL",
            Rule::ExL { .. } => "ExL",
            Rule::ImpTopL { .. } => "ImpTopL",
            Rule::ImpAtomL { .. } => "ImpAtomL",
            Rule::ImpAndL { .. } => "ImpAndL",
            Rule::ImpOrL { .. } => "ImpOrL",
            Rule::ImpExL { .. } => "ImpExL",
            Rule::ImpImpL { .. } => "ImpImpL",
            Rule::OrR { .. } => "OrR",
            Rule::ExR { .. } => "ExR",
            Rule::Apply { .. } => "Apply",
            Rule::Forward { .. } => "Forward",
            Rule::Rewrite { .. } => "Rewrite",
        }
    }
}

impl ProofTrace {
    pub fn leaf(rule: Rule) -> Self {
        ProofTrace {
            rule,
            children: Vec::new(),
        }
    }

    pub fn node(rule: Rule, children: Vec<ProofTrace>) -> Self {
        ProofTrace { rule, children }
    }

    /// Number of rule applications.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTrace::size).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("traces serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {path}: {rule}: {message}")]
pub struct TraceError {
    /// Child indices from the root, dot-separated.
    pub path: String,
    pub rule: String,
    pub message: String,
}

/// Replays `trace` on `seq`. Hypotheses are never discarded during replay,
/// which is sound by weakening.
pub fn check_trace(seq: &Sequent, trace: &ProofTrace) -> Result<(), TraceError> {
    let mut hyps = Vec::new();
    for h in &seq.hyps {
        push(&mut hyps, normalize(h));
    }
    check(&hyps, &normalize(&seq.goal), trace, &mut Vec::new())
}

fn push(hyps: &mut Vec<FolFormula>, f: FolFormula) {
    if !hyps.contains(&f) {
        hyps.push(f);
    }
}

fn with(hyps: &[FolFormula], add: impl IntoIterator<Item = FolFormula>) -> Vec<FolFormula> {
    let mut out = hyps.to_vec();
    for f in add {
        push(&mut out, f);
    }
    out
}

fn congruence_of(hyps: &[FolFormula]) -> Congruence {
    let mut cc = Congruence::new();
    for h in hyps {
        if let F::Eq(l, r) = h {
            if l.is_ground() && r.is_ground() {
                cc.merge_terms(l, r);
            }
        }
    }
    cc
}

fn occurs(name: &str, f: &FolFormula) -> bool {
    let mut found = false;
    f.for_each_term(&mut |t| {
        let mut subs = Vec::new();
        t.subterms(&mut subs);
        found |= subs.iter().any(|s| matches!(s, FolTerm::Fun(g, _) if g == name));
    });
    found
}

/// Goal closed by a hypothesis, `⊥`, `⊤` or congruence.
fn closes(hyps: &[FolFormula], goal: &FolFormula) -> bool {
    if matches!(goal, F::Top) || hyps.contains(&F::Bottom) || hyps.contains(goal) {
        return true;
    }
    if !matches!(goal, F::Atom(..) | F::Eq(..)) {
        return false;
    }
    let mut cc = congruence_of(hyps);
    if let F::Eq(l, r) = goal {
        if cc.equal(l, r) {
            return true;
        }
    }
    hyps.iter().any(|h| cc.atoms_equal(h, goal))
}

/// Same shape, atoms equal up to `cc`.
fn equivalent(a: &FolFormula, b: &FolFormula, cc: &mut Congruence) -> bool {
    match (a, b) {
        (F::Atom(..), F::Atom(..)) | (F::Eq(..), F::Eq(..)) => cc.atoms_equal(a, b),
        (F::Top, F::Top) | (F::Bottom, F::Bottom) => true,
        (F::Not(x), F::Not(y)) => equivalent(x, y, cc),
        (F::And(x1, y1), F::And(x2, y2))
        | (F::Or(x1, y1), F::Or(x2, y2))
        | (F::Implies(x1, y1), F::Implies(x2, y2))
        | (F::Iff(x1, y1), F::Iff(x2, y2)) => equivalent(x1, x2, cc) && equivalent(y1, y2, cc),
        (F::Forall(x, p), F::Forall(y, q)) | (F::Exists(x, p), F::Exists(y, q)) => x == y && equivalent(p, q, cc),
        _ => false,
    }
}

fn check(hyps: &[FolFormula], goal: &FolFormula, t: &ProofTrace, path: &mut Vec<usize>) -> Result<(), TraceError> {
    let fail = |path: &[usize], msg: String| {
        Err(TraceError {
            path: if path.is_empty() {
                "root".into()
            } else {
                path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
            },
            rule: t.rule.name().into(),
            message: msg,
        })
    };
    let need_hyp = |p: &FolFormula| hyps.contains(p);
    let mut subgoals: Vec<(Vec<FolFormula>, FolFormula)> = Vec::new();
    match &t.rule {
        Rule::Axiom { principal } => {
            if !need_hyp(principal) || !matches!(goal, F::Atom(..) | F::Eq(..)) {
                return fail(path, "principal not a hypothesis or goal not atomic".into());
            }
            if !congruence_of(hyps).atoms_equal(principal, goal) {
                return fail(path, format!("{principal} does not match {goal}"));
            }
        }
        Rule::BotL => {
            if !need_hyp(&F::Bottom) {
                return fail(path, "⊥ is not a hypothesis".into());
            }
        }
        Rule::TopR => {
            if *goal != F::Top {
                return fail(path, "goal is not ⊤".into());
            }
        }
        Rule::Congruence => match goal {
            F::Eq(l, r) if congruence_of(hyps).equal(l, r) => {}
            _ => return fail(path, format!("{goal} not entailed by the ground equations")),
        },
        Rule::ImpR => match goal {
            F::Implies(a, b) => subgoals.push((with(hyps, [a.as_ref().clone()]), b.as_ref().clone())),
            _ => return fail(path, "goal is not an implication".into()),
        },
        Rule::AndR => match goal {
            F::And(a, b) => {
                subgoals.push((hyps.to_vec(), a.as_ref().clone()));
                subgoals.push((hyps.to_vec(), b.as_ref().clone()));
            }
            _ => return fail(path, "goal is not a conjunction".into()),
        },
        Rule::AllR { eigen } => match goal {
            F::Forall(x, a) => {
                if occurs(eigen, goal) || hyps.iter().any(|h| occurs(eigen, h)) {
                    return fail(path, format!("{eigen} is not fresh"));
                }
                subgoals.push((hyps.to_vec(), a.subst(x, &FolTerm::cnst(eigen.clone()))));
            }
            _ => return fail(path, "goal is not universal".into()),
        },
        Rule::OrR { left } => match goal {
            F::Or(a, b) => subgoals.push((hyps.to_vec(), if *left { a } else { b }.as_ref().clone())),
            _ => return fail(path, "goal is not a disjunction".into()),
        },
        Rule::ExR { witnesses } => {
            let mut cur = goal.clone();
            for w in witnesses {
                if !w.is_ground() {
                    return fail(path, format!("witness {w} is not ground"));
                }
                cur = match cur {
                    F::Exists(x, a) => a.subst(&x, w),
                    _ => return fail(path, "too many witnesses".into()),
                };
            }
            subgoals.push((hyps.to_vec(), cur));
        }
        Rule::AndL { principal }
        | Rule::OrL { principal }
        | Rule::ExL { principal, .. }
        | Rule::ImpTopL { principal }
        | Rule::ImpAtomL { principal }
        | Rule::ImpAndL { principal }
        | Rule::ImpOrL { principal }
        | Rule::ImpExL { principal }
        | Rule::ImpImpL { principal } => {
            if !need_hyp(principal) {
                return fail(path, format!("{principal} is not a hypothesis"));
            }
            match (&t.rule, principal) {
                (Rule::AndL { .. }, F::And(a, b)) => {
                    subgoals.push((with(hyps, [a.as_ref().clone(), b.as_ref().clone()]), goal.clone()))
                }
                (Rule::OrL { .. }, F::Or(a, b)) => {
                    subgoals.push((with(hyps, [a.as_ref().clone()]), goal.clone()));
                    subgoals.push((with(hyps, [b.as_ref().clone()]), goal.clone()));
                }
                (Rule::ExL { eigen, .. }, F::Exists(x, a)) => {
                    if occurs(eigen, goal) || hyps.iter().any(|h| occurs(eigen, h)) {
                        return fail(path, format!("{eigen} is not fresh"));
                    }
                    let inst = a.subst(x, &FolTerm::cnst(eigen.clone()));
                    subgoals.push((with(hyps, [inst]), goal.clone()));
                }
                (Rule::ImpTopL { .. }, F::Implies(a, b)) if **a == F::Top => {
                    subgoals.push((with(hyps, [b.as_ref().clone()]), goal.clone()))
                }
                (Rule::ImpAtomL { .. }, F::Implies(a, b)) if matches!(**a, F::Atom(..) | F::Eq(..)) => {
                    if !closes(hyps, a) {
                        return fail(path, format!("{a} is not available"));
                    }
                    subgoals.push((with(hyps, [b.as_ref().clone()]), goal.clone()))
                }
                (Rule::ImpAndL { .. }, F::Implies(a, b)) => match a.as_ref() {
                    F::And(c, d) => {
                        let f = F::implies(c.as_ref().clone(), F::implies(d.as_ref().clone(), b.as_ref().clone()));
                        subgoals.push((with(hyps, [f]), goal.clone()))
                    }
                    _ => return fail(path, "antecedent is not a conjunction".into()),
                },
                (Rule::ImpOrL { .. }, F::Implies(a, b)) => match a.as_ref() {
                    F::Or(c, d) => {
                        let f1 = F::implies(c.as_ref().clone(), b.as_ref().clone());
                        let f2 = F::implies(d.as_ref().clone(), b.as_ref().clone());
                        subgoals.push((with(hyps, [f1, f2]), goal.clone()))
                    }
                    _ => return fail(path, "antecedent is not a disjunction".into()),
                },
                (Rule::ImpExL { .. }, F::Implies(a, b)) => match a.as_ref() {
                    F::Exists(x, c) if !b.has_free(x) => {
                        let f = F::forall(x.clone(), F::implies(c.as_ref().clone(), b.as_ref().clone()));
                        subgoals.push((with(hyps, [f]), goal.clone()))
                    }
                    _ => return fail(path, "antecedent is not an existential".into()),
                },
                (Rule::ImpImpL { .. }, F::Implies(a, b)) => match a.as_ref() {
                    F::Implies(c, d) => {
                        let db = F::implies(d.as_ref().clone(), b.as_ref().clone());
                        let cd = F::implies(c.as_ref().clone(), d.as_ref().clone());
                        subgoals.push((with(hyps, [db]), cd));
                        subgoals.push((with(hyps, [b.as_ref().clone()]), goal.clone()));
                    }
                    _ => return fail(path, "antecedent is not an implication".into()),
                },
                _ => return fail(path, format!("rule does not apply to {principal}")),
            }
        }
        Rule::Apply { principal, terms } | Rule::Forward { principal, terms } => {
            if !need_hyp(principal) {
                return fail(path, format!("{principal} is not a hypothesis"));
            }
            if let Some(bad) = terms.iter().find(|w| !w.is_ground()) {
                return fail(path, format!("instance {bad} is not ground"));
            }
            let Some(inst) = instantiate(principal, terms) else {
                return fail(path, "too many instance terms".into());
            };
            let mut cur = &inst;
            while let F::Implies(a, b) = cur {
                subgoals.push((hyps.to_vec(), a.as_ref().clone()));
                cur = b;
            }
            if matches!(t.rule, Rule::Apply { .. }) {
                if !(matches!(cur, F::Bottom) || closes(&with(hyps, [cur.clone()]), goal)) {
                    return fail(path, format!("{cur} does not close {goal}"));
                }
            } else {
                subgoals.push((with(hyps, [cur.clone()]), goal.clone()));
            }
        }
        Rule::Rewrite {
            uses,
            goal: new_goal,
            added,
        } => {
            let mut cc = congruence_of(hyps);
            for u in uses {
                if !need_hyp(&u.principal) || u.terms.iter().any(|w| !w.is_ground()) {
                    return fail(path, format!("bad equation use {}", u.principal));
                }
                let Some(inst) = instantiate(&u.principal, &u.terms) else {
                    return fail(path, "too many instance terms".into());
                };
                let (_, prems, concl) = strip(&inst);
                if let Some(p) = prems.iter().find(|p| !closes(hyps, p)) {
                    return fail(path, format!("condition {p} is not available"));
                }
                match concl {
                    F::Eq(l, r) if l.is_ground() && r.is_ground() => cc.merge_terms(l, r),
                    _ => return fail(path, format!("{concl} is not a ground equation")),
                }
            }
            if !equivalent(goal, new_goal, &mut cc) {
                return fail(path, format!("{new_goal} is not a rewrite of {goal}"));
            }
            for a in added {
                if !hyps.iter().any(|h| equivalent(h, a, &mut cc)) {
                    return fail(path, format!("{a} is not a rewrite of a hypothesis"));
                }
            }
            subgoals.push((with(hyps, added.iter().cloned()), new_goal.clone()));
        }
    }
    if subgoals.len() != t.children.len() {
        return fail(
            path,
            format!("expected {} premises, found {}", subgoals.len(), t.children.len()),
        );
    }
    for (i, ((h, g), c)) in subgoals.iter().zip(&t.children).enumerate() {
        path.push(i);
        check(h, g, c, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> FolFormula {
        F::atom(n, vec![])
    }

    #[test]
    fn replays_identity() {
        let seq = Sequent::new(vec![], F::implies(a("A"), a("A")));
        let t = ProofTrace::node(Rule::ImpR, vec![ProofTrace::leaf(Rule::Axiom { principal: a("A") })]);
        check_trace(&seq, &t).unwrap();
        let back = ProofTrace::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_wrong_principal() {
        let seq = Sequent::new(vec![], F::implies(a("A"), a("B")));
        let t = ProofTrace::node(Rule::ImpR, vec![ProofTrace::leaf(Rule::Axiom { principal: a("A") })]);
        let e = check_trace(&seq, &t).unwrap_err();
        assert_eq!(e.path, "0");
    }

    #[test]
    fn rejects_reused_eigenvariable() {
        let p = |t: FolTerm| F::atom("p", vec![t]);
        let seq = Sequent::new(vec![p(FolTerm::cnst("#e0"))], F::forall("x", p(FolTerm::var("x"))));
        let t = ProofTrace::node(
            Rule::AllR { eigen: "#e0".into() },
            vec![ProofTrace::leaf(Rule::Axiom {
                principal: p(FolTerm::cnst("#e0")),
            })],
        );
        assert!(check_trace(&seq, &t).is_err());
    }

    #[test]
    fn rejects_missing_premise() {
        let seq = Sequent::new(vec![a("A")], F::and(a("A"), a("A")));
        let t = ProofTrace::node(Rule::AndR, vec![ProofTrace::leaf(Rule::Axiom { principal: a("A") })]);
        assert!(check_trace(&seq, &t).is_err());
    }
}
