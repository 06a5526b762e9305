mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use hammer_core::folir::{AtpStatus, FolFormula, FolTerm, LabeledAxiom, Problem, Role};
use hammer_core::miniatp::{clausify, prove_builtin, Limits};
use hammer_core::oracle::{all_models, eval_finite_model, Signature};
use hammer_core::pipeline::load_corpus;
use hammer_core::translate::build_problem;

use common::corpus_dir;
use common::gen::closed_formula;

fn limits() -> Limits {
    Limits {
        max_seconds: 0.5,
        max_clauses: 5_000,
        ..Limits::default()
    }
}

fn problem() -> impl Strategy<Value = Problem> {
    (prop::collection::vec(closed_formula(), 1..4), closed_formula()).prop_map(|(axs, goal)| {
        let axioms = axs
            .into_iter()
            .enumerate()
            .map(|(i, f)| LabeledAxiom::new(format!("ax{i}"), Role::Axiom, f))
            .collect();
        Problem::new(axioms, LabeledAxiom::new("goal", Role::Conjecture, goal))
    })
}

fn model_count(sig_of: &[FolFormula], n: usize) -> f64 {
    let mut funs = BTreeSet::new();
    let mut preds = BTreeSet::new();
    for f in sig_of {
        funs.extend(f.functions());
        preds.extend(f.predicates());
    }
    let n = n as f64;
    let f: f64 = funs.iter().map(|(_, a)| n.powf(n.powi(*a as i32))).product();
    let p: f64 = preds.iter().map(|(_, a)| 2f64.powf(n.powi(*a as i32))).product();
    f * p
}

/// A model of the axioms and the negated conjecture with at most three
/// elements, skipping sizes with too many structures to enumerate.
fn small_countermodel(p: &Problem) -> Option<usize> {
    let mut fs: Vec<FolFormula> = p.axioms.iter().map(|a| a.formula.clone()).collect();
    fs.push(FolFormula::not(p.conjecture.formula.clone()));
    let sig = Signature::of(&fs);
    (1..=3)
        .filter(|n| model_count(&fs, *n) <= 200_000.0)
        .find(|n| all_models(&sig, *n).any(|m| fs.iter().all(|f| eval_finite_model(f, &m).unwrap())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn proofs_have_no_small_countermodel(p in problem()) {
        let r = prove_builtin(&p, &limits());
        if r.status == AtpStatus::Theorem {
            prop_assert_eq!(small_countermodel(&p), None);
        }
    }

    #[test]
    fn cited_labels_suffice(p in problem()) {
        let r = prove_builtin(&p, &limits());
        if r.status == AtpStatus::Theorem {
            for l in &r.used_labels {
                prop_assert!(p.find(l).is_some(), "cited unknown label {}", l);
            }
            let again = prove_builtin(&p.restrict(&r.used_labels), &limits());
            prop_assert_eq!(again.status, AtpStatus::Theorem);
        }
    }

    #[test]
    fn clauses_carry_input_labels(p in problem()) {
        let labels: BTreeSet<&str> = p.labels().into_iter().collect();
        for c in clausify(&p) {
            let f = c.formula();
            prop_assert!(f.is_closed());
        }
        prop_assert!(labels.contains("goal"));
    }
}

fn atom(p: &str) -> FolFormula {
    FolFormula::atom(p, vec![])
}

fn toy(axioms: Vec<FolFormula>, goal: FolFormula) -> Problem {
    Problem::new(
        axioms
            .into_iter()
            .enumerate()
            .map(|(i, f)| LabeledAxiom::new(format!("a{i}"), Role::Axiom, f))
            .collect(),
        LabeledAxiom::new("goal", Role::Conjecture, goal),
    )
}

#[test]
fn statuses_of_toy_problems() {
    let mp = toy(
        vec![atom("a"), FolFormula::implies(atom("a"), atom("b")), atom("c")],
        atom("b"),
    );
    let r = prove_builtin(&mp, &limits());
    assert_eq!(r.status, AtpStatus::Theorem);
    let cited: BTreeSet<&str> = r.used_labels.iter().map(String::as_str).collect();
    assert!(
        cited.contains("a0") && cited.contains("a1") && !cited.contains("a2"),
        "{cited:?}"
    );

    let open = toy(vec![atom("a")], atom("b"));
    assert_eq!(prove_builtin(&open, &limits()).status, AtpStatus::CounterSatisfiable);

    let no_time = Limits {
        max_seconds: 0.0,
        ..Limits::default()
    };
    assert_eq!(prove_builtin(&mp, &no_time).status, AtpStatus::Timeout);
}

#[test]
fn equality_reasoning() {
    let (a, b, c) = (FolTerm::cnst("a"), FolTerm::cnst("b"), FolTerm::cnst("c"));
    let fa = |t: &FolTerm| FolTerm::fun("f", vec![t.clone()]);
    let p = toy(
        vec![
            FolFormula::eq(a.clone(), b.clone()),
            FolFormula::eq(b.clone(), c.clone()),
        ],
        FolFormula::eq(fa(&c), fa(&a)),
    );
    assert_eq!(prove_builtin(&p, &limits()).status, AtpStatus::Theorem);
}

#[test]
fn corpus_proofs_cite_sufficient_labels() {
    for file in load_corpus(&corpus_dir()).unwrap() {
        for spec in &file.specs {
            let p = build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth)
                .unwrap()
                .problem;
            let r = prove_builtin(&p, &Limits::default());
            assert_eq!(r.status, AtpStatus::Theorem, "{}", spec.conjecture);
            let again = prove_builtin(&p.restrict(&r.used_labels), &Limits::default());
            assert_eq!(
                again.status,
                AtpStatus::Theorem,
                "{} restricted to {:?}",
                spec.conjecture,
                r.used_labels
            );
        }
    }
}
