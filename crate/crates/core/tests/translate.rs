mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use hammer_core::encoder::arity_optimize;
use hammer_core::folir::{check_arity, to_tptp, OriginKind, Problem, Role};
use hammer_core::kernel::Environment;
use hammer_core::pipeline::{load_corpus, load_file};
use hammer_core::translate::{build_problem, extended_deps, Premises, TranslateError};

use common::{corpus_dir, corpus_env, STEMS};

fn all_problems() -> Vec<(String, Problem)> {
    let mut out = Vec::new();
    for file in load_corpus(&corpus_dir()).unwrap() {
        for spec in &file.specs {
            let built = build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth).unwrap();
            out.push((format!("{}:{}", file.stem, spec.conjecture), built.problem));
        }
    }
    out
}

/// Declarations that contributed axioms.
fn source_decls(p: &Problem) -> BTreeSet<String> {
    p.axioms
        .iter()
        .filter_map(|a| a.origin.as_ref())
        .map(|o| o.decl.clone())
        .collect()
}

fn names_before(env: &Environment, conjecture: &str) -> Vec<String> {
    env.decls()
        .take_while(|d| d.name() != conjecture)
        .map(|d| d.name().to_string())
        .collect()
}

#[test]
fn translation_is_deterministic() {
    let a: Vec<String> = all_problems().iter().map(|(_, p)| to_tptp(p).unwrap()).collect();
    let b: Vec<String> = all_problems().iter().map(|(_, p)| to_tptp(p).unwrap()).collect();
    assert_eq!(a, b);
}

#[test]
fn every_axiom_is_closed_and_labelled_once() {
    for (name, p) in all_problems() {
        let mut labels = BTreeSet::new();
        for ax in p.all() {
            assert!(ax.formula.is_closed(), "{name}: {} is open: {}", ax.label, ax.formula);
            assert!(labels.insert(ax.label.clone()), "{name}: duplicate label {}", ax.label);
        }
        assert_eq!(p.conjecture.role, Role::Conjecture);
    }
}

#[test]
fn symbols_keep_one_arity() {
    for (name, p) in all_problems() {
        check_arity(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
        check_arity(&arity_optimize(&p)).unwrap_or_else(|e| panic!("{name} (optimized): {e}"));
    }
}

#[test]
fn labels_map_back_to_declarations() {
    let corpus = load_corpus(&corpus_dir()).unwrap();
    for file in &corpus {
        for spec in &file.specs {
            let p = build_problem(&file.env, &spec.conjecture, &spec.premises, spec.depth)
                .unwrap()
                .problem;
            for ax in &p.axioms {
                let o = ax.origin.as_ref().unwrap_or_else(|| panic!("{}: no origin", ax.label));
                assert!(file.env.contains(&o.decl), "{}: unknown origin {}", ax.label, o.decl);
                if o.kind == OriginKind::Lifted {
                    assert!(
                        ["lam_", "case_", "pi_"]
                            .iter()
                            .any(|k| ax.label.trim_start_matches('\'').starts_with(k)),
                        "{}",
                        ax.label
                    );
                    assert!(!file.env.contains(&ax.label));
                }
            }
        }
    }
}

#[test]
fn unknown_and_non_propositional_names_are_rejected() {
    let env = corpus_env("arith");
    assert!(matches!(
        build_problem(&env, "no_such_lemma", &Premises::all(), 2),
        Err(TranslateError::UnknownName(_))
    ));
    assert!(matches!(
        build_problem(&env, "plus", &Premises::all(), 2),
        Err(TranslateError::NotAProp(_))
    ));
    assert!(matches!(
        build_problem(&env, "one_plus_one", &Premises::Names(vec!["missing".into()]), 2),
        Err(TranslateError::UnknownName(_))
    ));
}

#[test]
fn default_specs_cover_every_statement() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("logic.sx");
    std::fs::copy(corpus_dir().join("logic.sx"), &path).unwrap();
    let file = load_file(&path).unwrap();
    let names: Vec<&str> = file.specs.iter().map(|s| s.conjecture.as_str()).collect();
    for n in ["and_comm", "peirce", "someone_mortal", "socrates_man"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
    assert!(!names.contains(&"and") && !names.contains(&"thing"));
    assert!(file
        .specs
        .iter()
        .all(|s| s.premises == Premises::all() && s.depth == 2 && !s.acceptance));
}

fn stem_and_conjecture() -> impl Strategy<Value = (&'static str, String)> {
    prop::sample::select(STEMS.to_vec()).prop_flat_map(|stem| {
        let env = corpus_env(stem);
        let props: Vec<String> = env
            .decls()
            .filter(|d| hammer_core::translate::statement(&env, d.name()).is_ok())
            .map(|d| d.name().to_string())
            .collect();
        prop::sample::select(props).prop_map(move |c| (stem, c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn more_premises_give_more_axioms(
        (stem, conj) in stem_and_conjecture(),
        mask in prop::collection::vec(any::<(bool, bool)>(), 40),
    ) {
        let env = corpus_env(stem);
        let before = names_before(&env, &conj);
        let small: Vec<String> = before.iter().zip(&mask).filter(|(_, m)| m.0 && m.1).map(|(n, _)| n.clone()).collect();
        let large: Vec<String> = before.iter().zip(&mask).filter(|(_, m)| m.0).map(|(n, _)| n.clone()).collect();
        let a = build_problem(&env, &conj, &Premises::Names(small), 1).unwrap().problem;
        let b = build_problem(&env, &conj, &Premises::Names(large), 1).unwrap().problem;
        let c = build_problem(&env, &conj, &Premises::all(), 1).unwrap().problem;
        prop_assert!(source_decls(&a).is_subset(&source_decls(&b)));
        prop_assert!(source_decls(&b).is_subset(&source_decls(&c)));
    }

    #[test]
    fn deeper_closure_gives_more_axioms((stem, conj) in stem_and_conjecture(), depth in 0usize..3) {
        let env = corpus_env(stem);
        let roots = vec![conj.clone()];
        let d0 = extended_deps(&env, &roots, depth).unwrap();
        let d1 = extended_deps(&env, &roots, depth + 1).unwrap();
        prop_assert!(d0.is_subset(&d1));
        let a = build_problem(&env, &conj, &Premises::Names(vec![]), depth).unwrap().problem;
        let b = build_problem(&env, &conj, &Premises::Names(vec![]), depth + 1).unwrap().problem;
        prop_assert!(source_decls(&a).is_subset(&source_decls(&b)));
        prop_assert!(a.axioms.len() <= b.axioms.len());
    }
}
