//! Random first-order formulas over `q/0 s/1 r/2`, `c/0 f/1` and the
//! variables `X Y`.

use proptest::prelude::*;

use hammer_core::folir::{FolFormula, FolTerm};

pub fn term() -> impl Strategy<Value = FolTerm> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["X", "Y"]).prop_map(FolTerm::var),
        Just(FolTerm::cnst("c")),
    ];
    leaf.prop_recursive(2, 4, 1, |inner| inner.prop_map(|t| FolTerm::fun("f", vec![t])))
}

pub fn formula() -> impl Strategy<Value = FolFormula> {
    let leaf = prop_oneof![
        Just(FolFormula::atom("q", vec![])),
        term().prop_map(|t| FolFormula::atom("s", vec![t])),
        (term(), term()).prop_map(|(a, b)| FolFormula::atom("r", vec![a, b])),
        (term(), term()).prop_map(|(a, b)| FolFormula::eq(a, b)),
        Just(FolFormula::Top),
        Just(FolFormula::Bottom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let x = prop::sample::select(vec!["X", "Y"]);
        prop_oneof![
            inner.clone().prop_map(FolFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FolFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FolFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FolFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FolFormula::iff(a, b)),
            (x.clone(), inner.clone()).prop_map(|(x, a)| FolFormula::forall(x, a)),
            (x, inner).prop_map(|(x, a)| FolFormula::exists(x, a)),
        ]
    })
}

pub fn closed_formula() -> impl Strategy<Value = FolFormula> {
    formula().prop_map(|f| {
        let fv = f.free_vars();
        FolFormula::forall_many(&fv, f)
    })
}
