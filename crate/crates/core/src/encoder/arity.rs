//! Arity optimisation over a finished problem.
//!
//! A constant that is always applied to at least `n > 0` arguments through
//! `@` chains gets a direct `n`-ary function symbol; a constant whose
//! occurrences under `P` are all applied to the same number of arguments
//! becomes a predicate. Bridging axioms are added only when the constant is
//! also used at arity 0 (for the function form) or as a term (for the
//! predicate form).

use std::collections::{BTreeMap, BTreeSet};

use crate::folir::{FolFormula, FolTerm, LabeledAxiom, OriginKind, Problem, Role, APP, PROVABLE};

#[derive(Default, Debug)]
struct Usage {
    term_counts: BTreeSet<usize>,
    pred_counts: BTreeSet<usize>,
}

#[derive(Debug)]
struct Plan {
    /// Function symbol and its arity.
    fun: Option<(String, usize)>,
    /// Predicate symbol and its arity.
    pred: Option<(String, usize)>,
}

fn spine(t: &FolTerm) -> (&FolTerm, Vec<&FolTerm>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let FolTerm::Fun(f, xs) = cur {
        if f == APP && xs.len() == 2 {
            args.push(&xs[1]);
            cur = &xs[0];
        } else {
            break;
        }
    }
    args.reverse();
    (cur, args)
}

fn head_constant(t: &FolTerm) -> Option<&str> {
    match t {
        FolTerm::Fun(c, xs) if xs.is_empty() => Some(c),
        _ => None,
    }
}

fn scan_term(t: &FolTerm, uses: &mut BTreeMap<String, Usage>) {
    let (head, args) = spine(t);
    match head {
        FolTerm::Fun(c, xs) if xs.is_empty() => {
            uses.entry(c.clone()).or_default().term_counts.insert(args.len());
        }
        FolTerm::Fun(_, xs) => xs.iter().for_each(|x| scan_term(x, uses)),
        FolTerm::Var(_) => {}
    }
    args.into_iter().for_each(|a| scan_term(a, uses));
}

fn scan_formula(f: &FolFormula, uses: &mut BTreeMap<String, Usage>) {
    f.visit(&mut |g| match g {
        FolFormula::Atom(p, xs) if p == PROVABLE && xs.len() == 1 => {
            let (head, args) = spine(&xs[0]);
            match head_constant(head) {
                Some(c) => {
                    uses.entry(c.to_string()).or_default().pred_counts.insert(args.len());
                    args.into_iter().for_each(|a| scan_term(a, uses));
                }
                None => scan_term(&xs[0], uses),
            }
        }
        FolFormula::Atom(_, xs) => xs.iter().for_each(|x| scan_term(x, uses)),
        FolFormula::Eq(l, r) => {
            scan_term(l, uses);
            scan_term(r, uses);
        }
        _ => {}
    });
}

fn rewrite_term(t: &FolTerm, plans: &BTreeMap<String, Plan>) -> FolTerm {
    let (head, args) = spine(t);
    let args: Vec<FolTerm> = args.into_iter().map(|a| rewrite_term(a, plans)).collect();
    let base = match head {
        FolTerm::Fun(c, xs) if xs.is_empty() => {
            if let Some(Plan {
                fun: Some((name, n)), ..
            }) = plans.get(c)
            {
                if args.len() >= *n {
                    let direct = FolTerm::Fun(name.clone(), args[..*n].to_vec());
                    return FolTerm::apps(direct, args[*n..].iter().cloned());
                }
            }
            head.clone()
        }
        FolTerm::Fun(f, xs) => FolTerm::Fun(f.clone(), xs.iter().map(|x| rewrite_term(x, plans)).collect()),
        FolTerm::Var(_) => head.clone(),
    };
    FolTerm::apps(base, args)
}

fn rewrite_formula(f: &FolFormula, plans: &BTreeMap<String, Plan>) -> FolFormula {
    use FolFormula as F;
    match f {
        F::Atom(p, xs) if p == PROVABLE && xs.len() == 1 => {
            let (head, args) = spine(&xs[0]);
            if let Some(c) = head_constant(head) {
                if let Some(Plan {
                    pred: Some((name, q)), ..
                }) = plans.get(c)
                {
                    if args.len() == *q {
                        return F::Atom(name.clone(), args.into_iter().map(|a| rewrite_term(a, plans)).collect());
                    }
                }
            }
            F::Atom(p.clone(), vec![rewrite_term(&xs[0], plans)])
        }
        F::Atom(p, xs) => F::Atom(p.clone(), xs.iter().map(|x| rewrite_term(x, plans)).collect()),
        F::Eq(l, r) => F::Eq(rewrite_term(l, plans), rewrite_term(r, plans)),
        F::Top | F::Bottom => f.clone(),
        F::Not(a) => F::not(rewrite_formula(a, plans)),
        F::And(a, b) => F::and(rewrite_formula(a, plans), rewrite_formula(b, plans)),
        F::Or(a, b) => F::or(rewrite_formula(a, plans), rewrite_formula(b, plans)),
        F::Implies(a, b) => F::implies(rewrite_formula(a, plans), rewrite_formula(b, plans)),
        F::Iff(a, b) => F::iff(rewrite_formula(a, plans), rewrite_formula(b, plans)),
        F::Forall(x, a) => F::forall(x.clone(), rewrite_formula(a, plans)),
        F::Exists(x, a) => F::exists(x.clone(), rewrite_formula(a, plans)),
    }
}

fn bridge_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Applies the arity optimisation; the result is equisatisfiable with the
/// input.
pub fn arity_optimize(p: &Problem) -> Problem {
    let mut uses: BTreeMap<String, Usage> = BTreeMap::new();
    for ax in p.all() {
        scan_formula(&ax.formula, &mut uses);
    }
    let mut plans = BTreeMap::new();
    for (c, u) in &uses {
        let pred = match u.pred_counts.iter().collect::<Vec<_>>().as_slice() {
            [q] => Some((format!("${c}_{q}"), **q)),
            _ => None,
        };
        let fun = u.term_counts.iter().find(|k| **k > 0).map(|n| {
            let mut name = format!("${c}_{n}");
            if pred.as_ref().is_some_and(|(pn, _)| *pn == name) {
                name.push('t');
            }
            (name, *n)
        });
        if fun.is_some() || pred.is_some() {
            plans.insert(c.clone(), Plan { fun, pred });
        }
    }

    let mut axioms: Vec<LabeledAxiom> = p
        .axioms
        .iter()
        .map(|a| LabeledAxiom {
            formula: rewrite_formula(&a.formula, &plans),
            ..a.clone()
        })
        .collect();
    let mut conjecture = p.conjecture.clone();
    conjecture.formula = rewrite_formula(&conjecture.formula, &plans);

    for (c, plan) in &plans {
        let u = &uses[c];
        if let Some((name, n)) = &plan.fun {
            if u.term_counts.contains(&0) {
                let xs = bridge_vars(*n);
                let vars: Vec<FolTerm> = xs.iter().map(FolTerm::var).collect();
                let direct = FolTerm::Fun(name.clone(), vars.clone());
                let curried = FolTerm::apps(FolTerm::cnst(c.clone()), vars);
                axioms.push(
                    LabeledAxiom::new(
                        format!("'bridge_fn_{c}"),
                        Role::Axiom,
                        FolFormula::forall_many(&xs, FolFormula::eq(direct, curried)),
                    )
                    .with_origin(c.clone(), OriginKind::Bridge),
                );
            }
        }
        if let Some((name, q)) = &plan.pred {
            if !u.term_counts.is_empty() {
                let xs = bridge_vars(*q);
                let vars: Vec<FolTerm> = xs.iter().map(FolTerm::var).collect();
                let as_term = rewrite_term(&FolTerm::apps(FolTerm::cnst(c.clone()), vars.clone()), &plans);
                let atom = FolFormula::Atom(name.clone(), vars);
                axioms.push(
                    LabeledAxiom::new(
                        format!("'bridge_pred_{c}"),
                        Role::Axiom,
                        FolFormula::forall_many(&xs, FolFormula::iff(atom, FolFormula::provable(as_term))),
                    )
                    .with_origin(c.clone(), OriginKind::Bridge),
                );
            }
        }
    }
    Problem { axioms, conjecture }
}
