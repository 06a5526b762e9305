use crate::encoder::EncoderState;
use crate::folir::{FolFormula, OriginKind, Problem, Role};
use crate::kernel::{
    beta_normalize, is_prop, unfold_constants, Case, Context, Environment, GlobalRef, Term, DEFAULT_WHNF_BUDGET,
};
use crate::translate::{translate_inductive, translate_typing};

use super::{Hints, ReconstructError, Sequent};

/// Rounds of unfolding, for definitions whose bodies mention other
/// unfolded constants.
const UNFOLD_ROUNDS: usize = 8;

/// Reduces `case` on constructor applications, everywhere.
fn iota(env: &Environment, t: &Term) -> Result<Term, ReconstructError> {
    Ok(match t {
        Term::Sort(_) | Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(f, a) => Term::app(iota(env, f)?, iota(env, a)?),
        Term::Lambda(x, ty, b) => Term::lambda(x.clone(), iota(env, ty)?, iota(env, b)?),
        Term::Pi(x, ty, b) => Term::pi(x.clone(), iota(env, ty)?, iota(env, b)?),
        Term::Case(c) => {
            let scrutinee = iota(env, &c.scrutinee)?;
            let (head, args) = scrutinee.spine();
            if let Term::Const(k) = head {
                if let Some(GlobalRef::Constructor { ind, index }) = env.lookup(k) {
                    if ind.name == c.ind && args.len() >= c.n_params {
                        let branch = &c.branches[index];
                        let applied = Term::apps(branch.clone(), args[c.n_params..].iter().map(|a| (*a).clone()));
                        return iota(env, &beta_normalize(&applied, DEFAULT_WHNF_BUDGET)?);
                    }
                }
            }
            Term::Case(Box::new(Case {
                ind: c.ind.clone(),
                n_params: c.n_params,
                scrutinee,
                return_pred: iota(env, &c.return_pred)?,
                branches: c.branches.iter().map(|b| iota(env, b)).collect::<Result<_, _>>()?,
            }))
        }
    })
}

fn unfold(env: &Environment, t: &Term, names: &[String]) -> Result<Term, ReconstructError> {
    let mut cur = t.clone();
    for _ in 0..UNFOLD_ROUNDS {
        let next = iota(env, &unfold_constants(env, &cur, names)?)?;
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

/// Hypotheses contributed by one hint lemma: a proposition's statement, a
/// constant's typing guard, or a named inductive axiom such as `S_inj`.
fn lemma(st: &mut EncoderState<'_>, name: &str, unfolds: &[String]) -> Result<Vec<FolFormula>, ReconstructError> {
    let env = st.env();
    let ctx = Context::new();
    if let Some(ind) = env.inductive(name) {
        return Ok(translate_typing(st, name, &ind.arity)
            .into_iter()
            .map(|a| a.formula)
            .collect());
    }
    if let Some(ty) = env.type_of(name) {
        if is_prop(env, &ctx, ty) {
            let ty = unfold(env, ty, unfolds)?;
            st.set_decl(name);
            return Ok(vec![st.encode_prop(&ctx, &ty)]);
        }
        return Ok(translate_typing(st, name, ty).into_iter().map(|a| a.formula).collect());
    }
    let inductives: Vec<_> = env.decls().filter_map(|d| env.inductive(d.name())).collect();
    for ind in inductives {
        if let Some(ax) = translate_inductive(st, ind)?.into_iter().find(|a| a.label == name) {
            return Ok(vec![ax.formula]);
        }
    }
    Err(ReconstructError::UnknownLemma(name.to_string()))
}

/// Encodes `stmt` as the goal and the hint lemmas as hypotheses, after
/// unfolding exactly the hinted constants and reducing.
pub fn flatten_goal(env: &Environment, stmt: &Term, hints: &Hints) -> Result<Sequent, ReconstructError> {
    let ctx = Context::new();
    if !is_prop(env, &ctx, stmt) {
        return Err(ReconstructError::NotAProp(stmt.to_string()));
    }
    for u in &hints.unfolds {
        if env.lookup(u).is_none() {
            return Err(ReconstructError::UnknownLemma(u.clone()));
        }
    }
    let mut st = EncoderState::new(env);
    let mut hyps = Vec::new();
    for l in &hints.lemmas {
        hyps.extend(lemma(&mut st, l, &hints.unfolds)?);
    }
    st.set_decl("goal");
    let goal = st.encode_prop(&ctx, &unfold(env, stmt, &hints.unfolds)?);
    hyps.extend(st.take_collected().into_iter().map(|a| a.formula));
    Ok(Sequent::new(hyps, goal))
}

/// `flatten_goal` on the statement of a named declaration.
pub fn flatten_named(env: &Environment, name: &str, hints: &Hints) -> Result<Sequent, ReconstructError> {
    let ty = env
        .type_of(name)
        .ok_or_else(|| ReconstructError::UnknownLemma(name.to_string()))?;
    if !is_prop(env, &Context::new(), ty) {
        return Err(ReconstructError::NotAProp(name.to_string()));
    }
    flatten_goal(env, ty, hints)
}

/// Hints from the axiom labels an ATP cited: statements and typings
/// become lemmas, definitions become unfolds, inductive axioms are kept by
/// label, lifted and bridge axioms are dropped.
pub fn hints_from_labels(problem: &Problem, labels: &[String]) -> Hints {
    let mut hints = Hints::default();
    let add = |v: &mut Vec<String>, n: &str| {
        if !v.iter().any(|x| x == n) {
            v.push(n.to_string());
        }
    };
    for label in labels {
        let Some(ax) = problem.find(label) else { continue };
        if ax.role == Role::Conjecture {
            continue;
        }
        let Some(origin) = &ax.origin else { continue };
        match origin.kind {
            OriginKind::Statement | OriginKind::Type => add(&mut hints.lemmas, &origin.decl),
            OriginKind::Definition => add(&mut hints.unfolds, &origin.decl),
            OriginKind::Injectivity | OriginKind::Discrimination | OriginKind::Inversion => {
                add(&mut hints.lemmas, &ax.label)
            }
            OriginKind::Lifted | OriginKind::Bridge => {}
        }
    }
    hints
}

#[cfg(test)]
mod tests {
    use std::time::{Duration, Instant};

    use super::*;
    use crate::kernel::parse_env;
    use crate::reconstruct::{check_trace, prove_seq, Budget};

    const NAT: &str = "
        (inductive eq (pi (A (sort type)) (pi (_1 (var A)) (pi (_2 (var A)) (sort prop)))) 2
          ((eq_refl (pi (A (sort type)) (pi (x (var A)) (app (app (app (const eq) (var A)) (var x)) (var x)))))))
        (inductive nat (sort set) 0 ((O (const nat)) (S (pi (n (const nat)) (const nat)))))
        (typing plus (pi (n (const nat)) (pi (m (const nat)) (const nat))))
        (typing plus_O_n (pi (n (const nat)) (app (app (app (const eq) (const nat)) (app (app (const plus) (const O)) (var n))) (var n))))
        (definition pred
          (lambda (n (const nat)) (case nat 0 (var n) (lambda (_ (const nat)) (const nat)) ((const O) (lambda (m (const nat)) (var m)))))
          (pi (_1 (const nat)) (const nat)))
        (typing pred_S (pi (n (const nat)) (app (app (app (const eq) (const nat)) (app (const pred) (app (const S) (var n)))) (var n))))
    ";

    fn hints(lemmas: &[&str], unfolds: &[&str]) -> Hints {
        Hints {
            lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
            unfolds: unfolds.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn lemmas_become_hypotheses() {
        let env = parse_env(NAT).unwrap();
        let s = flatten_named(&env, "pred_S", &hints(&["plus_O_n"], &[])).unwrap();
        assert_eq!(s.hyps.len(), 1);
        assert!(s.hyps[0].to_string().contains("plus"));
    }

    #[test]
    fn unfolding_reduces_the_case() {
        let env = parse_env(NAT).unwrap();
        let folded = flatten_named(&env, "pred_S", &Hints::default()).unwrap();
        assert!(folded.goal.to_string().contains("pred"));
        let s = flatten_named(&env, "pred_S", &hints(&[], &["pred"])).unwrap();
        assert!(!s.goal.to_string().contains("pred"), "{}", s.goal);
        let t = prove_seq(&s, &Budget::default()).unwrap();
        check_trace(&s, &t).unwrap();
    }

    #[test]
    fn unknown_hints_and_non_props_are_rejected() {
        let env = parse_env(NAT).unwrap();
        assert!(matches!(
            flatten_named(&env, "pred_S", &hints(&["nope"], &[])),
            Err(ReconstructError::UnknownLemma(_))
        ));
        assert!(matches!(
            flatten_named(&env, "pred_S", &hints(&[], &["nope"])),
            Err(ReconstructError::UnknownLemma(_))
        ));
        assert!(matches!(
            flatten_named(&env, "plus", &Hints::default()),
            Err(ReconstructError::NotAProp(_))
        ));
    }

    #[test]
    fn plus_s_comm_flattens_quickly() {
        let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/nat.sx")).unwrap();
        let env = parse_env(&src).unwrap();
        let start = Instant::now();
        let s = flatten_named(
            &env,
            "plus_S_comm",
            &hints(&["plus_n_Sm", "plus_comm", "plus_S_n"], &[]),
        )
        .unwrap();
        assert!(start.elapsed() < Duration::from_secs(1));
        assert_eq!(s.hyps.len(), 3);
        assert!(s.hyps.iter().all(|h| h.is_closed() && h.to_string().contains(" = ")));
    }
}
