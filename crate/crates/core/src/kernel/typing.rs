use super::env::{Context, Environment, GlobalRef};
use super::term::{Case, Sort, Term};
use super::KernelError;

pub const DEFAULT_WHNF_BUDGET: usize = 10_000;

/// Weak-head normal form under head beta and delta, with the default budget.
pub fn whnf(env: &Environment, t: &Term) -> Result<Term, KernelError> {
    whnf_with_budget(env, t, DEFAULT_WHNF_BUDGET)
}

pub fn whnf_with_budget(env: &Environment, t: &Term, budget: usize) -> Result<Term, KernelError> {
    let mut cur = t.clone();
    let mut steps = 0usize;
    loop {
        let (head, args) = cur.spine();
        let next = match head {
            Term::Lambda(x, _, body) if !args.is_empty() => {
                let reduced = body.subst(x, args[0]);
                Term::apps(reduced, args[1..].iter().map(|a| (*a).clone()))
            }
            Term::Const(c) => match env.definition_body(c) {
                Some(body) => Term::apps(body.clone(), args.iter().map(|a| (*a).clone())),
                None => return Ok(cur),
            },
            _ => return Ok(cur),
        };
        steps += 1;
        if steps > budget {
            return Err(KernelError::BudgetExceeded(budget));
        }
        cur = next;
    }
}

/// Result of asking for the sort of a term's type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortClass {
    Sort(Sort),
    NotAType,
}

/// Approximate type inference: CIC rules with collapsed universes and no
/// conversion checking on arguments.
pub fn infer_type(env: &Environment, ctx: &Context, t: &Term) -> Result<Term, KernelError> {
    match t {
        Term::Sort(_) => Ok(Term::Sort(Sort::Type)),
        Term::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| KernelError::Untypeable(format!("unbound variable {x}"))),
        Term::Const(c) => env
            .type_of(c)
            .cloned()
            .ok_or_else(|| KernelError::Untypeable(format!("unknown constant {c}"))),
        Term::App(f, a) => {
            let fty = whnf(env, &infer_type(env, ctx, f)?)?;
            match fty {
                Term::Pi(x, _, body) => Ok(body.subst(&x, a)),
                other => Err(KernelError::Untypeable(format!(
                    "application of non-function of type {other}"
                ))),
            }
        }
        Term::Lambda(x, ty, body) => {
            let (x2, body2) = ctx.freshen(x, body);
            let ctx2 = ctx.extended(x2.clone(), ty.as_ref().clone());
            let bty = infer_type(env, &ctx2, &body2)?;
            Ok(Term::pi(x2, ty.as_ref().clone(), bty))
        }
        Term::Pi(x, ty, body) => {
            let dom = sort_of(env, ctx, ty)?;
            let (x2, body2) = ctx.freshen(x, body);
            let ctx2 = ctx.extended(x2, ty.as_ref().clone());
            let cod = sort_of(env, &ctx2, &body2)?;
            Ok(Term::Sort(Sort::product(dom, cod)))
        }
        Term::Case(c) => infer_case(env, ctx, c),
    }
}

fn infer_case(env: &Environment, ctx: &Context, c: &Case) -> Result<Term, KernelError> {
    let sty = whnf(env, &infer_type(env, ctx, &c.scrutinee)?)?;
    let (head, args) = sty.spine();
    match head {
        Term::Const(i) if *i == c.ind && args.len() >= c.n_params => {
            let indices = args[c.n_params..].iter().map(|a| (*a).clone());
            let applied = Term::apps(Term::apps(c.return_pred.clone(), indices), [c.scrutinee.clone()]);
            whnf(env, &applied).or(Ok(applied))
        }
        _ => Err(KernelError::Untypeable(format!(
            "scrutinee of type {sty} is not in inductive {}",
            c.ind
        ))),
    }
}

fn sort_of(env: &Environment, ctx: &Context, ty: &Term) -> Result<Sort, KernelError> {
    match whnf(env, &infer_type(env, ctx, ty)?)? {
        Term::Sort(s) => Ok(s),
        other => Err(KernelError::Untypeable(format!("{ty} has type {other}, not a sort"))),
    }
}

/// Sort of the type of `t`; anything untypeable is `NotAType`.
pub fn sort_of_type_of(env: &Environment, ctx: &Context, t: &Term) -> SortClass {
    match sort_of(env, ctx, t) {
        Ok(s) => SortClass::Sort(s),
        Err(_) => SortClass::NotAType,
    }
}

/// `t : Prop`
pub fn is_prop(env: &Environment, ctx: &Context, t: &Term) -> bool {
    sort_of_type_of(env, ctx, t) == SortClass::Sort(Sort::Prop)
}

/// `t : A : Prop`
pub fn is_proof(env: &Environment, ctx: &Context, t: &Term) -> bool {
    match infer_type(env, ctx, t) {
        Ok(ty) => is_prop(env, ctx, &ty),
        Err(_) => false,
    }
}

/// Free variable context of `t`: the sub-context of `ctx` needed to type
/// `t`, in the original order.
pub fn free_context(ctx: &Context, t: &Term) -> Context {
    let mut entries = ctx.entries().to_vec();
    let mut cur = t.clone();
    let mut keep = Vec::new();
    while let Some((x, ty)) = entries.pop() {
        if cur.has_free(&x) {
            cur = Term::lambda(x.clone(), ty.clone(), cur);
            keep.push((x, ty));
        }
    }
    keep.reverse();
    Context::from_entries(keep)
}

/// Full beta normal form (no delta), bounded by `budget` contractions.
pub fn beta_normalize(t: &Term, budget: usize) -> Result<Term, KernelError> {
    let mut steps = 0;
    beta_norm(t, &mut steps, budget)
}

fn beta_norm(t: &Term, steps: &mut usize, budget: usize) -> Result<Term, KernelError> {
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Const(_) => Ok(t.clone()),
        Term::App(f, a) => {
            let f2 = beta_norm(f, steps, budget)?;
            let a2 = beta_norm(a, steps, budget)?;
            if let Term::Lambda(x, _, body) = &f2 {
                *steps += 1;
                if *steps > budget {
                    return Err(KernelError::BudgetExceeded(budget));
                }
                beta_norm(&body.subst(x, &a2), steps, budget)
            } else {
                Ok(Term::app(f2, a2))
            }
        }
        Term::Lambda(x, ty, body) => Ok(Term::lambda(
            x.clone(),
            beta_norm(ty, steps, budget)?,
            beta_norm(body, steps, budget)?,
        )),
        Term::Pi(x, ty, body) => Ok(Term::pi(
            x.clone(),
            beta_norm(ty, steps, budget)?,
            beta_norm(body, steps, budget)?,
        )),
        Term::Case(c) => Ok(Term::Case(Box::new(Case {
            ind: c.ind.clone(),
            n_params: c.n_params,
            scrutinee: beta_norm(&c.scrutinee, steps, budget)?,
            return_pred: beta_norm(&c.return_pred, steps, budget)?,
            branches: c
                .branches
                .iter()
                .map(|b| beta_norm(b, steps, budget))
                .collect::<Result<_, _>>()?,
        }))),
    }
}

/// Replaces every occurrence of the listed defined constants by their
/// bodies (one layer), then beta-normalizes.
pub fn unfold_constants(env: &Environment, t: &Term, names: &[String]) -> Result<Term, KernelError> {
    fn go(env: &Environment, t: &Term, names: &[String]) -> Term {
        match t {
            Term::Const(c) if names.contains(c) => match env.lookup(c) {
                Some(GlobalRef::Definition { body, .. }) => body.clone(),
                _ => t.clone(),
            },
            Term::Sort(_) | Term::Var(_) | Term::Const(_) => t.clone(),
            Term::App(f, a) => Term::app(go(env, f, names), go(env, a, names)),
            Term::Lambda(x, ty, b) => Term::lambda(x.clone(), go(env, ty, names), go(env, b, names)),
            Term::Pi(x, ty, b) => Term::pi(x.clone(), go(env, ty, names), go(env, b, names)),
            Term::Case(c) => Term::Case(Box::new(Case {
                ind: c.ind.clone(),
                n_params: c.n_params,
                scrutinee: go(env, &c.scrutinee, names),
                return_pred: go(env, &c.return_pred, names),
                branches: c.branches.iter().map(|b| go(env, b, names)).collect(),
            })),
        }
    }
    beta_normalize(&go(env, t, names), DEFAULT_WHNF_BUDGET)
}
