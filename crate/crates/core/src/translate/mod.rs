//! Declaration-level translation, dependency extraction and problem
//! assembly.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::encoder::{Diagnostic, EncoderState};
use crate::folir::{simplify, FolFormula, FolTerm, LabeledAxiom, OriginKind, Problem, Role};
use crate::kernel::{
    fresh_name, is_prop, sort_of_type_of, whnf, Context, Declaration, Environment, Inductive, KernelError, Sort,
    SortClass, Term,
};

use FolFormula as F;

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("{0} is not a proposition")]
    NotAProp(String),
    #[error("constructor {0} does not have the shape of a telescope ending in its inductive")]
    NonTelescopeConstructor(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn sort_is_prop(env: &Environment, ty: &Term) -> bool {
    is_prop(env, &Context::new(), ty)
}

/// Translation of `c = t : τ`.
pub fn translate_definition(st: &mut EncoderState<'_>, name: &str, body: &Term, ty: &Term) -> Vec<LabeledAxiom> {
    let env = st.env();
    let ctx = Context::new();
    if sort_is_prop(env, ty) {
        let f = st.encode_prop(&ctx, ty);
        return vec![LabeledAxiom::new(name, Role::Axiom, f).with_origin(name, OriginKind::Statement)];
    }
    if sort_of_type_of(env, &ctx, ty) == SortClass::NotAType {
        st.diagnose(format!("type of {name} is not typeable"));
    }
    let c = FolTerm::cnst(name);
    let guard = st.encode_guard(&ctx, ty, &c);
    let mut out =
        vec![LabeledAxiom::new(format!("{name}_type"), Role::Axiom, guard).with_origin(name, OriginKind::Type)];
    let def = match whnf(env, ty).unwrap_or_else(|_| ty.clone()) {
        Term::Sort(Sort::Prop) => F::iff(F::provable(c), st.encode_prop(&ctx, body)),
        Term::Sort(_) => {
            let f = FolTerm::var("f");
            F::forall("f", F::iff(F::has_type(f.clone(), c), st.encode_guard(&ctx, body, &f)))
        }
        _ => F::eq(c, st.encode_term(&ctx, body)),
    };
    out.push(LabeledAxiom::new(name, Role::DefinitionAxiom, def).with_origin(name, OriginKind::Definition));
    out
}

/// Translation of `c : τ`.
pub fn translate_typing(st: &mut EncoderState<'_>, name: &str, ty: &Term) -> Vec<LabeledAxiom> {
    let ctx = Context::new();
    if sort_is_prop(st.env(), ty) {
        let f = st.encode_prop(&ctx, ty);
        vec![LabeledAxiom::new(name, Role::Axiom, f).with_origin(name, OriginKind::Statement)]
    } else {
        let g = st.encode_guard(&ctx, ty, &FolTerm::cnst(name));
        vec![LabeledAxiom::new(name, Role::Axiom, g).with_origin(name, OriginKind::Type)]
    }
}

/// Strips the Π-prefix of `ty`, giving binders fresh names; the first
/// binders take the names in `preset`.
fn telescope(ty: &Term, preset: &[String], avoid: &mut HashSet<String>) -> (Vec<(String, Term)>, Term) {
    let mut binders = Vec::new();
    let mut cur = ty.clone();
    while let Term::Pi(x, a, b) = &cur {
        let name = match preset.get(binders.len()) {
            Some(p) => p.clone(),
            None => fresh_name(x, avoid),
        };
        avoid.insert(name.clone());
        let next = b.subst(x, &Term::var(name.clone()));
        binders.push((name, a.as_ref().clone()));
        cur = next;
    }
    (binders, cur)
}

fn vars(binders: &[(String, Term)]) -> Vec<Term> {
    binders.iter().map(|(x, _)| Term::var(x.clone())).collect()
}

fn close(f: FolFormula) -> FolFormula {
    let fv = f.free_vars();
    F::forall_many(&fv, f)
}

struct CtorShape {
    name: String,
    params: Vec<(String, Term)>,
    args: Vec<(String, Term)>,
    indices: Vec<Term>,
}

fn ctor_shape(
    ind: &Inductive,
    i: usize,
    params: &[String],
    avoid: &mut HashSet<String>,
) -> Result<CtorShape, TranslateError> {
    let c = &ind.constructors[i];
    let (binders, result) = telescope(&c.ty, params, avoid);
    let (head, rargs) = result.spine();
    let ok = matches!(head, Term::Const(h) if *h == ind.name)
        && binders.len() >= ind.n_params
        && rargs.len() >= ind.n_params;
    if !ok {
        return Err(TranslateError::NonTelescopeConstructor(c.name.clone()));
    }
    let indices = rargs[ind.n_params..].iter().map(|t| (*t).clone()).collect();
    let mut params_b = binders;
    let args = params_b.split_off(ind.n_params);
    Ok(CtorShape {
        name: c.name.clone(),
        params: params_b,
        args,
        indices,
    })
}

/// Typing axioms for the inductive and its constructors, then injectivity,
/// discrimination and inversion axioms.
pub fn translate_inductive(st: &mut EncoderState<'_>, ind: &Inductive) -> Result<Vec<LabeledAxiom>, TranslateError> {
    let env = st.env();
    let mut out = translate_typing(st, &ind.name, &ind.arity);
    for c in &ind.constructors {
        out.extend(translate_typing(st, &c.name, &c.ty));
    }

    let mut avoid: HashSet<String> = HashSet::new();
    let (arity_binders, _) = telescope(&ind.arity, &[], &mut avoid);
    if arity_binders.len() < ind.n_params {
        return Err(TranslateError::NonTelescopeConstructor(ind.name.clone()));
    }
    let pnames: Vec<String> = arity_binders[..ind.n_params].iter().map(|(x, _)| x.clone()).collect();
    let shapes = (0..ind.constructors.len())
        .map(|i| ctor_shape(ind, i, &pnames, &mut avoid))
        .collect::<Result<Vec<_>, _>>()?;

    // injectivity
    for s in &shapes {
        let mut ctx = Context::from_entries(s.params.iter().chain(&s.args).cloned().collect());
        let mut ys: Vec<(String, Term)> = Vec::new();
        let mut renaming: Vec<(String, Term)> = Vec::new();
        for (x, ty) in &s.args {
            let y = fresh_name(&format!("{x}'"), &avoid);
            avoid.insert(y.clone());
            let ty2 = renaming.iter().fold(ty.clone(), |acc, (a, b)| acc.subst(a, b));
            renaming.push((x.clone(), Term::var(y.clone())));
            ys.push((y.clone(), ty2.clone()));
            ctx.push(y, ty2);
        }
        let pvars = vars(&s.params);
        let lhs = st.encode_term(
            &ctx,
            &Term::apps(Term::cnst(s.name.clone()), pvars.iter().cloned().chain(vars(&s.args))),
        );
        let rhs = st.encode_term(
            &ctx,
            &Term::apps(Term::cnst(s.name.clone()), pvars.iter().cloned().chain(vars(&ys))),
        );
        let eqs: Vec<FolFormula> = s
            .args
            .iter()
            .zip(&ys)
            .filter(|((_, ty), _)| !is_prop(env, &ctx, ty))
            .map(|((x, _), (y, _))| F::eq(FolTerm::var(x.clone()), FolTerm::var(y.clone())))
            .collect();
        if eqs.is_empty() {
            continue;
        }
        let f = close(F::implies(F::eq(lhs, rhs), F::conj(eqs)));
        out.push(
            LabeledAxiom::new(format!("{}_inj", s.name), Role::Axiom, f)
                .with_origin(ind.name.clone(), OriginKind::Injectivity),
        );
    }

    // discrimination
    for i in 0..shapes.len() {
        for j in i + 1..shapes.len() {
            let (a, b) = (&shapes[i], &shapes[j]);
            let ctx = Context::from_entries(a.params.iter().chain(&a.args).chain(&b.args).cloned().collect());
            let pvars = vars(&a.params);
            let ta = st.encode_term(
                &ctx,
                &Term::apps(Term::cnst(a.name.clone()), pvars.iter().cloned().chain(vars(&a.args))),
            );
            let tb = st.encode_term(
                &ctx,
                &Term::apps(Term::cnst(b.name.clone()), pvars.iter().cloned().chain(vars(&b.args))),
            );
            let f = close(F::not(F::eq(ta, tb)));
            out.push(
                LabeledAxiom::new(format!("{}_{}_disc", a.name, b.name), Role::Axiom, f)
                    .with_origin(ind.name.clone(), OriginKind::Discrimination),
            );
        }
    }

    // inversion
    let z = fresh_name("z", &avoid);
    avoid.insert(z.clone());
    let outer = Context::from_entries(arity_binders.clone());
    let mut disjuncts = Vec::new();
    for s in &shapes {
        let ctx = Context::from_entries(arity_binders.iter().chain(&s.args).cloned().collect());
        let mut parts = Vec::new();
        for ((u, uty), v) in arity_binders[ind.n_params..].iter().zip(&s.indices) {
            if is_prop(env, &ctx, uty) {
                continue;
            }
            parts.push(F::eq(FolTerm::var(u.clone()), st.encode_term(&ctx, v)));
        }
        let value = st.encode_term(
            &ctx,
            &Term::apps(
                Term::cnst(s.name.clone()),
                vars(&s.params).into_iter().chain(vars(&s.args)),
            ),
        );
        parts.push(F::eq(FolTerm::var(z.clone()), value));
        let mut body = F::conj(parts);
        let mut prefix = Context::from_entries(arity_binders.clone());
        let mut guards = Vec::new();
        for (x, ty) in &s.args {
            let g = if is_prop(env, &prefix, ty) {
                (None, st.encode_prop(&prefix, ty))
            } else {
                (Some(x.clone()), st.encode_guard(&prefix, ty, &FolTerm::var(x.clone())))
            };
            guards.push(g);
            prefix.push(x.clone(), ty.clone());
        }
        for (x, g) in guards.into_iter().rev() {
            body = match x {
                Some(x) => F::exists(x, F::and(g, body)),
                None => F::and(g, body),
            };
        }
        disjuncts.push(body);
    }
    let type_args = arity_binders
        .iter()
        .filter(|(_, ty)| !is_prop(env, &outer, ty))
        .map(|(x, _)| FolTerm::var(x.clone()));
    let applied = FolTerm::apps(FolTerm::cnst(ind.name.clone()), type_args);
    let mut inv = F::forall(
        z.clone(),
        F::implies(F::has_type(FolTerm::var(z), applied), F::disj(disjuncts)),
    );
    let mut prefix_guards = Vec::new();
    let mut prefix = Context::new();
    for (x, ty) in &arity_binders {
        let g = if is_prop(env, &prefix, ty) {
            (None, st.encode_prop(&prefix, ty))
        } else {
            (Some(x.clone()), st.encode_guard(&prefix, ty, &FolTerm::var(x.clone())))
        };
        prefix_guards.push(g);
        prefix.push(x.clone(), ty.clone());
    }
    for (x, g) in prefix_guards.into_iter().rev() {
        inv = match x {
            Some(x) => F::forall(x, F::implies(g, inv)),
            None => F::implies(g, inv),
        };
    }
    out.push(
        LabeledAxiom::new(format!("{}_inv", ind.name), Role::Axiom, close(inv))
            .with_origin(ind.name.clone(), OriginKind::Inversion),
    );
    Ok(out)
}

/// Translates one declaration followed by the side axioms it produced.
pub fn translate_decl(st: &mut EncoderState<'_>, decl: &Declaration) -> Result<Vec<LabeledAxiom>, TranslateError> {
    st.set_decl(decl.name());
    let mut out = match decl {
        Declaration::Definition { name, body, ty } => translate_definition(st, name, body, ty),
        Declaration::Typing { name, ty } => translate_typing(st, name, ty),
        Declaration::Inductive(ind) => translate_inductive(st, ind)?,
    };
    out.extend(st.take_collected());
    Ok(out)
}

fn family<'a>(env: &'a Environment, name: &'a str) -> Vec<&'a str> {
    match env.owner(name).and_then(|o| env.decl(o)) {
        Some(d @ Declaration::Inductive(_)) => d.introduced_names(),
        _ => vec![name],
    }
}

fn referenced(env: &Environment, name: &str, with_proofs: bool) -> Vec<String> {
    let mut out = Vec::new();
    match env.owner(name).and_then(|o| env.decl(o)) {
        Some(Declaration::Definition { body, ty, .. }) => {
            out.extend(ty.constants());
            if with_proofs || !sort_is_prop(env, ty) {
                out.extend(body.constants());
            }
        }
        Some(Declaration::Typing { ty, .. }) => out.extend(ty.constants()),
        Some(Declaration::Inductive(ind)) => {
            out.extend(ind.arity.constants());
            for c in &ind.constructors {
                out.extend(c.ty.constants());
            }
        }
        None => {}
    }
    out
}

/// Roots plus the constants in their types and bodies, then `depth` further
/// levels through types and non-proof bodies. An inductive and its
/// constructors are always taken together.
pub fn extended_deps(env: &Environment, roots: &[String], depth: usize) -> Result<BTreeSet<String>, TranslateError> {
    let mut result = BTreeSet::new();
    let mut frontier = Vec::new();
    let add = |n: &str, result: &mut BTreeSet<String>, next: &mut Vec<String>| {
        for m in family(env, n) {
            if result.insert(m.to_string()) {
                next.push(m.to_string());
            }
        }
    };
    for r in roots {
        if !env.contains(r) {
            return Err(TranslateError::UnknownName(r.clone()));
        }
        add(r, &mut result, &mut frontier);
    }
    let mut next = Vec::new();
    for r in roots {
        for c in referenced(env, r, true) {
            add(&c, &mut result, &mut next);
        }
    }
    frontier = next;
    for _ in 0..depth {
        let mut next = Vec::new();
        for n in &frontier {
            for c in referenced(env, n, false) {
                add(&c, &mut result, &mut next);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(result)
}

/// Explicit premise names, or every declaration before the conjecture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Premises {
    All(AllMarker),
    Names(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllMarker {
    #[serde(rename = "ALL")]
    All,
}

impl Premises {
    pub fn all() -> Self {
        Premises::All(AllMarker::All)
    }
}

fn default_depth() -> usize {
    2
}

/// One problem request: `{"conjecture": name, "premises": [names] | "ALL", "depth": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub conjecture: String,
    pub premises: Premises,
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Member of the designated end-to-end subset.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub acceptance: bool,
}

#[derive(Clone, Debug)]
pub struct BuiltProblem {
    pub problem: Problem,
    pub diagnostics: Vec<Diagnostic>,
}

/// Statement of a named declaration, if it is a proposition.
pub fn statement<'e>(env: &'e Environment, name: &str) -> Result<&'e Term, TranslateError> {
    let ty = env
        .type_of(name)
        .ok_or_else(|| TranslateError::UnknownName(name.to_string()))?;
    if !sort_is_prop(env, ty) {
        return Err(TranslateError::NotAProp(name.to_string()));
    }
    Ok(ty)
}

fn dedupe_labels(axioms: &mut [LabeledAxiom], reserved: &str) {
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(reserved.to_string());
    for ax in axioms.iter_mut() {
        if seen.contains(&ax.label) {
            let mut i = 2;
            while seen.contains(&format!("{}_{i}", ax.label)) {
                i += 1;
            }
            ax.label = format!("{}_{i}", ax.label);
        }
        seen.insert(ax.label.clone());
    }
}

/// Translates the conjecture's statement and every declaration among the
/// extended dependencies of the premises, in environment order.
pub fn build_problem(
    env: &Environment,
    conjecture: &str,
    premises: &Premises,
    depth: usize,
) -> Result<BuiltProblem, TranslateError> {
    let stmt = statement(env, conjecture)?;
    let conj_pos = env.position(conjecture);
    let roots: Vec<String> = match premises {
        Premises::All(_) => env
            .decls()
            .take_while(|d| d.name() != conjecture)
            .map(|d| d.name().to_string())
            .collect(),
        Premises::Names(ns) => ns.clone(),
    };
    let deps = extended_deps(env, &roots, depth)?;
    let mut st = EncoderState::new(env);
    let mut axioms = Vec::new();
    for (i, d) in env.decls().enumerate() {
        if Some(i) == conj_pos || !d.introduced_names().iter().any(|n| deps.contains(*n)) {
            continue;
        }
        axioms.extend(translate_decl(&mut st, d)?);
    }
    st.set_decl(conjecture);
    let goal = st.encode_prop(&Context::new(), stmt);
    axioms.extend(st.take_collected());
    for ax in &mut axioms {
        ax.formula = simplify(&ax.formula);
    }
    dedupe_labels(&mut axioms, conjecture);
    let conj =
        LabeledAxiom::new(conjecture, Role::Conjecture, simplify(&goal)).with_origin(conjecture, OriginKind::Statement);
    Ok(BuiltProblem {
        problem: Problem::new(axioms, conj),
        diagnostics: st.diagnostics().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folir::to_tptp;
    use crate::kernel::parse_env;

    const NAT: &str = "
        (inductive nat (sort set) 0 ((O (const nat)) (S (pi (n (const nat)) (const nat)))))
        (typing plus (pi (n (const nat)) (pi (m (const nat)) (const nat))))
        (inductive False (sort prop) 0 ())
        (inductive unit (sort set) 0 ((tt (const unit))))
    ";

    fn axioms_of(env: &Environment, name: &str) -> Vec<LabeledAxiom> {
        let mut st = EncoderState::new(env);
        let d = env.decl(name).unwrap().clone();
        translate_decl(&mut st, &d).unwrap()
    }

    fn render(axs: &[LabeledAxiom]) -> Vec<String> {
        let conj = LabeledAxiom::new("goal", Role::Conjecture, F::Top);
        let text = to_tptp(&Problem::new(
            axs.iter()
                .map(|a| LabeledAxiom {
                    formula: simplify(&a.formula),
                    origin: None,
                    ..a.clone()
                })
                .collect(),
            conj,
        ))
        .unwrap();
        text.lines()
            .filter(|l| !l.contains("conjecture"))
            .map(str::to_string)
            .collect()
    }

    #[test]
    fn nat_structure_axioms() {
        let env = parse_env(NAT).unwrap();
        let lines = render(&axioms_of(&env, "nat"));
        assert_eq!(
            lines,
            vec![
                "fof(nat, axiom, t(nat,set)).",
                "fof(o, axiom, t(o,nat)).",
                "fof(s, axiom, ![N]: (t(N,nat) => t(ap(s,N),nat))).",
                "fof(s_inj, axiom, ![N]: ![N_]: (ap(s,N) = ap(s,N_) => N = N_)).",
                "fof(o_S_disc, axiom, ![N]: ~ (o = ap(s,N))).",
                "fof(nat_inv, axiom, ![Z]: (t(Z,nat) => (Z = o | ?[N]: (t(N,nat) & Z = ap(s,N))))).",
            ]
        );
    }

    #[test]
    fn empty_and_singleton_inversions() {
        let env = parse_env(NAT).unwrap();
        let lines = render(&axioms_of(&env, "False"));
        assert_eq!(
            lines.last().unwrap(),
            "fof(false_inv, axiom, ![Z]: (t(Z,false) => $false))."
        );
        assert!(!lines.iter().any(|l| l.contains("_disc") || l.contains("_inj")));
        let lines = render(&axioms_of(&env, "unit"));
        assert_eq!(
            lines.last().unwrap(),
            "fof(unit_inv, axiom, ![Z]: (t(Z,unit) => Z = tt))."
        );
    }

    #[test]
    fn deps_of_plus() {
        let env = parse_env(NAT).unwrap();
        let d = extended_deps(&env, &["plus".to_string()], 0).unwrap();
        let names: Vec<&str> = d.iter().map(String::as_str).collect();
        assert_eq!(names, vec!["O", "S", "nat", "plus"]);
        assert!(extended_deps(&env, &[], 3).unwrap().is_empty());
        assert!(matches!(
            extended_deps(&env, &["nope".to_string()], 0),
            Err(TranslateError::UnknownName(_))
        ));
    }

    #[test]
    fn premise_json_forms() {
        let a: ProblemSpec = serde_json::from_str(r#"{"conjecture":"x","premises":"ALL"}"#).unwrap();
        assert_eq!(a.premises, Premises::all());
        assert_eq!(a.depth, 2);
        let b: ProblemSpec = serde_json::from_str(r#"{"conjecture":"x","premises":["a","b"],"depth":0}"#).unwrap();
        assert_eq!(b.premises, Premises::Names(vec!["a".into(), "b".into()]));
    }
}
