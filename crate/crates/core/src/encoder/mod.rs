//! Encoding of propositions, types and terms into untyped first-order logic.
//!
//! Propositions become formulas (`encode_prop`), types become guard formulas
//! about a subject (`encode_guard`), and everything else becomes a
//! first-order term (`encode_term`) built with the binary `@` symbol. Product
//! types, lambda abstractions and case expressions in term position are
//! replaced by fresh constants applied to their free variables, with a side
//! axiom describing them.

mod arity;

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::folir::{FolFormula, FolTerm, LabeledAxiom, OriginKind, Role};
use crate::kernel::{free_context, fresh_name, is_proof, is_prop, Context, Environment, Sort, Term};

pub use arity::arity_optimize;

use FolFormula as F;

/// Symbol used for a sort in term position.
pub fn sort_symbol(s: Sort) -> &'static str {
    match s {
        Sort::Prop => "$prop",
        Sort::Set => "$set",
        Sort::Type => "$type",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LiftKind {
    Pi,
    Lambda,
    Case,
}

impl LiftKind {
    fn prefix(self) -> &'static str {
        match self {
            LiftKind::Pi => "'pi_",
            LiftKind::Lambda => "'lam_",
            LiftKind::Case => "'case_",
        }
    }
}

/// Something the encoder had to approximate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub decl: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.decl, self.message)
    }
}

/// Logical constants mapped to native connectives when fully applied.
#[derive(Clone, Copy, Debug)]
enum Native<'a> {
    False,
    True,
    And(&'a Term, &'a Term),
    Or(&'a Term, &'a Term),
    Iff(&'a Term, &'a Term),
    Not(&'a Term),
    Ex(&'a Term, &'a Term),
    Eq(&'a Term, &'a Term),
}

fn native<'a>(env: &Environment, t: &'a Term) -> Option<Native<'a>> {
    let (head, args) = t.spine();
    let Term::Const(c) = head else { return None };
    if !env.contains(c) {
        return None;
    }
    Some(match (c.as_str(), args.as_slice()) {
        ("False", []) => Native::False,
        ("True", []) => Native::True,
        ("and", [a, b]) => Native::And(a, b),
        ("or", [a, b]) => Native::Or(a, b),
        ("iff", [a, b]) => Native::Iff(a, b),
        ("not", [a]) => Native::Not(a),
        ("ex", [ty, p]) => Native::Ex(ty, p),
        ("eq", [_, x, y]) => Native::Eq(x, y),
        _ => return None,
    })
}

/// Names of the logical constants given native treatment.
pub const NATIVE_CONSTANTS: [&str; 8] = ["False", "True", "and", "or", "iff", "not", "ex", "eq"];

/// Per-run encoder state: fresh-name counters, collected side axioms and
/// diagnostics.
#[derive(Debug)]
pub struct EncoderState<'e> {
    env: &'e Environment,
    collected: Vec<LabeledAxiom>,
    counters: [usize; 3],
    diagnostics: Vec<Diagnostic>,
    memo: HashMap<String, FolTerm>,
    decl: String,
}

impl<'e> EncoderState<'e> {
    pub fn new(env: &'e Environment) -> Self {
        Self {
            env,
            collected: Vec::new(),
            counters: [0; 3],
            diagnostics: Vec::new(),
            memo: HashMap::new(),
            decl: String::new(),
        }
    }

    pub fn env(&self) -> &'e Environment {
        self.env
    }

    /// Declaration whose translation is in progress; used as the origin of
    /// lifted axioms and in diagnostics.
    pub fn set_decl(&mut self, name: &str) {
        self.decl = name.to_string();
    }

    pub fn collected(&self) -> &[LabeledAxiom] {
        &self.collected
    }

    /// Drains the side axioms collected so far.
    pub fn take_collected(&mut self) -> Vec<LabeledAxiom> {
        std::mem::take(&mut self.collected)
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn diagnose(&mut self, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            decl: self.decl.clone(),
            message: message.into(),
        });
    }

    fn prop(&self, ctx: &Context, t: &Term) -> bool {
        is_prop(self.env, ctx, t)
    }

    fn fresh(&mut self, kind: LiftKind) -> String {
        let i = kind as usize;
        let n = self.counters[i];
        self.counters[i] += 1;
        format!("{}{n}", kind.prefix())
    }

    fn push_lifted(&mut self, name: &str, formula: FolFormula) {
        let free = formula.free_vars();
        let closed = F::forall_many(&free, formula);
        self.collected.push(
            LabeledAxiom::new(name, Role::LiftedAxiom, closed).with_origin(self.decl.clone(), OriginKind::Lifted),
        );
    }

    fn memo_key(&self, kind: &str, ctx: &Context, t: &Term) -> String {
        let mut key = format!("{kind}|");
        for (x, ty) in free_context(ctx, t).entries() {
            key.push_str(&format!("{x}:{ty};"));
        }
        key.push_str(&format!("|{t}"));
        key
    }

    /// Free variables of `t` that become arguments of a lifted symbol, in
    /// context order: non-proof variables, plus proof variables that still
    /// occur in the encoded side axiom.
    fn lift_args(&self, ctx: &Context, t: &Term, used: &[String]) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (x, ty) in ctx.entries() {
            if out.contains(x) || !t.has_free(x) {
                continue;
            }
            if !is_prop(self.env, ctx, ty) || used.contains(x) {
                out.push(x.clone());
            }
        }
        out
    }

    /// Binder name for `x` avoiding the context, the body and `extra`.
    fn binder(ctx: &Context, x: &str, body: &Term, extra: &[String]) -> (String, Term) {
        if !ctx.contains(x) && !extra.iter().any(|e| e == x) {
            return (x.to_string(), body.clone());
        }
        let mut avoid: HashSet<String> = ctx.names().map(str::to_string).collect();
        avoid.extend(body.free_vars());
        avoid.extend(extra.iter().cloned());
        let fresh = fresh_name(x, &avoid);
        let renamed = body.subst(x, &Term::Var(fresh.clone()));
        (fresh, renamed)
    }

    /// 𝓕: propositions to formulas.
    pub fn encode_prop(&mut self, ctx: &Context, t: &Term) -> FolFormula {
        if let Term::Pi(x, a, b) = t {
            let (x2, b2) = ctx.freshen(x, b);
            let ctx2 = ctx.extended(x2.clone(), a.as_ref().clone());
            if self.prop(ctx, a) {
                let lhs = self.encode_prop(ctx, a);
                let rhs = self.encode_prop(&ctx2, &b2);
                return F::implies(lhs, rhs);
            }
            let guard = self.encode_guard(ctx, a, &FolTerm::var(x2.clone()));
            let body = self.encode_prop(&ctx2, &b2);
            return F::forall(x2, F::implies(guard, body));
        }
        if let Some(n) = native(self.env, t) {
            return self.encode_native(ctx, n);
        }
        if !self.prop(ctx, t) {
            self.diagnose(format!("{t} is not a proposition"));
        }
        F::provable(self.encode_term(ctx, t))
    }

    fn encode_native(&mut self, ctx: &Context, n: Native<'_>) -> FolFormula {
        match n {
            Native::False => F::Bottom,
            Native::True => F::Top,
            Native::And(a, b) => F::and(self.encode_prop(ctx, a), self.encode_prop(ctx, b)),
            Native::Or(a, b) => F::or(self.encode_prop(ctx, a), self.encode_prop(ctx, b)),
            Native::Iff(a, b) => F::iff(self.encode_prop(ctx, a), self.encode_prop(ctx, b)),
            Native::Not(a) => F::not(self.encode_prop(ctx, a)),
            Native::Eq(x, y) => F::eq(self.encode_term(ctx, x), self.encode_term(ctx, y)),
            Native::Ex(ty, pred) => {
                let (x, body) = match pred {
                    Term::Lambda(x, _, body) => ctx.freshen(x, body),
                    other => {
                        let mut avoid: HashSet<String> = ctx.names().map(str::to_string).collect();
                        avoid.extend(other.free_vars());
                        let x = fresh_name("x", &avoid);
                        let body = Term::app(other.clone(), Term::var(x.clone()));
                        (x, body)
                    }
                };
                let ctx2 = ctx.extended(x.clone(), ty.clone());
                let guard = self.encode_guard(ctx, ty, &FolTerm::var(x.clone()));
                let body = self.encode_prop(&ctx2, &body);
                F::exists(x, F::and(guard, body))
            }
        }
    }

    /// 𝓖: a type as a guard about `subject`.
    pub fn encode_guard(&mut self, ctx: &Context, ty: &Term, subject: &FolTerm) -> FolFormula {
        if let Term::Pi(x, a, b) = ty {
            let mut extra = Vec::new();
            subject.collect_vars(&mut extra);
            let (x2, b2) = Self::binder(ctx, x, b, &extra);
            let ctx2 = ctx.extended(x2.clone(), a.as_ref().clone());
            if self.prop(ctx, a) {
                let lhs = self.encode_prop(ctx, a);
                let rhs = self.encode_guard(&ctx2, &b2, subject);
                return F::implies(lhs, rhs);
            }
            let xv = FolTerm::var(x2.clone());
            let guard = self.encode_guard(ctx, a, &xv);
            let body = self.encode_guard(&ctx2, &b2, &FolTerm::app(subject.clone(), xv));
            return F::forall(x2, F::implies(guard, body));
        }
        F::has_type(subject.clone(), self.encode_term(ctx, ty))
    }

    /// 𝓒: terms to first-order terms.
    pub fn encode_term(&mut self, ctx: &Context, t: &Term) -> FolTerm {
        match t {
            Term::Sort(s) => FolTerm::cnst(sort_symbol(*s)),
            Term::Var(x) => FolTerm::var(x.clone()),
            Term::Const(c) => {
                if native(self.env, t).is_some() {
                    self.lift_prop(ctx, t)
                } else {
                    FolTerm::cnst(c.clone())
                }
            }
            Term::App(..) => {
                if native(self.env, t).is_some() {
                    return self.lift_prop(ctx, t);
                }
                let (head, args) = t.spine();
                let mut acc = self.encode_term(ctx, head);
                for a in args {
                    if is_proof(self.env, ctx, a) {
                        continue;
                    }
                    let ea = self.encode_term(ctx, a);
                    acc = FolTerm::app(acc, ea);
                }
                acc
            }
            Term::Pi(..) => {
                if self.prop(ctx, t) {
                    self.lift_prop(ctx, t)
                } else {
                    self.lift_type(ctx, t)
                }
            }
            Term::Lambda(..) => self.lift_lambda(ctx, t),
            Term::Case(_) => self.lift_case(ctx, t),
        }
    }

    /// `∀ỹ. P(F ỹ) ↔ 𝓕(t)` for a proposition in term position.
    fn lift_prop(&mut self, ctx: &Context, t: &Term) -> FolTerm {
        let key = self.memo_key("prop", ctx, t);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let name = self.fresh(LiftKind::Pi);
        let body = self.encode_prop(ctx, t);
        let ys = self.lift_args(ctx, t, &body.free_vars());
        let head = FolTerm::apps(FolTerm::cnst(name.clone()), ys.iter().map(FolTerm::var));
        let ax = F::forall_many(&ys, F::iff(F::provable(head.clone()), body));
        self.push_lifted(&name, ax);
        self.memo.insert(key, head.clone());
        head
    }

    /// `∀ỹ z. T(z, F ỹ) ↔ 𝓖(t, z)` for a product type in term position.
    fn lift_type(&mut self, ctx: &Context, t: &Term) -> FolTerm {
        let key = self.memo_key("type", ctx, t);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let name = self.fresh(LiftKind::Pi);
        let mut avoid: HashSet<String> = ctx.names().map(str::to_string).collect();
        avoid.extend(t.free_vars());
        let z = fresh_name("z", &avoid);
        let body = self.encode_guard(ctx, t, &FolTerm::var(z.clone()));
        let used: Vec<String> = body.free_vars().into_iter().filter(|v| *v != z).collect();
        let ys = self.lift_args(ctx, t, &used);
        let head = FolTerm::apps(FolTerm::cnst(name.clone()), ys.iter().map(FolTerm::var));
        let inner = F::forall(z.clone(), F::iff(F::has_type(FolTerm::var(z), head.clone()), body));
        self.push_lifted(&name, F::forall_many(&ys, inner));
        self.memo.insert(key, head.clone());
        head
    }

    /// `∀ỹ. 𝓕(∀x⃗:t⃗. F ỹ x⃗ = s)` for `λx⃗:t⃗. s`.
    fn lift_lambda(&mut self, ctx: &Context, t: &Term) -> FolTerm {
        let key = self.memo_key("lam", ctx, t);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let name = self.fresh(LiftKind::Lambda);
        let mut inner_ctx = ctx.clone();
        let mut binders: Vec<(String, bool, FolFormula)> = Vec::new();
        let mut cur = t.clone();
        while let Term::Lambda(x, a, b) = &cur {
            let (x2, b2) = inner_ctx.freshen(x, b);
            let proof = self.prop(&inner_ctx, a);
            let guard = if proof {
                self.encode_prop(&inner_ctx, a)
            } else {
                self.encode_guard(&inner_ctx, a, &FolTerm::var(x2.clone()))
            };
            binders.push((x2.clone(), proof, guard));
            inner_ctx.push(x2, a.as_ref().clone());
            cur = b2;
        }
        let rhs = self.encode_term(&inner_ctx, &cur);
        let mut used = Vec::new();
        rhs.collect_vars(&mut used);
        for (_, _, g) in &binders {
            used.extend(g.free_vars());
        }
        let ys = self.lift_args(ctx, t, &used);
        let head = FolTerm::apps(FolTerm::cnst(name.clone()), ys.iter().map(FolTerm::var));
        let lhs = FolTerm::apps(
            head.clone(),
            binders
                .iter()
                .filter(|(_, proof, _)| !proof)
                .map(|(x, _, _)| FolTerm::var(x.clone())),
        );
        let mut body = F::eq(lhs, rhs);
        for (x, proof, guard) in binders.into_iter().rev() {
            body = if proof {
                F::implies(guard, body)
            } else {
                F::forall(x, F::implies(guard, body))
            };
        }
        self.push_lifted(&name, F::forall_many(&ys, body));
        self.memo.insert(key, head.clone());
        head
    }

    fn opaque(&mut self, kind: LiftKind, why: String) -> FolTerm {
        let name = self.fresh(kind);
        self.diagnose(format!("{why}; using opaque constant {name}"));
        FolTerm::cnst(name)
    }

    /// Case expression: `F ỹ₁ ỹ₂` with a disjunctive axiom, one disjunct per
    /// constructor.
    fn lift_case(&mut self, ctx: &Context, t: &Term) -> FolTerm {
        let Term::Case(c) = t else {
            unreachable!("lift_case on non-case")
        };
        let key = self.memo_key("case", ctx, t);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let env = self.env;
        let Some(ind) = env.inductive(&c.ind) else {
            return self.opaque(LiftKind::Case, format!("case over unknown inductive {}", c.ind));
        };
        if ind.constructors.len() != c.branches.len() || ind.n_params != c.n_params {
            return self.opaque(LiftKind::Case, format!("malformed case over {}", c.ind));
        }
        let name = self.fresh(LiftKind::Case);

        let g2 = free_context(ctx, &c.scrutinee);
        let probe = g2.entries().iter().rev().fold(
            Term::apps(c.scrutinee.clone(), c.branches.iter().cloned()),
            |acc, (y, ty)| Term::lambda(y.clone(), ty.clone(), acc),
        );
        let g1 = free_context(ctx, &probe);
        let case_ctx = Context::from_entries(g1.entries().iter().chain(g2.entries()).cloned().collect());
        let non_proof = |ctx: &Context, g: &Context| -> Vec<String> {
            g.entries()
                .iter()
                .filter(|(_, ty)| !is_prop(env, ctx, ty))
                .map(|(y, _)| y.clone())
                .collect()
        };
        let y1 = non_proof(&case_ctx, &g1);
        let y2 = non_proof(&case_ctx, &g2);
        let head = FolTerm::apps(FolTerm::cnst(name.clone()), y1.iter().chain(&y2).map(FolTerm::var));
        let scrut = self.encode_term(&case_ctx, &c.scrutinee);

        let mut avoid: HashSet<String> = case_ctx.names().map(str::to_string).collect();
        avoid.extend(t.free_vars());
        let mut disjuncts = Vec::new();
        for (ctor, branch) in ind.constructors.iter().zip(&c.branches) {
            let mut cctx = case_ctx.clone();
            let mut binders: Vec<(String, Term, Context)> = Vec::new();
            let mut ty = ctor.ty.clone();
            while let Term::Pi(x, a, b) = &ty {
                let x2 = fresh_name(x, &avoid);
                avoid.insert(x2.clone());
                let next = b.subst(x, &Term::var(x2.clone()));
                binders.push((x2.clone(), a.as_ref().clone(), cctx.clone()));
                cctx.push(x2, a.as_ref().clone());
                ty = next;
            }
            let args: Vec<Term> = binders.iter().map(|(x, _, _)| Term::var(x.clone())).collect();
            let ctor_app = Term::apps(Term::cnst(ctor.name.clone()), args.iter().cloned());
            let value = apply_branch(branch, args.iter().skip(c.n_params.min(args.len())));
            let lhs = F::eq(scrut.clone(), self.encode_term(&cctx, &ctor_app));
            let rhs = F::eq(head.clone(), self.encode_term(&cctx, &value));
            let mut body = F::and(lhs, rhs);
            for (x, a, bctx) in binders.into_iter().rev() {
                body = if self.prop(&bctx, &a) {
                    F::and(self.encode_prop(&bctx, &a), body)
                } else {
                    let g = self.encode_guard(&bctx, &a, &FolTerm::var(x.clone()));
                    F::exists(x, F::and(g, body))
                };
            }
            disjuncts.push(body);
        }
        let mut body = F::disj(disjuncts);
        let mut prefix = g1.clone();
        let mut guards = Vec::new();
        for (y, ty) in g2.entries() {
            let proof = self.prop(&prefix, ty);
            let g = if proof {
                self.encode_prop(&prefix, ty)
            } else {
                self.encode_guard(&prefix, ty, &FolTerm::var(y.clone()))
            };
            guards.push((y.clone(), proof, g));
            prefix.push(y.clone(), ty.clone());
        }
        for (y, proof, g) in guards.into_iter().rev() {
            body = if proof {
                F::implies(g, body)
            } else {
                F::forall(y, F::implies(g, body))
            };
        }
        self.push_lifted(&name, F::forall_many(&y1, body));
        self.memo.insert(key, head.clone());
        head
    }
}

/// Applies a branch to constructor arguments, contracting leading lambdas.
fn apply_branch<'a>(branch: &Term, args: impl Iterator<Item = &'a Term>) -> Term {
    let mut cur = branch.clone();
    for a in args {
        cur = match cur {
            Term::Lambda(x, _, body) => body.subst(&x, a),
            other => Term::app(other, a.clone()),
        };
    }
    cur
}
