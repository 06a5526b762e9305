use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary application symbol, written `ap/2` in TPTP.
pub const APP: &str = "@";
/// Unary "is provable" predicate, written `p/1`.
pub const PROVABLE: &str = "$P";
/// Binary "has type" predicate, written `t/2`.
pub const HAS_TYPE: &str = "$T";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FolTerm {
    Var(String),
    Fun(String, Vec<FolTerm>),
}

impl FolTerm {
    pub fn var(x: impl Into<String>) -> Self {
        FolTerm::Var(x.into())
    }

    pub fn cnst(c: impl Into<String>) -> Self {
        FolTerm::Fun(c.into(), Vec::new())
    }

    pub fn fun(f: impl Into<String>, args: Vec<FolTerm>) -> Self {
        FolTerm::Fun(f.into(), args)
    }

    /// `ap(f, a)`
    pub fn app(f: FolTerm, a: FolTerm) -> Self {
        FolTerm::Fun(APP.to_string(), vec![f, a])
    }

    pub fn apps(f: FolTerm, args: impl IntoIterator<Item = FolTerm>) -> Self {
        args.into_iter().fold(f, FolTerm::app)
    }

    /// Symbol count.
    pub fn size(&self) -> usize {
        match self {
            FolTerm::Var(_) => 1,
            FolTerm::Fun(_, args) => 1 + args.iter().map(FolTerm::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            FolTerm::Var(_) => false,
            FolTerm::Fun(_, args) => args.iter().all(FolTerm::is_ground),
        }
    }

    pub fn has_var(&self, x: &str) -> bool {
        match self {
            FolTerm::Var(y) => x == y,
            FolTerm::Fun(_, args) => args.iter().any(|a| a.has_var(x)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            FolTerm::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            FolTerm::Fun(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn subst(&self, x: &str, u: &FolTerm) -> FolTerm {
        match self {
            FolTerm::Var(y) if y == x => u.clone(),
            FolTerm::Var(_) => self.clone(),
            FolTerm::Fun(f, args) => FolTerm::Fun(f.clone(), args.iter().map(|a| a.subst(x, u)).collect()),
        }
    }

    /// Every subterm, outermost first.
    pub fn subterms<'a>(&'a self, out: &mut Vec<&'a FolTerm>) {
        out.push(self);
        if let FolTerm::Fun(_, args) = self {
            for a in args {
                a.subterms(out);
            }
        }
    }
}

impl fmt::Display for FolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolTerm::Var(x) => write!(f, "{x}"),
            FolTerm::Fun(name, args) if args.is_empty() => write!(f, "{name}"),
            FolTerm::Fun(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FolFormula {
    Atom(String, Vec<FolTerm>),
    Eq(FolTerm, FolTerm),
    Top,
    Bottom,
    Not(Box<FolFormula>),
    And(Box<FolFormula>, Box<FolFormula>),
    Or(Box<FolFormula>, Box<FolFormula>),
    Implies(Box<FolFormula>, Box<FolFormula>),
    Iff(Box<FolFormula>, Box<FolFormula>),
    Forall(String, Box<FolFormula>),
    Exists(String, Box<FolFormula>),
}

use FolFormula as F;

impl FolFormula {
    pub fn atom(p: impl Into<String>, args: Vec<FolTerm>) -> Self {
        F::Atom(p.into(), args)
    }

    /// `P(t)`
    pub fn provable(t: FolTerm) -> Self {
        F::Atom(PROVABLE.to_string(), vec![t])
    }

    /// `T(subject, ty)`
    pub fn has_type(subject: FolTerm, ty: FolTerm) -> Self {
        F::Atom(HAS_TYPE.to_string(), vec![subject, ty])
    }

    pub fn eq(l: FolTerm, r: FolTerm) -> Self {
        F::Eq(l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: FolFormula) -> Self {
        F::Not(Box::new(a))
    }

    pub fn and(a: FolFormula, b: FolFormula) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FolFormula, b: FolFormula) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: FolFormula, b: FolFormula) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: FolFormula, b: FolFormula) -> Self {
        F::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, body: FolFormula) -> Self {
        F::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: impl Into<String>, body: FolFormula) -> Self {
        F::Exists(x.into(), Box::new(body))
    }

    pub fn forall_many(xs: &[String], body: FolFormula) -> Self {
        xs.iter().rev().fold(body, |acc, x| F::forall(x.clone(), acc))
    }

    pub fn exists_many(xs: &[String], body: FolFormula) -> Self {
        xs.iter().rev().fold(body, |acc, x| F::exists(x.clone(), acc))
    }

    /// Right-nested conjunction; `Top` when empty.
    pub fn conj(parts: Vec<FolFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => F::Top,
            Some(last) => it.fold(last, |acc, p| F::and(p, acc)),
        }
    }

    /// Right-nested disjunction; `Bottom` when empty.
    pub fn disj(parts: Vec<FolFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => F::Bottom,
            Some(last) => it.fold(last, |acc, p| F::or(p, acc)),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, F::Atom(..) | F::Eq(..))
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.fv_into(&mut bound, &mut out);
        out
    }

    fn fv_into(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_term = |t: &FolTerm, bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            F::Atom(_, args) => args.iter().for_each(|a| push_term(a, bound, out)),
            F::Eq(l, r) => {
                push_term(l, bound, out);
                push_term(r, bound, out);
            }
            F::Top | F::Bottom => {}
            F::Not(a) => a.fv_into(bound, out),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.fv_into(bound, out);
                b.fv_into(bound, out);
            }
            F::Forall(x, a) | F::Exists(x, a) => {
                bound.push(x.clone());
                a.fv_into(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            F::Atom(_, args) => args.iter().any(|a| a.has_var(x)),
            F::Eq(l, r) => l.has_var(x) || r.has_var(x),
            F::Top | F::Bottom => false,
            F::Not(a) => a.has_free(x),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => a.has_free(x) || b.has_free(x),
            F::Forall(y, a) | F::Exists(y, a) => y != x && a.has_free(x),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution of `u` for free `x`.
    pub fn subst(&self, x: &str, u: &FolTerm) -> FolFormula {
        let mut uvars = Vec::new();
        u.collect_vars(&mut uvars);
        self.subst_in(x, u, &uvars)
    }

    fn subst_in(&self, x: &str, u: &FolTerm, uvars: &[String]) -> FolFormula {
        match self {
            F::Atom(p, args) => F::Atom(p.clone(), args.iter().map(|a| a.subst(x, u)).collect()),
            F::Eq(l, r) => F::Eq(l.subst(x, u), r.subst(x, u)),
            F::Top | F::Bottom => self.clone(),
            F::Not(a) => F::not(a.subst_in(x, u, uvars)),
            F::And(a, b) => F::and(a.subst_in(x, u, uvars), b.subst_in(x, u, uvars)),
            F::Or(a, b) => F::or(a.subst_in(x, u, uvars), b.subst_in(x, u, uvars)),
            F::Implies(a, b) => F::implies(a.subst_in(x, u, uvars), b.subst_in(x, u, uvars)),
            F::Iff(a, b) => F::iff(a.subst_in(x, u, uvars), b.subst_in(x, u, uvars)),
            F::Forall(y, a) | F::Exists(y, a) => {
                let (y2, body) = if y == x || !a.has_free(x) {
                    (y.clone(), a.as_ref().clone())
                } else if uvars.contains(y) {
                    let mut avoid: HashSet<String> = uvars.iter().cloned().collect();
                    avoid.extend(a.free_vars());
                    avoid.insert(x.to_string());
                    let mut fresh = y.clone();
                    while avoid.contains(&fresh) {
                        fresh.push('\'');
                    }
                    let renamed = a.subst(y, &FolTerm::Var(fresh.clone()));
                    (fresh, renamed.subst_in(x, u, uvars))
                } else {
                    (y.clone(), a.subst_in(x, u, uvars))
                };
                match self {
                    F::Forall(..) => F::forall(y2, body),
                    _ => F::exists(y2, body),
                }
            }
        }
    }

    /// Visits every term argument position (atoms and equations).
    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a FolTerm)) {
        match self {
            F::Atom(_, args) => args.iter().for_each(&mut *f),
            F::Eq(l, r) => {
                f(l);
                f(r);
            }
            F::Top | F::Bottom => {}
            F::Not(a) | F::Forall(_, a) | F::Exists(_, a) => a.for_each_term(f),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    /// Function symbols with arities, first-occurrence order.
    pub fn functions(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        fn walk(t: &FolTerm, seen: &mut BTreeSet<(String, usize)>, out: &mut Vec<(String, usize)>) {
            if let FolTerm::Fun(f, args) = t {
                if seen.insert((f.clone(), args.len())) {
                    out.push((f.clone(), args.len()));
                }
                args.iter().for_each(|a| walk(a, seen, out));
            }
        }
        self.for_each_term(&mut |t| walk(t, &mut seen, &mut out));
        out
    }

    /// Predicate symbols with arities, first-occurrence order.
    pub fn predicates(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.visit(&mut |g| {
            if let F::Atom(p, args) = g {
                let key = (p.clone(), args.len());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        });
        out
    }

    /// Pre-order traversal of subformulas.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a FolFormula)) {
        f(self);
        match self {
            F::Atom(..) | F::Eq(..) | F::Top | F::Bottom => {}
            F::Not(a) | F::Forall(_, a) | F::Exists(_, a) => a.visit(f),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Connective and symbol count.
    pub fn size(&self) -> usize {
        match self {
            F::Atom(_, args) => 1 + args.iter().map(FolTerm::size).sum::<usize>(),
            F::Eq(l, r) => 1 + l.size() + r.size(),
            F::Top | F::Bottom => 1,
            F::Not(a) | F::Forall(_, a) | F::Exists(_, a) => 1 + a.size(),
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Whether the formula has quantifiers, equations or non-nullary atoms.
    pub fn is_propositional(&self) -> bool {
        let mut prop = true;
        self.visit(&mut |g| match g {
            F::Atom(_, args) if !args.is_empty() => prop = false,
            F::Eq(..) | F::Forall(..) | F::Exists(..) => prop = false,
            _ => {}
        });
        prop
    }

    /// Map over all terms, leaving binders alone.
    pub fn map_terms(&self, f: &mut impl FnMut(&FolTerm) -> FolTerm) -> FolFormula {
        match self {
            F::Atom(p, args) => F::Atom(p.clone(), args.iter().map(&mut *f).collect()),
            F::Eq(l, r) => F::Eq(f(l), f(r)),
            F::Top | F::Bottom => self.clone(),
            F::Not(a) => F::not(a.map_terms(f)),
            F::And(a, b) => F::and(a.map_terms(f), b.map_terms(f)),
            F::Or(a, b) => F::or(a.map_terms(f), b.map_terms(f)),
            F::Implies(a, b) => F::implies(a.map_terms(f), b.map_terms(f)),
            F::Iff(a, b) => F::iff(a.map_terms(f), b.map_terms(f)),
            F::Forall(x, a) => F::forall(x.clone(), a.map_terms(f)),
            F::Exists(x, a) => F::exists(x.clone(), a.map_terms(f)),
        }
    }

    /// Alpha-equivalence.
    pub fn alpha_eq(&self, other: &FolFormula) -> bool {
        fn term_eq(a: &FolTerm, b: &FolTerm, bs: &[(String, String)]) -> bool {
            match (a, b) {
                (FolTerm::Var(x), FolTerm::Var(y)) => {
                    let ix = bs.iter().rposition(|(l, _)| l == x);
                    let iy = bs.iter().rposition(|(_, r)| r == y);
                    match (ix, iy) {
                        (None, None) => x == y,
                        (Some(i), Some(j)) => i == j,
                        _ => false,
                    }
                }
                (FolTerm::Fun(f, xs), FolTerm::Fun(g, ys)) => {
                    f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, bs))
                }
                _ => false,
            }
        }
        fn go(a: &FolFormula, b: &FolFormula, bs: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (F::Atom(p, xs), F::Atom(q, ys)) => {
                    p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, bs))
                }
                (F::Eq(a1, a2), F::Eq(b1, b2)) => term_eq(a1, b1, bs) && term_eq(a2, b2, bs),
                (F::Top, F::Top) | (F::Bottom, F::Bottom) => true,
                (F::Not(x), F::Not(y)) => go(x, y, bs),
                (F::And(a1, a2), F::And(b1, b2))
                | (F::Or(a1, a2), F::Or(b1, b2))
                | (F::Implies(a1, a2), F::Implies(b1, b2))
                | (F::Iff(a1, a2), F::Iff(b1, b2)) => go(a1, b1, bs) && go(a2, b2, bs),
                (F::Forall(x, p), F::Forall(y, q)) | (F::Exists(x, p), F::Exists(y, q)) => {
                    bs.push((x.clone(), y.clone()));
                    let r = go(p, q, bs);
                    bs.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

impl fmt::Display for FolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            F::Atom(p, args) => write!(f, "{}", FolTerm::Fun(p.clone(), args.clone())),
            F::Eq(l, r) => write!(f, "{l} = {r}"),
            F::Top => write!(f, "⊤"),
            F::Bottom => write!(f, "⊥"),
            F::Not(a) => write!(f, "¬({a})"),
            F::And(a, b) => write!(f, "({a} ∧ {b})"),
            F::Or(a, b) => write!(f, "({a} ∨ {b})"),
            F::Implies(a, b) => write!(f, "({a} → {b})"),
            F::Iff(a, b) => write!(f, "({a} ↔ {b})"),
            F::Forall(x, a) => write!(f, "∀{x}. {a}"),
            F::Exists(x, a) => write!(f, "∃{x}. {a}"),
        }
    }
}

/// Removes `Top`/`Bottom` units and vacuous quantifiers. Double negation is
/// left alone.
pub fn simplify(f: &FolFormula) -> FolFormula {
    match f {
        F::Atom(..) | F::Eq(..) | F::Top | F::Bottom => f.clone(),
        F::Not(a) => match simplify(a) {
            F::Top => F::Bottom,
            F::Bottom => F::Top,
            a => F::not(a),
        },
        F::And(a, b) => match (simplify(a), simplify(b)) {
            (F::Top, x) | (x, F::Top) => x,
            (F::Bottom, _) | (_, F::Bottom) => F::Bottom,
            (x, y) => F::and(x, y),
        },
        F::Or(a, b) => match (simplify(a), simplify(b)) {
            (F::Bottom, x) | (x, F::Bottom) => x,
            (F::Top, _) | (_, F::Top) => F::Top,
            (x, y) => F::or(x, y),
        },
        F::Implies(a, b) => match (simplify(a), simplify(b)) {
            (F::Top, x) => x,
            (F::Bottom, _) | (_, F::Top) => F::Top,
            (x, y) => F::implies(x, y),
        },
        F::Iff(a, b) => match (simplify(a), simplify(b)) {
            (F::Top, x) | (x, F::Top) => x,
            (F::Bottom, x) | (x, F::Bottom) => simplify(&F::not(x)),
            (x, y) => F::iff(x, y),
        },
        F::Forall(x, a) => {
            let body = simplify(a);
            if body.has_free(x) {
                F::forall(x.clone(), body)
            } else {
                body
            }
        }
        F::Exists(x, a) => {
            let body = simplify(a);
            if body.has_free(x) {
                F::exists(x.clone(), body)
            } else {
                body
            }
        }
    }
}

/// Role of an axiom within a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Axiom,
    DefinitionAxiom,
    LiftedAxiom,
    Conjecture,
}

/// Which part of a declaration's translation produced an axiom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginKind {
    Statement,
    Type,
    Definition,
    Injectivity,
    Discrimination,
    Inversion,
    Lifted,
    Bridge,
}

impl OriginKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OriginKind::Statement => "statement",
            OriginKind::Type => "type",
            OriginKind::Definition => "definition",
            OriginKind::Injectivity => "injectivity",
            OriginKind::Discrimination => "discrimination",
            OriginKind::Inversion => "inversion",
            OriginKind::Lifted => "lifted",
            OriginKind::Bridge => "bridge",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "statement" => OriginKind::Statement,
            "type" => OriginKind::Type,
            "definition" => OriginKind::Definition,
            "injectivity" => OriginKind::Injectivity,
            "discrimination" => OriginKind::Discrimination,
            "inversion" => OriginKind::Inversion,
            "lifted" => OriginKind::Lifted,
            "bridge" => OriginKind::Bridge,
            _ => return None,
        })
    }
}

/// Source declaration (or lifted symbol) of an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub decl: String,
    pub kind: OriginKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledAxiom {
    pub label: String,
    pub role: Role,
    pub formula: FolFormula,
    pub origin: Option<Origin>,
}

impl LabeledAxiom {
    pub fn new(label: impl Into<String>, role: Role, formula: FolFormula) -> Self {
        Self {
            label: label.into(),
            role,
            formula,
            origin: None,
        }
    }

    pub fn with_origin(mut self, decl: impl Into<String>, kind: OriginKind) -> Self {
        self.origin = Some(Origin {
            decl: decl.into(),
            kind,
        });
        self
    }
}

/// Labeled axioms plus exactly one conjecture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub axioms: Vec<LabeledAxiom>,
    pub conjecture: LabeledAxiom,
}

impl Problem {
    pub fn new(axioms: Vec<LabeledAxiom>, conjecture: LabeledAxiom) -> Self {
        Self { axioms, conjecture }
    }

    /// Axioms followed by the conjecture.
    pub fn all(&self) -> impl Iterator<Item = &LabeledAxiom> {
        self.axioms.iter().chain(std::iter::once(&self.conjecture))
    }

    pub fn find(&self, label: &str) -> Option<&LabeledAxiom> {
        self.all().find(|a| a.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.all().map(|a| a.label.as_str()).collect()
    }

    /// Problem restricted to the listed axiom labels (the conjecture is kept).
    pub fn restrict(&self, keep: &[String]) -> Problem {
        Problem {
            axioms: self
                .axioms
                .iter()
                .filter(|a| keep.contains(&a.label))
                .cloned()
                .collect(),
            conjecture: self.conjecture.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> FolFormula {
        F::atom(n, vec![])
    }

    #[test]
    fn simplify_units() {
        assert_eq!(simplify(&F::and(F::Top, p("a"))), p("a"));
        assert_eq!(simplify(&F::implies(p("a"), F::Top)), F::Top);
        let vac = F::forall("x", p("a"));
        assert_eq!(simplify(&vac), p("a"));
        let dn = F::not(F::not(p("a")));
        assert_eq!(simplify(&dn), dn);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = F::forall("y", F::eq(FolTerm::var("x"), FolTerm::var("y")));
        let g = f.subst("x", &FolTerm::var("y"));
        assert!(g.alpha_eq(&F::forall("z", F::eq(FolTerm::var("y"), FolTerm::var("z")))));
    }

    #[test]
    fn free_vars_skip_bound() {
        let f = F::forall("x", F::atom("r", vec![FolTerm::var("x"), FolTerm::var("y")]));
        assert_eq!(f.free_vars(), vec!["y"]);
        assert!(!f.is_closed());
    }
}
