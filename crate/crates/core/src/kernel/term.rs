use std::collections::HashSet;
use std::fmt;

/// Universe sorts with levels collapsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Prop,
    Set,
    Type,
}

impl Sort {
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Prop => "prop",
            Sort::Set => "set",
            Sort::Type => "type",
        }
    }

    /// Sort of a product whose domain lives in `dom` and codomain in `cod`.
    /// Prop is impredicative; otherwise the larger of the two wins.
    pub fn product(dom: Sort, cod: Sort) -> Sort {
        if cod == Sort::Prop {
            Sort::Prop
        } else {
            dom.max(cod)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Sort(Sort),
    Var(String),
    Const(String),
    App(Box<Term>, Box<Term>),
    Lambda(String, Box<Term>, Box<Term>),
    Pi(String, Box<Term>, Box<Term>),
    Case(Box<Case>),
}

/// `case` over an inductive: `return_pred` is a lambda telescope over the
/// indices and then the scrutinee; each branch is a lambda telescope over
/// the non-parameter arguments of the matching constructor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Case {
    pub ind: String,
    pub n_params: usize,
    pub scrutinee: Term,
    pub return_pred: Term,
    pub branches: Vec<Term>,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cnst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lambda(x: impl Into<String>, ty: Term, body: Term) -> Term {
        Term::Lambda(x.into(), Box::new(ty), Box::new(body))
    }

    pub fn pi(x: impl Into<String>, ty: Term, body: Term) -> Term {
        Term::Pi(x.into(), Box::new(ty), Box::new(body))
    }

    /// Non-dependent arrow.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        let avoid: HashSet<String> = cod.free_vars().into_iter().collect();
        let x = fresh_name("_", &avoid);
        Term::pi(x, dom, cod)
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(a.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head_const(&self) -> Option<&str> {
        match self.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Free variables in first-occurrence order (binder type before body).
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut bound = Vec::new();
        collect_fv(self, &mut bound, &mut seen, &mut out);
        out
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Sort(_) | Term::Const(_) => false,
            Term::Var(y) => x == y,
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
            Term::Lambda(y, ty, body) | Term::Pi(y, ty, body) => ty.has_free(x) || (y != x && body.has_free(x)),
            Term::Case(c) => {
                c.scrutinee.has_free(x) || c.return_pred.has_free(x) || c.branches.iter().any(|b| b.has_free(x))
            }
        }
    }

    /// Constants in first-occurrence order.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.visit(&mut |t| {
            if let Term::Const(c) = t {
                if seen.insert(c.clone()) {
                    out.push(c.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal of every subterm.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Sort(_) | Term::Var(_) | Term::Const(_) => {}
            Term::App(g, a) => {
                g.visit(f);
                a.visit(f);
            }
            Term::Lambda(_, ty, body) | Term::Pi(_, ty, body) => {
                ty.visit(f);
                body.visit(f);
            }
            Term::Case(c) => {
                c.scrutinee.visit(f);
                c.return_pred.visit(f);
                for b in &c.branches {
                    b.visit(f);
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Capture-avoiding substitution of `u` for the free occurrences of `x`.
    pub fn subst(&self, x: &str, u: &Term) -> Term {
        let fv_u: HashSet<String> = u.free_vars().into_iter().collect();
        subst_in(self, x, u, &fv_u)
    }

    /// Alpha-equivalence.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha(self, other, &mut Vec::new())
    }
}

fn collect_fv(t: &Term, bound: &mut Vec<String>, seen: &mut HashSet<String>, out: &mut Vec<String>) {
    match t {
        Term::Sort(_) | Term::Const(_) => {}
        Term::Var(x) => {
            if !bound.iter().any(|b| b == x) && seen.insert(x.clone()) {
                out.push(x.clone());
            }
        }
        Term::App(f, a) => {
            collect_fv(f, bound, seen, out);
            collect_fv(a, bound, seen, out);
        }
        Term::Lambda(x, ty, body) | Term::Pi(x, ty, body) => {
            collect_fv(ty, bound, seen, out);
            bound.push(x.clone());
            collect_fv(body, bound, seen, out);
            bound.pop();
        }
        Term::Case(c) => {
            collect_fv(&c.scrutinee, bound, seen, out);
            collect_fv(&c.return_pred, bound, seen, out);
            for b in &c.branches {
                collect_fv(b, bound, seen, out);
            }
        }
    }
}

/// Appends primes to `base` until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &HashSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

fn subst_in(t: &Term, x: &str, u: &Term, fv_u: &HashSet<String>) -> Term {
    match t {
        Term::Sort(_) | Term::Const(_) => t.clone(),
        Term::Var(y) => {
            if y == x {
                u.clone()
            } else {
                t.clone()
            }
        }
        Term::App(f, a) => Term::app(subst_in(f, x, u, fv_u), subst_in(a, x, u, fv_u)),
        Term::Lambda(y, ty, body) | Term::Pi(y, ty, body) => {
            let ty2 = subst_in(ty, x, u, fv_u);
            let (y2, body2) = if y == x || !body.has_free(x) {
                (y.clone(), body.as_ref().clone())
            } else if fv_u.contains(y) {
                let mut avoid: HashSet<String> = fv_u.clone();
                avoid.extend(body.free_vars());
                avoid.insert(x.to_string());
                let fresh = fresh_name(y, &avoid);
                let renamed = body.subst(y, &Term::Var(fresh.clone()));
                let b = subst_in(&renamed, x, u, fv_u);
                (fresh, b)
            } else {
                (y.clone(), subst_in(body, x, u, fv_u))
            };
            match t {
                Term::Lambda(..) => Term::lambda(y2, ty2, body2),
                _ => Term::pi(y2, ty2, body2),
            }
        }
        Term::Case(c) => Term::Case(Box::new(Case {
            ind: c.ind.clone(),
            n_params: c.n_params,
            scrutinee: subst_in(&c.scrutinee, x, u, fv_u),
            return_pred: subst_in(&c.return_pred, x, u, fv_u),
            branches: c.branches.iter().map(|b| subst_in(b, x, u, fv_u)).collect(),
        })),
    }
}

fn alpha(a: &Term, b: &Term, binders: &mut Vec<(String, String)>) -> bool {
    match (a, b) {
        (Term::Sort(s), Term::Sort(t)) => s == t,
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::Var(x), Term::Var(y)) => {
            let ix = binders.iter().rposition(|(l, _)| l == x);
            let iy = binders.iter().rposition(|(_, r)| r == y);
            match (ix, iy) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Term::App(f, x), Term::App(g, y)) => alpha(f, g, binders) && alpha(x, y, binders),
        (Term::Lambda(x, tx, bx), Term::Lambda(y, ty, by)) | (Term::Pi(x, tx, bx), Term::Pi(y, ty, by)) => {
            if !alpha(tx, ty, binders) {
                return false;
            }
            binders.push((x.clone(), y.clone()));
            let r = alpha(bx, by, binders);
            binders.pop();
            r
        }
        (Term::Case(c), Term::Case(d)) => {
            c.ind == d.ind
                && c.n_params == d.n_params
                && c.branches.len() == d.branches.len()
                && alpha(&c.scrutinee, &d.scrutinee, binders)
                && alpha(&c.return_pred, &d.return_pred, binders)
                && c.branches.iter().zip(&d.branches).all(|(x, y)| alpha(x, y, binders))
        }
        _ => false,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sort(s) => write!(f, "(sort {})", s.keyword()),
            Term::Var(x) => write!(f, "(var {x})"),
            Term::Const(c) => write!(f, "(const {c})"),
            Term::App(g, a) => write!(f, "(app {g} {a})"),
            Term::Lambda(x, ty, body) => write!(f, "(lambda ({x} {ty}) {body})"),
            Term::Pi(x, ty, body) => write!(f, "(pi ({x} {ty}) {body})"),
            Term::Case(c) => {
                write!(f, "(case {} {} {} {} (", c.ind, c.n_params, c.scrutinee, c.return_pred)?;
                for (i, b) in c.branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{b}")?;
                }
                write!(f, "))")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn subst_replaces_free_variable() {
        assert_eq!(v("x").subst("x", &Term::cnst("c")), Term::cnst("c"));
    }

    #[test]
    fn subst_respects_shadowing() {
        let t = Term::lambda("x", v("A"), v("x"));
        assert_eq!(t.subst("x", &Term::cnst("c")), t);
    }

    #[test]
    fn subst_renames_capturing_binder() {
        let t = Term::lambda("y", v("A"), v("x"));
        let r = t.subst("x", &v("y"));
        assert_eq!(r, Term::lambda("y'", v("A"), v("y")));
    }

    #[test]
    fn free_vars_first_occurrence_order() {
        let t = Term::lambda("x", v("a"), Term::app(v("x"), v("y")));
        assert_eq!(t.free_vars(), vec!["a", "y"]);
        assert_eq!(v("x").free_vars(), vec!["x"]);
        let eq = Term::pi(
            "x",
            Term::cnst("nat"),
            Term::apps(Term::cnst("eq"), [Term::cnst("nat"), v("x"), v("x")]),
        );
        assert!(eq.free_vars().is_empty());
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Term::lambda("x", Term::cnst("A"), v("x"));
        let b = Term::lambda("y", Term::cnst("A"), v("y"));
        let c = Term::lambda("y", Term::cnst("A"), v("x"));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}
