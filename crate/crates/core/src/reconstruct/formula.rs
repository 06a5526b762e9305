use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::folir::{FolFormula, FolTerm};

use FolFormula as F;

pub(crate) const EIGEN_PREFIX: &str = "#e";

pub(crate) fn eigen(n: u32) -> FolTerm {
    FolTerm::cnst(format!("{EIGEN_PREFIX}{n}"))
}

fn eigen_index(name: &str) -> Option<u32> {
    name.strip_prefix(EIGEN_PREFIX)?.parse().ok()
}

/// Unfolds `¬A` to `A → ⊥` and `A ↔ B` to `(A → B) ∧ (B → A)`, everywhere.
pub fn normalize(f: &FolFormula) -> FolFormula {
    match f {
        F::Atom(..) | F::Eq(..) | F::Top | F::Bottom => f.clone(),
        F::Not(a) => F::implies(normalize(a), F::Bottom),
        F::And(a, b) => F::and(normalize(a), normalize(b)),
        F::Or(a, b) => F::or(normalize(a), normalize(b)),
        F::Implies(a, b) => F::implies(normalize(a), normalize(b)),
        F::Iff(a, b) => {
            let (a, b) = (normalize(a), normalize(b));
            F::and(F::implies(a.clone(), b.clone()), F::implies(b, a))
        }
        F::Forall(x, a) => F::forall(x.clone(), normalize(a)),
        F::Exists(x, a) => F::exists(x.clone(), normalize(a)),
    }
}

/// `∀x̄. l = r` as `(l, r)`.
pub(crate) fn universal_equation(h: &FolFormula) -> Option<(FolTerm, FolTerm)> {
    let mut cur = h;
    while let F::Forall(_, b) = cur {
        cur = b;
    }
    match cur {
        F::Eq(l, r) => Some((l.clone(), r.clone())),
        _ => None,
    }
}

/// No quantifiers, no equations, ground atoms.
pub(crate) fn is_ground_propositional(f: &FolFormula) -> bool {
    match f {
        F::Atom(_, args) => args.iter().all(FolTerm::is_ground),
        F::Top | F::Bottom => true,
        F::Eq(..) | F::Forall(..) | F::Exists(..) => false,
        F::Not(a) => is_ground_propositional(a),
        F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
            is_ground_propositional(a) && is_ground_propositional(b)
        }
    }
}

/// Leading `∀` block, implication premises, conclusion.
pub(crate) fn strip(h: &FolFormula) -> (Vec<String>, Vec<&FolFormula>, &FolFormula) {
    let mut vars = Vec::new();
    let mut cur = h;
    while let F::Forall(x, b) = cur {
        vars.push(x.clone());
        cur = b;
    }
    let mut prems = Vec::new();
    while let F::Implies(a, b) = cur {
        prems.push(a.as_ref());
        cur = b;
    }
    (vars, prems, cur)
}

/// Instantiates the first `terms.len()` leading universal variables.
pub(crate) fn instantiate(h: &FolFormula, terms: &[FolTerm]) -> Option<FolFormula> {
    let mut cur = h;
    let mut vars = Vec::new();
    for _ in terms {
        match cur {
            F::Forall(x, b) => {
                vars.push(x.as_str());
                cur = b;
            }
            _ => return None,
        }
    }
    let mut out = cur.clone();
    // later binders shadow earlier ones
    let mut seen = Vec::new();
    for (x, t) in vars.iter().zip(terms).rev() {
        if !seen.contains(x) {
            out = out.subst(x, t);
            seen.push(x);
        }
    }
    Some(out)
}

/// One-way matching of `pat` against `t`, binding only `vars`.
pub(crate) fn match_term(pat: &FolTerm, t: &FolTerm, vars: &[String], sigma: &mut [Option<FolTerm>]) -> bool {
    match pat {
        FolTerm::Var(x) => match vars.iter().position(|v| v == x) {
            Some(i) => match &sigma[i] {
                Some(bound) => bound == t,
                None => {
                    sigma[i] = Some(t.clone());
                    true
                }
            },
            None => pat == t,
        },
        FolTerm::Fun(f, ps) => match t {
            FolTerm::Fun(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, s)| match_term(p, s, vars, sigma))
            }
            _ => false,
        },
    }
}

/// Matches atom against atom; equations in either orientation. Returns
/// every resulting binding.
pub(crate) fn match_atom(
    pat: &FolFormula,
    g: &FolFormula,
    vars: &[String],
    sigma: &[Option<FolTerm>],
) -> Vec<Vec<Option<FolTerm>>> {
    let mut out = Vec::new();
    match (pat, g) {
        (F::Atom(p, ps), F::Atom(q, ts)) if p == q && ps.len() == ts.len() => {
            let mut s = sigma.to_vec();
            if ps.iter().zip(ts).all(|(a, b)| match_term(a, b, vars, &mut s)) {
                out.push(s);
            }
        }
        (F::Eq(l, r), F::Eq(a, b)) => {
            for (x, y) in [(a, b), (b, a)] {
                let mut s = sigma.to_vec();
                if match_term(l, x, vars, &mut s) && match_term(r, y, vars, &mut s) && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        _ => {}
    }
    out
}

pub(crate) fn atoms<'a>(f: &'a FolFormula, out: &mut Vec<&'a FolFormula>) {
    f.visit(&mut |g| {
        if matches!(g, F::Atom(..) | F::Eq(..)) {
            out.push(g);
        }
    });
}

fn is_ground_atom(f: &FolFormula) -> bool {
    match f {
        F::Atom(_, args) => args.iter().all(FolTerm::is_ground),
        F::Eq(l, r) => l.is_ground() && r.is_ground(),
        _ => false,
    }
}

/// Ground atoms occurring anywhere in `f`, without repetition.
pub(crate) fn ground_atoms(f: &FolFormula, out: &mut Vec<FolFormula>) {
    let mut found = Vec::new();
    atoms(f, &mut found);
    for a in found {
        if is_ground_atom(a) && !out.contains(a) {
            out.push(a.clone());
        }
    }
}

/// Ground subterms occurring anywhere in `f`, without repetition.
pub(crate) fn ground_subterms(f: &FolFormula, out: &mut Vec<FolTerm>) {
    let mut found = Vec::new();
    f.for_each_term(&mut |t| t.subterms(&mut found));
    for t in found {
        if t.is_ground() && !out.contains(t) {
            out.push(t.clone());
        }
    }
}

pub(crate) fn max_eigen_term(t: &FolTerm) -> Option<u32> {
    match t {
        FolTerm::Var(_) => None,
        FolTerm::Fun(f, args) => {
            let own = if args.is_empty() { eigen_index(f) } else { None };
            args.iter().filter_map(max_eigen_term).chain(own).max()
        }
    }
}

pub(crate) fn max_eigen(f: &FolFormula) -> Option<u32> {
    let mut m: Option<u32> = None;
    f.for_each_term(&mut |t| {
        if let Some(k) = max_eigen_term(t) {
            m = Some(m.map_or(k, |x| x.max(k)));
        }
    });
    m
}

/// Hash of a sequent that ignores hypothesis order and
/// the names of eigenvariables.
pub(crate) fn canonical_key(hyps: &[FolFormula], goal: &FolFormula) -> u64 {
    let masked = |f: &FolFormula| {
        let mut h = DefaultHasher::new();
        hash_formula(f, &mut h, &mut |_| 0);
        h.finish()
    };
    let mut order: Vec<(u64, usize)> = hyps.iter().enumerate().map(|(i, f)| (masked(f), i)).collect();
    order.sort_unstable();
    let mut names: HashMap<u32, u64> = HashMap::new();
    let mut rename = |e: u32| {
        let next = names.len() as u64 + 1;
        *names.entry(e).or_insert(next)
    };
    let mut h = DefaultHasher::new();
    hash_formula(goal, &mut h, &mut rename);
    for (_, i) in order {
        hash_formula(&hyps[i], &mut h, &mut rename);
    }
    h.finish()
}

fn hash_term(t: &FolTerm, h: &mut DefaultHasher, rename: &mut impl FnMut(u32) -> u64) {
    match t {
        FolTerm::Var(x) => {
            0u8.hash(h);
            x.hash(h);
        }
        FolTerm::Fun(f, args) => match eigen_index(f).filter(|_| args.is_empty()) {
            Some(e) => {
                1u8.hash(h);
                rename(e).hash(h);
            }
            None => {
                2u8.hash(h);
                f.hash(h);
                args.len().hash(h);
                for a in args {
                    hash_term(a, h, rename);
                }
            }
        },
    }
}

fn hash_formula(f: &FolFormula, h: &mut DefaultHasher, rename: &mut impl FnMut(u32) -> u64) {
    std::mem::discriminant(f).hash(h);
    match f {
        F::Atom(p, args) => {
            p.hash(h);
            args.len().hash(h);
            for a in args {
                hash_term(a, h, rename);
            }
        }
        F::Eq(l, r) => {
            hash_term(l, h, rename);
            hash_term(r, h, rename);
        }
        F::Top | F::Bottom => {}
        F::Not(a) => hash_formula(a, h, rename),
        F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
            hash_formula(a, h, rename);
            hash_formula(b, h, rename);
        }
        F::Forall(x, a) | F::Exists(x, a) => {
            x.hash(h);
            hash_formula(a, h, rename);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: FolTerm) -> FolFormula {
        F::atom("p", vec![t])
    }

    #[test]
    fn normalize_unfolds_negation_and_iff() {
        let a = F::atom("a", vec![]);
        let b = F::atom("b", vec![]);
        let n = normalize(&F::iff(F::not(a.clone()), b.clone()));
        let na = F::implies(a, F::Bottom);
        assert_eq!(n, F::and(F::implies(na.clone(), b.clone()), F::implies(b, na)));
    }

    #[test]
    fn canonical_key_ignores_eigen_names_and_order() {
        let (e0, e1) = (eigen(0), eigen(1));
        let k1 = canonical_key(&[p(e0.clone()), F::Top], &p(e0));
        let k2 = canonical_key(&[F::Top, p(e1.clone())], &p(e1.clone()));
        assert_eq!(k1, k2);
        let k3 = canonical_key(&[F::Top, p(e1)], &p(eigen(2)));
        assert_ne!(k1, k3);
    }

    #[test]
    fn instantiate_leading_block() {
        let h = F::forall("x", F::forall("y", F::eq(FolTerm::var("x"), FolTerm::var("y"))));
        let i = instantiate(&h, &[FolTerm::cnst("a"), FolTerm::cnst("b")]).unwrap();
        assert_eq!(i, F::eq(FolTerm::cnst("a"), FolTerm::cnst("b")));
        assert!(instantiate(&F::Top, &[FolTerm::cnst("a")]).is_none());
    }

    #[test]
    fn matching_binds_only_listed_variables() {
        let vars = vec!["x".to_string()];
        let pat = FolTerm::fun("f", vec![FolTerm::var("x"), FolTerm::var("y")]);
        let t = FolTerm::fun("f", vec![FolTerm::cnst("a"), FolTerm::cnst("b")]);
        let mut s = vec![None];
        assert!(!match_term(&pat, &t, &vars, &mut s));
        let pat = FolTerm::fun("f", vec![FolTerm::var("x"), FolTerm::var("x")]);
        let mut s = vec![None];
        assert!(!match_term(&pat, &t, &vars, &mut s));
        let t = FolTerm::fun("f", vec![FolTerm::cnst("a"), FolTerm::cnst("a")]);
        let mut s = vec![None];
        assert!(match_term(&pat, &t, &vars, &mut s));
        assert_eq!(s[0], Some(FolTerm::cnst("a")));
    }
}
