use std::collections::{BTreeMap, HashSet};

use crate::folir::{FolFormula, FolTerm, Problem};

use FolFormula as F;

/// Label carried by the equality axioms added during clausification.
pub const EQUALITY_LABEL: &str = "$equality";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    /// An `Atom` or an `Eq`.
    pub atom: FolFormula,
}

impl Literal {
    pub fn formula(&self) -> FolFormula {
        if self.positive {
            self.atom.clone()
        } else {
            F::not(self.atom.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub origin_label: String,
}

impl Clause {
    /// Universal closure of the disjunction of the literals.
    pub fn formula(&self) -> FolFormula {
        let body = F::disj(self.literals.iter().map(Literal::formula).collect());
        let fv = body.free_vars();
        F::forall_many(&fv, body)
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }
}

struct Namer {
    next_var: usize,
    next_skolem: usize,
    taken: HashSet<String>,
}

impl Namer {
    fn var(&mut self) -> String {
        self.next_var += 1;
        format!("#v{}", self.next_var)
    }

    fn skolem(&mut self) -> String {
        loop {
            self.next_skolem += 1;
            let s = format!("sk{}", self.next_skolem);
            if self.taken.insert(s.clone()) {
                return s;
            }
        }
    }
}

/// Negation normal form with bound variables renamed apart; `→` and `↔`
/// are expanded.
fn nnf(f: &FolFormula, positive: bool, nm: &mut Namer) -> FolFormula {
    match f {
        F::Atom(..) | F::Eq(..) => {
            if positive {
                f.clone()
            } else {
                F::not(f.clone())
            }
        }
        F::Top => {
            if positive {
                F::Top
            } else {
                F::Bottom
            }
        }
        F::Bottom => {
            if positive {
                F::Bottom
            } else {
                F::Top
            }
        }
        F::Not(a) => nnf(a, !positive, nm),
        F::And(a, b) | F::Or(a, b) => {
            let (a, b) = (nnf(a, positive, nm), nnf(b, positive, nm));
            if matches!(f, F::And(..)) == positive {
                F::and(a, b)
            } else {
                F::or(a, b)
            }
        }
        F::Implies(a, b) => {
            if positive {
                F::or(nnf(a, false, nm), nnf(b, true, nm))
            } else {
                F::and(nnf(a, true, nm), nnf(b, false, nm))
            }
        }
        F::Iff(a, b) => {
            if positive {
                F::and(
                    F::or(nnf(a, false, nm), nnf(b, true, nm)),
                    F::or(nnf(a, true, nm), nnf(b, false, nm)),
                )
            } else {
                F::or(
                    F::and(nnf(a, true, nm), nnf(b, false, nm)),
                    F::and(nnf(a, false, nm), nnf(b, true, nm)),
                )
            }
        }
        F::Forall(x, a) | F::Exists(x, a) => {
            let y = nm.var();
            let body = nnf(&a.subst(x, &FolTerm::var(y.clone())), positive, nm);
            if matches!(f, F::Forall(..)) == positive {
                F::forall(y, body)
            } else {
                F::exists(y, body)
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Q {
    All,
    Ex,
}

/// Pulls quantifiers of an NNF formula with distinct bound names to the front.
fn prenex(f: FolFormula, prefix: &mut Vec<(Q, String)>) -> FolFormula {
    match f {
        F::Forall(x, a) => {
            prefix.push((Q::All, x));
            prenex(*a, prefix)
        }
        F::Exists(x, a) => {
            prefix.push((Q::Ex, x));
            prenex(*a, prefix)
        }
        F::And(a, b) => {
            let a = prenex(*a, prefix);
            F::and(a, prenex(*b, prefix))
        }
        F::Or(a, b) => {
            let a = prenex(*a, prefix);
            F::or(a, prenex(*b, prefix))
        }
        other => other,
    }
}

fn skolemize(prefix: &[(Q, String)], mut matrix: FolFormula, nm: &mut Namer) -> FolFormula {
    let mut universals: Vec<FolTerm> = Vec::new();
    for (q, x) in prefix {
        match q {
            Q::All => universals.push(FolTerm::var(x.clone())),
            Q::Ex => {
                let sk = FolTerm::fun(nm.skolem(), universals.clone());
                matrix = matrix.subst(x, &sk);
            }
        }
    }
    matrix
}

fn cnf(f: &FolFormula) -> Vec<Vec<Literal>> {
    match f {
        F::Top => vec![],
        F::Bottom => vec![vec![]],
        F::Atom(..) | F::Eq(..) => vec![vec![Literal {
            positive: true,
            atom: f.clone(),
        }]],
        F::Not(a) => vec![vec![Literal {
            positive: false,
            atom: a.as_ref().clone(),
        }]],
        F::And(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        F::Or(a, b) => {
            let (ca, cb) = (cnf(a), cnf(b));
            let mut out = Vec::with_capacity(ca.len() * cb.len());
            for x in &ca {
                for y in &cb {
                    out.push(x.iter().chain(y).cloned().collect());
                }
            }
            out
        }
        _ => unreachable!("quantifier or connective left in matrix"),
    }
}

fn is_tautology(lits: &[Literal]) -> bool {
    lits.iter().any(|l| {
        (l.positive && matches!(&l.atom, F::Eq(a, b) if a == b))
            || lits.iter().any(|m| m.positive != l.positive && m.atom == l.atom)
    })
}

fn finish(lits: Vec<Literal>, label: &str, out: &mut Vec<Clause>) {
    let mut uniq: Vec<Literal> = Vec::with_capacity(lits.len());
    for l in lits {
        if !uniq.contains(&l) {
            uniq.push(l);
        }
    }
    if label != EQUALITY_LABEL && is_tautology(&uniq) {
        return;
    }
    let body = F::disj(uniq.iter().map(Literal::formula).collect());
    let index = out.len();
    let mut renamed = uniq;
    for (k, v) in body.free_vars().iter().enumerate() {
        let nv = FolTerm::var(format!("X{index}_{k}"));
        renamed = renamed
            .into_iter()
            .map(|l| Literal {
                positive: l.positive,
                atom: l.atom.subst(v, &nv),
            })
            .collect();
    }
    out.push(Clause {
        literals: renamed,
        origin_label: label.to_string(),
    });
}

fn equality_axioms(clauses: &[Clause]) -> Vec<Vec<Literal>> {
    let mut funs: BTreeMap<String, usize> = BTreeMap::new();
    let mut preds: BTreeMap<String, usize> = BTreeMap::new();
    for c in clauses {
        for l in &c.literals {
            funs.extend(l.atom.functions());
            preds.extend(l.atom.predicates());
        }
    }
    let (x, y, z) = (FolTerm::var("X"), FolTerm::var("Y"), FolTerm::var("Z"));
    let pos = |a: FolFormula| Literal {
        positive: true,
        atom: a,
    };
    let neg = |a: FolFormula| Literal {
        positive: false,
        atom: a,
    };
    let mut out = vec![
        vec![pos(F::eq(x.clone(), x.clone()))],
        vec![neg(F::eq(x.clone(), y.clone())), pos(F::eq(y.clone(), x.clone()))],
        vec![
            neg(F::eq(x.clone(), y.clone())),
            neg(F::eq(y.clone(), z.clone())),
            pos(F::eq(x.clone(), z.clone())),
        ],
    ];
    let args = |n: usize, i: usize, at: &FolTerm| -> Vec<FolTerm> {
        (0..n)
            .map(|j| {
                if j == i {
                    at.clone()
                } else {
                    FolTerm::var(format!("A{j}"))
                }
            })
            .collect()
    };
    for (f, n) in &funs {
        for i in 0..*n {
            out.push(vec![
                neg(F::eq(x.clone(), y.clone())),
                pos(F::eq(
                    FolTerm::fun(f.clone(), args(*n, i, &x)),
                    FolTerm::fun(f.clone(), args(*n, i, &y)),
                )),
            ]);
        }
    }
    for (p, n) in &preds {
        for i in 0..*n {
            out.push(vec![
                neg(F::eq(x.clone(), y.clone())),
                neg(F::atom(p.clone(), args(*n, i, &x))),
                pos(F::atom(p.clone(), args(*n, i, &y))),
            ]);
        }
    }
    out
}

/// Clause form of the axioms and the negated conjecture. Each input
/// formula goes through NNF, prenexing, Skolemization and distribution.
/// When equality occurs, reflexivity, symmetry, transitivity and
/// per-argument congruence clauses for every symbol are added.
pub fn clausify(p: &Problem) -> Vec<Clause> {
    let mut taken: HashSet<String> = HashSet::new();
    for ax in p.all() {
        taken.extend(ax.formula.functions().into_iter().map(|(f, _)| f));
    }
    let mut nm = Namer {
        next_var: 0,
        next_skolem: 0,
        taken,
    };
    let mut out = Vec::new();
    let inputs = p
        .axioms
        .iter()
        .map(|a| (a.label.as_str(), a.formula.clone()))
        .chain(std::iter::once((
            p.conjecture.label.as_str(),
            F::not(p.conjecture.formula.clone()),
        )));
    for (label, f) in inputs {
        let fv = f.free_vars();
        let closed = F::forall_many(&fv, f);
        let n = nnf(&closed, true, &mut nm);
        let mut prefix = Vec::new();
        let matrix = prenex(n, &mut prefix);
        let matrix = skolemize(&prefix, matrix, &mut nm);
        for lits in cnf(&matrix) {
            finish(lits, label, &mut out);
        }
    }
    if out
        .iter()
        .any(|c| c.literals.iter().any(|l| matches!(l.atom, F::Eq(..))))
    {
        for lits in equality_axioms(&out) {
            finish(lits, EQUALITY_LABEL, &mut out);
        }
    }
    out
}
