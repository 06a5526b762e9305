//! Decision procedure for intuitionistic propositional logic: Dyckhoff's
//! contraction-free calculus G4ip over hash-consed formulas, with memoized
//! sequents.

use std::collections::{BTreeSet, HashMap};

use crate::folir::FolFormula;

use super::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Id(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Bot,
    And(Id, Id),
    Or(Id, Id),
    Imp(Id, Id),
}

const MEMO_LIMIT: usize = 2_000_000;

/// Reusable decider; keeps its formula table between calls.
#[derive(Debug, Default)]
pub struct IpcDecider {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    atoms: HashMap<String, u32>,
    memo: HashMap<(Vec<Id>, Id), bool>,
}

impl IpcDecider {
    pub fn new() -> Self {
        Self::default()
    }

    fn mk(&mut self, n: Node) -> Id {
        if let Some(id) = self.index.get(&n) {
            return *id;
        }
        let id = Id(self.nodes.len() as u32);
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }

    fn node(&self, id: Id) -> Node {
        self.nodes[id.0 as usize]
    }

    fn intern(&mut self, f: &FolFormula) -> Result<Id, OracleError> {
        use FolFormula as F;
        Ok(match f {
            F::Atom(p, args) if args.is_empty() => {
                let next = self.atoms.len() as u32;
                let a = *self.atoms.entry(p.clone()).or_insert(next);
                self.mk(Node::Atom(a))
            }
            F::Bottom => self.mk(Node::Bot),
            F::Top => {
                let b = self.mk(Node::Bot);
                self.mk(Node::Imp(b, b))
            }
            F::Not(a) => {
                let a = self.intern(a)?;
                let b = self.mk(Node::Bot);
                self.mk(Node::Imp(a, b))
            }
            F::And(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                self.mk(Node::And(a, b))
            }
            F::Or(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                self.mk(Node::Or(a, b))
            }
            F::Implies(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                self.mk(Node::Imp(a, b))
            }
            F::Iff(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                let l = self.mk(Node::Imp(a, b));
                let r = self.mk(Node::Imp(b, a));
                self.mk(Node::And(l, r))
            }
            F::Atom(..) | F::Eq(..) | F::Forall(..) | F::Exists(..) => {
                return Err(OracleError::NotPropositional(f.to_string()))
            }
        })
    }

    /// Intuitionistic validity of a propositional formula.
    pub fn decide(&mut self, f: &FolFormula) -> Result<bool, OracleError> {
        let goal = self.intern(f)?;
        if self.memo.len() > MEMO_LIMIT {
            self.memo.clear();
        }
        Ok(self.prove(BTreeSet::new(), goal))
    }

    fn with(ctx: &BTreeSet<Id>, remove: Id, add: &[Id]) -> BTreeSet<Id> {
        let mut c = ctx.clone();
        c.remove(&remove);
        c.extend(add.iter().copied());
        c
    }

    fn prove(&mut self, ctx: BTreeSet<Id>, goal: Id) -> bool {
        let key = (ctx.iter().copied().collect::<Vec<_>>(), goal);
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = self.search(&ctx, goal);
        self.memo.insert(key, r);
        r
    }

    fn search(&mut self, ctx: &BTreeSet<Id>, goal: Id) -> bool {
        // invertible left rules
        for &h in ctx {
            match self.node(h) {
                Node::Bot => return true,
                Node::And(a, b) => return self.prove(Self::with(ctx, h, &[a, b]), goal),
                Node::Or(a, b) => {
                    return self.prove(Self::with(ctx, h, &[a]), goal) && self.prove(Self::with(ctx, h, &[b]), goal)
                }
                Node::Imp(a, b) => match self.node(a) {
                    Node::Atom(_) if ctx.contains(&a) => return self.prove(Self::with(ctx, h, &[b]), goal),
                    Node::Bot => return self.prove(Self::with(ctx, h, &[]), goal),
                    Node::And(c, d) => {
                        let db = self.mk(Node::Imp(d, b));
                        let cdb = self.mk(Node::Imp(c, db));
                        return self.prove(Self::with(ctx, h, &[cdb]), goal);
                    }
                    Node::Or(c, d) => {
                        let cb = self.mk(Node::Imp(c, b));
                        let db = self.mk(Node::Imp(d, b));
                        return self.prove(Self::with(ctx, h, &[cb, db]), goal);
                    }
                    _ => {}
                },
                Node::Atom(_) => {}
            }
        }
        if ctx.contains(&goal) {
            return true;
        }
        match self.node(goal) {
            Node::And(a, b) => return self.prove(ctx.clone(), a) && self.prove(ctx.clone(), b),
            Node::Imp(a, b) => {
                let mut c = ctx.clone();
                c.insert(a);
                return self.prove(c, b);
            }
            Node::Or(a, b) => {
                if self.prove(ctx.clone(), a) || self.prove(ctx.clone(), b) {
                    return true;
                }
            }
            Node::Atom(_) | Node::Bot => {}
        }
        // (C → D) → B
        let candidates: Vec<Id> = ctx.iter().copied().collect();
        for h in candidates {
            if let Node::Imp(a, b) = self.node(h) {
                if let Node::Imp(c, d) = self.node(a) {
                    let db = self.mk(Node::Imp(d, b));
                    if self.prove(Self::with(ctx, h, &[db, c]), d) && self.prove(Self::with(ctx, h, &[b]), goal) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Intuitionistic validity of a propositional formula.
pub fn ipc_decide(f: &FolFormula) -> Result<bool, OracleError> {
    IpcDecider::new().decide(f)
}

/// Truth-table validity.
pub fn classically_valid(f: &FolFormula) -> Result<bool, OracleError> {
    let mut atoms: Vec<String> = Vec::new();
    let mut bad = None;
    f.visit(&mut |g| match g {
        FolFormula::Atom(p, args) if args.is_empty() => {
            if !atoms.contains(p) {
                atoms.push(p.clone());
            }
        }
        FolFormula::Atom(..) | FolFormula::Eq(..) | FolFormula::Forall(..) | FolFormula::Exists(..) => {
            bad = Some(g.to_string())
        }
        _ => {}
    });
    if let Some(b) = bad {
        return Err(OracleError::NotPropositional(b));
    }
    fn ev(f: &FolFormula, atoms: &[String], v: u32) -> bool {
        use FolFormula as F;
        match f {
            F::Atom(p, _) => v >> atoms.iter().position(|a| a == p).unwrap() & 1 == 1,
            F::Top => true,
            F::Bottom => false,
            F::Not(a) => !ev(a, atoms, v),
            F::And(a, b) => ev(a, atoms, v) && ev(b, atoms, v),
            F::Or(a, b) => ev(a, atoms, v) || ev(b, atoms, v),
            F::Implies(a, b) => !ev(a, atoms, v) || ev(b, atoms, v),
            F::Iff(a, b) => ev(a, atoms, v) == ev(b, atoms, v),
            _ => unreachable!("checked propositional"),
        }
    }
    Ok((0..1u32 << atoms.len()).all(|v| ev(f, &atoms, v)))
}

fn atom(n: &str) -> FolFormula {
    FolFormula::atom(n, vec![])
}

/// `((A → B) → A) → A`
pub fn peirce() -> FolFormula {
    let (a, b) = (atom("A"), atom("B"));
    FolFormula::implies(FolFormula::implies(FolFormula::implies(a.clone(), b), a.clone()), a)
}

/// Classical tautologies that are not intuitionistically valid.
pub fn classical_only_formulas() -> Vec<FolFormula> {
    use FolFormula as F;
    let (a, b) = (atom("A"), atom("B"));
    let na = F::not(a.clone());
    let nb = F::not(b.clone());
    vec![
        F::implies(F::not(na.clone()), a.clone()),
        F::or(a.clone(), na.clone()),
        F::implies(F::implies(na.clone(), nb.clone()), F::implies(b.clone(), a.clone())),
        F::or(F::implies(a.clone(), b.clone()), F::implies(b.clone(), a.clone())),
        F::implies(F::not(F::and(a.clone(), b.clone())), F::or(na.clone(), nb.clone())),
        F::implies(F::implies(na.clone(), b.clone()), F::or(a.clone(), b.clone())),
        F::implies(
            F::implies(F::implies(a.clone(), b.clone()), b.clone()),
            F::or(a.clone(), b.clone()),
        ),
        F::implies(F::implies(a.clone(), b.clone()), F::or(na.clone(), b.clone())),
        F::or(na.clone(), F::not(na.clone())),
        F::implies(F::not(F::implies(a.clone(), b.clone())), a.clone()),
    ]
}
