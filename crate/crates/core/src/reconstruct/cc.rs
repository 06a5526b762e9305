use std::collections::HashMap;

use crate::folir::{FolFormula, FolTerm};

/// What `congruence_close` is asked to decide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CcQuery {
    Terms(FolTerm, FolTerm),
    /// Two atoms with the same predicate whose arguments must be pairwise
    /// congruent; equations compare both sides, in either orientation.
    Atoms(FolFormula, FolFormula),
}

/// Whether the query follows from the ground equations by reflexivity,
/// symmetry, transitivity and congruence.
pub fn congruence_close(equations: &[(FolTerm, FolTerm)], query: &CcQuery) -> bool {
    let mut cc = Congruence::new();
    for (l, r) in equations {
        cc.merge_terms(l, r);
    }
    cc.holds(query)
}

/// Incremental union-find with congruence propagation over hash-consed
/// terms. Variables are treated as constants.
#[derive(Clone, Debug, Default)]
pub struct Congruence {
    nodes: Vec<(Sym, Vec<usize>)>,
    index: HashMap<(Sym, Vec<usize>), usize>,
    symbols: HashMap<(bool, String), u32>,
    parent: Vec<usize>,
    uses: Vec<Vec<usize>>,
    signatures: HashMap<(Sym, Vec<usize>), usize>,
}

type Sym = u32;

impl Congruence {
    pub fn new() -> Self {
        Self::default()
    }

    fn symbol(&mut self, var: bool, name: &str) -> Sym {
        let next = self.symbols.len() as u32;
        *self.symbols.entry((var, name.to_string())).or_insert(next)
    }

    pub fn add(&mut self, t: &FolTerm) -> usize {
        let (sym, args) = match t {
            FolTerm::Var(x) => (self.symbol(true, x), Vec::new()),
            FolTerm::Fun(f, args) => {
                let ids = args.iter().map(|a| self.add(a)).collect::<Vec<_>>();
                (self.symbol(false, f), ids)
            }
        };
        if let Some(id) = self.index.get(&(sym, args.clone())) {
            return *id;
        }
        let id = self.nodes.len();
        self.nodes.push((sym, args.clone()));
        self.index.insert((sym, args.clone()), id);
        self.parent.push(id);
        self.uses.push(Vec::new());
        for a in &args {
            let ra = self.find(*a);
            self.uses[ra].push(id);
        }
        let sig = self.signature(id);
        match self.signatures.get(&sig) {
            Some(&other) => self.union(id, other),
            None => {
                self.signatures.insert(sig, id);
            }
        }
        id
    }

    fn signature(&mut self, id: usize) -> (Sym, Vec<usize>) {
        let (sym, args) = self.nodes[id].clone();
        (sym, args.into_iter().map(|a| self.find(a)).collect())
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (mut ra, mut rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            if self.uses[ra].len() > self.uses[rb].len() {
                std::mem::swap(&mut ra, &mut rb);
            }
            let moved = std::mem::take(&mut self.uses[ra]);
            self.parent[ra] = rb;
            for u in moved {
                let sig = self.signature(u);
                match self.signatures.get(&sig).copied() {
                    Some(other) => {
                        if self.find(other) != self.find(u) {
                            pending.push((u, other));
                        }
                    }
                    None => {
                        self.signatures.insert(sig, u);
                    }
                }
                self.uses[rb].push(u);
            }
        }
    }

    pub fn merge_terms(&mut self, l: &FolTerm, r: &FolTerm) {
        let (a, b) = (self.add(l), self.add(r));
        self.union(a, b);
    }

    pub fn equal(&mut self, l: &FolTerm, r: &FolTerm) -> bool {
        let (a, b) = (self.add(l), self.add(r));
        self.find(a) == self.find(b)
    }

    fn args_equal(&mut self, xs: &[FolTerm], ys: &[FolTerm]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.equal(x, y))
    }

    /// Atoms equal up to the current congruence.
    pub fn atoms_equal(&mut self, a: &FolFormula, b: &FolFormula) -> bool {
        match (a, b) {
            (FolFormula::Atom(p, xs), FolFormula::Atom(q, ys)) => p == q && self.args_equal(xs, ys),
            (FolFormula::Eq(l1, r1), FolFormula::Eq(l2, r2)) => {
                (self.equal(l1, l2) && self.equal(r1, r2)) || (self.equal(l1, r2) && self.equal(r1, l2))
            }
            _ => false,
        }
    }

    pub fn holds(&mut self, query: &CcQuery) -> bool {
        match query {
            CcQuery::Terms(l, r) => self.equal(l, r),
            CcQuery::Atoms(a, b) => self.atoms_equal(a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> FolTerm {
        FolTerm::cnst(n)
    }

    fn f(n: &str, a: FolTerm) -> FolTerm {
        FolTerm::fun(n, vec![a])
    }

    #[test]
    fn one_congruence_step() {
        let eqs = vec![(c("a"), c("b")), (f("f", c("a")), c("c"))];
        assert!(congruence_close(&eqs, &CcQuery::Terms(f("f", c("b")), c("c"))));
    }

    #[test]
    fn reflexivity_without_equations() {
        assert!(congruence_close(&[], &CcQuery::Terms(c("a"), c("a"))));
    }

    #[test]
    fn different_heads_stay_apart() {
        let eqs = vec![(c("a"), c("b"))];
        assert!(!congruence_close(&eqs, &CcQuery::Terms(f("f", c("a")), f("g", c("a")))));
    }

    #[test]
    fn late_terms_join_existing_classes() {
        let mut cc = Congruence::new();
        cc.merge_terms(&c("a"), &c("b"));
        cc.merge_terms(&f("g", c("b")), &c("d"));
        assert!(cc.equal(&f("g", f("g", c("a"))), &f("g", c("d"))));
        assert!(!cc.equal(&c("a"), &c("d")));
    }

    #[test]
    fn atoms_up_to_congruence() {
        let eqs = vec![(c("a"), c("b"))];
        let p = |t| FolFormula::atom("p", vec![t]);
        assert!(congruence_close(&eqs, &CcQuery::Atoms(p(c("a")), p(c("b")))));
        let e = CcQuery::Atoms(FolFormula::eq(c("a"), c("c")), FolFormula::eq(c("c"), c("b")));
        assert!(congruence_close(&eqs, &e));
    }
}
