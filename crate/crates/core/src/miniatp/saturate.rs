//! Given-clause saturation with binary resolution and factoring.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::folir::{FolFormula, FolTerm};

use super::clausify::Clause;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    /// Generated clauses kept, across the whole run.
    pub max_clauses: usize,
    pub max_seconds: f64,
    /// Heavier clauses are discarded; the run then cannot end in `Saturated`.
    pub max_weight: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_clauses: 200_000,
            max_seconds: 30.0,
            max_weight: 48,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResourceKind {
    Time,
    Clauses,
    Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Saturation {
    /// Origin labels of the input clauses the refutation depends on.
    Proof(Vec<String>),
    Saturated,
    ResourceOut(ResourceKind),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tm {
    V(u32),
    F(u32, Rc<[Tm]>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Lit {
    pos: bool,
    pred: u32,
    args: Vec<Tm>,
}

#[derive(Clone, Debug)]
struct Cl {
    lits: Vec<Lit>,
    labels: Vec<u32>,
    weight: usize,
    nvars: u32,
    mask: u128,
    /// Only this literal may be resolved upon.
    sel: Option<usize>,
}

const EQ: u32 = 0;

#[derive(Default)]
struct Symbols {
    ids: HashMap<(String, usize), u32>,
    labels: Vec<String>,
    label_ids: HashMap<String, u32>,
}

impl Symbols {
    fn sym(&mut self, name: &str, arity: usize) -> u32 {
        let next = self.ids.len() as u32 + 1;
        *self.ids.entry((name.to_string(), arity)).or_insert(next)
    }

    fn label(&mut self, l: &str) -> u32 {
        if let Some(i) = self.label_ids.get(l) {
            return *i;
        }
        let i = self.labels.len() as u32;
        self.labels.push(l.to_string());
        self.label_ids.insert(l.to_string(), i);
        i
    }
}

fn term_in(t: &FolTerm, syms: &mut Symbols, vars: &mut Vec<String>) -> Tm {
    match t {
        FolTerm::Var(x) => {
            let i = vars.iter().position(|v| v == x).unwrap_or_else(|| {
                vars.push(x.clone());
                vars.len() - 1
            });
            Tm::V(i as u32)
        }
        FolTerm::Fun(f, args) => {
            let id = syms.sym(f, args.len());
            Tm::F(id, args.iter().map(|a| term_in(a, syms, vars)).collect())
        }
    }
}

fn tm_weight(t: &Tm) -> usize {
    match t {
        Tm::V(_) => 1,
        Tm::F(_, args) => 1 + args.iter().map(tm_weight).sum::<usize>(),
    }
}

fn bit(h: u64) -> u128 {
    1u128 << (h.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 57)
}

/// Feature bits: sign and predicate, plus the head symbol of each of the
/// first two arguments when it is not a variable. Subsumption requires the
/// subsumer's bits to be a subset.
fn lit_key(l: &Lit) -> u128 {
    let base = (l.pred as u64) << 1 | l.pos as u64;
    let mut m = bit(base);
    for (i, a) in l.args.iter().take(2).enumerate() {
        if let Tm::F(f, _) = a {
            m |= bit(base << 24 ^ (*f as u64) << 2 ^ (i as u64 + 1));
        }
    }
    m
}

/// Renumbers variables by first occurrence, removes duplicate literals and
/// computes the derived fields; `None` for tautologies.
fn normalize(lits: Vec<Lit>, labels: Vec<u32>) -> Option<Cl> {
    normalize_with(lits, labels, true)
}

fn normalize_with(lits: Vec<Lit>, labels: Vec<u32>, drop_reflexive: bool) -> Option<Cl> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    fn ren(t: &Tm, map: &mut HashMap<u32, u32>) -> Tm {
        match t {
            Tm::V(v) => {
                let n = map.len() as u32;
                Tm::V(*map.entry(*v).or_insert(n))
            }
            Tm::F(f, args) => Tm::F(*f, args.iter().map(|a| ren(a, map)).collect()),
        }
    }
    let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
    for l in lits {
        let l = Lit {
            pos: l.pos,
            pred: l.pred,
            args: l.args.iter().map(|a| ren(a, &mut map)).collect(),
        };
        if drop_reflexive && l.pos && l.pred == EQ && l.args[0] == l.args[1] {
            return None;
        }
        if out
            .iter()
            .any(|m| m.pred == l.pred && m.args == l.args && m.pos != l.pos)
        {
            return None;
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    let weight = out
        .iter()
        .map(|l| 1 + l.args.iter().map(tm_weight).sum::<usize>())
        .sum();
    let mask = out.iter().fold(0, |m, l| m | lit_key(l));
    Some(Cl {
        lits: out,
        labels,
        weight,
        nvars: map.len() as u32,
        mask,
        sel: None,
    })
}

fn has_var(t: &Tm) -> bool {
    match t {
        Tm::V(_) => true,
        Tm::F(_, args) => args.iter().any(has_var),
    }
}

/// Ground negative literals first, then the heaviest negative literal.
fn select(c: &mut Cl) {
    c.sel = c
        .lits
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.pos)
        .max_by_key(|(i, l)| {
            let ground = !l.args.iter().any(has_var);
            let w: usize = l.args.iter().map(tm_weight).sum();
            (ground, w, Reverse(*i))
        })
        .map(|(i, _)| i);
}

fn eligible(c: &Cl, i: usize) -> bool {
    c.sel.is_none_or(|s| s == i)
}

type Subst = Vec<Option<Tm>>;

fn walk<'a>(t: &'a Tm, s: &'a Subst) -> &'a Tm {
    let mut t = t;
    while let Tm::V(v) = t {
        match &s[*v as usize] {
            Some(u) => t = u,
            None => break,
        }
    }
    t
}

fn occurs(v: u32, t: &Tm, s: &Subst) -> bool {
    match walk(t, s) {
        Tm::V(w) => *w == v,
        Tm::F(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn unify(a: &Tm, b: &Tm, s: &mut Subst) -> bool {
    let (a, b) = (walk(a, s).clone(), walk(b, s).clone());
    match (&a, &b) {
        (Tm::V(x), Tm::V(y)) if x == y => true,
        (Tm::V(x), t) | (t, Tm::V(x)) => {
            if occurs(*x, t, s) {
                return false;
            }
            s[*x as usize] = Some(t.clone());
            true
        }
        (Tm::F(f, xs), Tm::F(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| unify(x, y, s))
        }
    }
}

fn apply(t: &Tm, s: &Subst) -> Tm {
    if !has_var(t) {
        return t.clone();
    }
    match walk(t, s) {
        Tm::V(v) => Tm::V(*v),
        Tm::F(f, args) => Tm::F(*f, args.iter().map(|a| apply(a, s)).collect()),
    }
}

fn shift(t: &Tm, by: u32) -> Tm {
    match t {
        Tm::V(v) => Tm::V(v + by),
        Tm::F(f, args) => Tm::F(*f, args.iter().map(|a| shift(a, by)).collect()),
    }
}

fn apply_lit(l: &Lit, s: &Subst) -> Lit {
    Lit {
        pos: l.pos,
        pred: l.pred,
        args: l.args.iter().map(|a| apply(a, s)).collect(),
    }
}

fn merge_labels(a: &[u32], b: &[u32]) -> Vec<u32> {
    let set: BTreeSet<u32> = a.iter().chain(b).copied().collect();
    set.into_iter().collect()
}

/// One-way matching: binds variables of the pattern only.
fn match_tm(p: &Tm, t: &Tm, b: &mut [Option<Tm>]) -> bool {
    match p {
        Tm::V(v) => match &b[*v as usize] {
            Some(u) => u == t,
            None => {
                b[*v as usize] = Some(t.clone());
                true
            }
        },
        Tm::F(f, ps) => match t {
            Tm::F(g, ts) => f == g && ps.len() == ts.len() && ps.iter().zip(ts.iter()).all(|(p, t)| match_tm(p, t, b)),
            Tm::V(_) => false,
        },
    }
}

/// Whether `c` θ-subsumes `d`.
fn subsumes(c: &Cl, d: &Cl) -> bool {
    if c.lits.len() > d.lits.len() || c.mask & !d.mask != 0 {
        return false;
    }
    fn go(i: usize, c: &Cl, d: &Cl, b: &mut [Option<Tm>]) -> bool {
        if i == c.lits.len() {
            return true;
        }
        let l = &c.lits[i];
        for m in &d.lits {
            if m.pos != l.pos || m.pred != l.pred {
                continue;
            }
            let mut b2 = b.to_vec();
            if l.args.iter().zip(&m.args).all(|(p, t)| match_tm(p, t, &mut b2)) && go(i + 1, c, d, &mut b2) {
                return true;
            }
        }
        false
    }
    go(0, c, d, &mut vec![None; c.nvars as usize])
}

struct State {
    clauses: Vec<Cl>,
    active: Vec<usize>,
    dead: Vec<bool>,
    index: HashMap<(bool, u32), Vec<usize>>,
    by_weight: BinaryHeap<Reverse<(usize, usize)>>,
    by_age: std::collections::VecDeque<usize>,
    taken: Vec<bool>,
    dropped: bool,
}

impl State {
    fn push_passive(&mut self, c: Cl) -> usize {
        let id = self.clauses.len();
        self.by_weight.push(Reverse((c.weight, id)));
        self.by_age.push_back(id);
        self.clauses.push(c);
        self.dead.push(false);
        self.taken.push(false);
        id
    }

    fn pick(&mut self, by_age: bool) -> Option<usize> {
        loop {
            let id = if by_age {
                self.by_age.pop_front()
            } else {
                self.by_weight.pop().map(|Reverse((_, id))| id)
            };
            match id {
                None if by_age => return self.pick(false),
                None => return None,
                Some(id) if self.taken[id] => continue,
                Some(id) => {
                    self.taken[id] = true;
                    return Some(id);
                }
            }
        }
    }

    fn forward_subsumed(&self, c: &Cl) -> bool {
        self.active
            .iter()
            .any(|&a| !self.dead[a] && subsumes(&self.clauses[a], c))
    }
}

fn resolvents(g: &Cl, c: &Cl, out: &mut Vec<Cl>) {
    let off = g.nvars;
    for (i, l) in g.lits.iter().enumerate() {
        if !eligible(g, i) {
            continue;
        }
        for (j, m) in c.lits.iter().enumerate() {
            if l.pos == m.pos || l.pred != m.pred || !eligible(c, j) {
                continue;
            }
            let mut s: Subst = vec![None; (g.nvars + c.nvars) as usize];
            let ok = l
                .args
                .iter()
                .zip(&m.args)
                .all(|(a, b)| unify(a, &shift(b, off), &mut s));
            if !ok {
                continue;
            }
            let mut lits = Vec::with_capacity(g.lits.len() + c.lits.len() - 2);
            for (k, x) in g.lits.iter().enumerate() {
                if k != i {
                    lits.push(apply_lit(x, &s));
                }
            }
            for (k, x) in c.lits.iter().enumerate() {
                if k != j {
                    let shifted = Lit {
                        pos: x.pos,
                        pred: x.pred,
                        args: x.args.iter().map(|a| shift(a, off)).collect(),
                    };
                    lits.push(apply_lit(&shifted, &s));
                }
            }
            if let Some(r) = normalize(lits, merge_labels(&g.labels, &c.labels)) {
                out.push(r);
            }
        }
    }
}

fn factors(g: &Cl, out: &mut Vec<Cl>) {
    for i in 0..g.lits.len() {
        for j in i + 1..g.lits.len() {
            let (l, m) = (&g.lits[i], &g.lits[j]);
            if l.pos != m.pos || l.pred != m.pred {
                continue;
            }
            let mut s: Subst = vec![None; g.nvars as usize];
            if !l.args.iter().zip(&m.args).all(|(a, b)| unify(a, b, &mut s)) {
                continue;
            }
            let lits = g
                .lits
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, x)| apply_lit(x, &s))
                .collect();
            if let Some(f) = normalize(lits, g.labels.clone()) {
                out.push(f);
            }
        }
    }
}

const AGE_EVERY: usize = 5;

impl State {
    fn activate(&mut self, id: usize) {
        self.taken[id] = true;
        self.active.push(id);
        for l in &self.clauses[id].lits {
            self.index.entry((l.pos, l.pred)).or_default().push(id);
        }
    }
}

/// Refutation search. Selection alternates one oldest clause with four
/// lightest (symbol count); forward and backward subsumption and tautology
/// deletion keep the active set small.
pub fn saturate(clauses: &[Clause], limits: &Limits) -> Saturation {
    run(clauses, limits, None, Instant::now())
}

/// [`saturate`] restricted first to inferences involving at least one
/// clause descending from the clauses labeled `support`. If that phase runs
/// out of clauses, the unrestricted search takes over for the remaining
/// time, so `Saturated` keeps its meaning.
pub fn saturate_with_support(clauses: &[Clause], limits: &Limits, support: &str) -> Saturation {
    let start = Instant::now();
    match run(clauses, limits, Some(support), start) {
        Saturation::Saturated | Saturation::ResourceOut(ResourceKind::Weight) => run(clauses, limits, None, start),
        other => other,
    }
}

fn run(clauses: &[Clause], limits: &Limits, support: Option<&str>, start: Instant) -> Saturation {
    let deadline = Duration::from_secs_f64(limits.max_seconds.max(0.0));
    if start.elapsed() >= deadline {
        return Saturation::ResourceOut(ResourceKind::Time);
    }
    let mut syms = Symbols::default();
    syms.ids.insert(("=".into(), 2), EQ);
    let mut st = State {
        clauses: Vec::new(),
        active: Vec::new(),
        dead: Vec::new(),
        index: HashMap::new(),
        by_weight: BinaryHeap::new(),
        by_age: Default::default(),
        taken: Vec::new(),
        dropped: false,
    };
    let proof = |c: &Cl, syms: &Symbols| {
        let mut ls: Vec<String> = c.labels.iter().map(|i| syms.labels[*i as usize].clone()).collect();
        ls.sort();
        Saturation::Proof(ls)
    };
    for c in clauses {
        let mut vars = Vec::new();
        let lits = c
            .literals
            .iter()
            .map(|l| match &l.atom {
                FolFormula::Eq(a, b) => Lit {
                    pos: l.positive,
                    pred: EQ,
                    args: vec![term_in(a, &mut syms, &mut vars), term_in(b, &mut syms, &mut vars)],
                },
                FolFormula::Atom(p, args) => Lit {
                    pos: l.positive,
                    pred: syms.sym(p, args.len()),
                    args: args.iter().map(|a| term_in(a, &mut syms, &mut vars)).collect(),
                },
                other => panic!("non-atomic literal {other}"),
            })
            .collect();
        let label = syms.label(&c.origin_label);
        if let Some(cl) = normalize_with(lits, vec![label], false) {
            if cl.lits.is_empty() {
                return proof(&cl, &syms);
            }
            let mut cl = cl;
            match support {
                Some(s) if s != c.origin_label => {
                    let id = st.push_passive(cl);
                    st.activate(id);
                }
                Some(_) => {
                    select(&mut cl);
                    st.push_passive(cl);
                }
                None => {
                    st.push_passive(cl);
                }
            }
        }
    }

    let mut picks = 0usize;
    let mut buf = Vec::new();
    loop {
        if picks.is_multiple_of(16) && start.elapsed() >= deadline {
            return Saturation::ResourceOut(ResourceKind::Time);
        }
        let Some(gid) = st.pick(picks.is_multiple_of(AGE_EVERY)) else {
            return if st.dropped {
                Saturation::ResourceOut(ResourceKind::Weight)
            } else {
                Saturation::Saturated
            };
        };
        picks += 1;
        let given = st.clauses[gid].clone();
        if st.forward_subsumed(&given) {
            continue;
        }
        for &a in &st.active {
            let keeps_freedom = given.sel.is_some() && st.clauses[a].sel.is_none();
            if !st.dead[a] && !keeps_freedom && subsumes(&given, &st.clauses[a]) {
                st.dead[a] = true;
            }
        }
        st.active.retain(|a| !st.dead[*a]);
        st.activate(gid);

        buf.clear();
        factors(&given, &mut buf);
        let mut partners: Vec<usize> = Vec::new();
        for l in &given.lits {
            if let Some(ids) = st.index.get(&(!l.pos, l.pred)) {
                partners.extend(ids.iter().copied().filter(|i| !st.dead[*i]));
            }
        }
        partners.sort_unstable();
        partners.dedup();
        for p in partners {
            let other = &st.clauses[p];
            resolvents(&given, other, &mut buf);
        }
        for r in buf.drain(..) {
            if r.lits.is_empty() {
                return proof(&r, &syms);
            }
            if r.weight > limits.max_weight {
                st.dropped = true;
                continue;
            }
            let mut r = r;
            if support.is_some() {
                select(&mut r);
            }
            st.push_passive(r);
            if st.clauses.len() > limits.max_clauses {
                return Saturation::ResourceOut(ResourceKind::Clauses);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miniatp::clausify::Literal;

    fn lit(pos: bool, p: &str, args: Vec<FolTerm>) -> Literal {
        Literal {
            positive: pos,
            atom: FolFormula::atom(p, args),
        }
    }

    fn cl(label: &str, lits: Vec<Literal>) -> Clause {
        Clause {
            literals: lits,
            origin_label: label.into(),
        }
    }

    #[test]
    fn one_step_refutation() {
        let c = FolTerm::cnst("c");
        let r = saturate(
            &[
                cl("a1", vec![lit(true, "p", vec![c.clone()])]),
                cl("goal", vec![lit(false, "p", vec![c])]),
            ],
            &Limits::default(),
        );
        assert_eq!(r, Saturation::Proof(vec!["a1".into(), "goal".into()]));
    }

    #[test]
    fn two_step_refutation() {
        let (c, x) = (FolTerm::cnst("c"), FolTerm::var("X"));
        let r = saturate(
            &[
                cl("a1", vec![lit(false, "p", vec![x.clone()]), lit(true, "q", vec![x])]),
                cl("a2", vec![lit(true, "p", vec![c.clone()])]),
                cl("goal", vec![lit(false, "q", vec![c])]),
            ],
            &Limits::default(),
        );
        assert_eq!(r, Saturation::Proof(vec!["a1".into(), "a2".into(), "goal".into()]));
    }

    #[test]
    fn saturates_satisfiable_set() {
        let r = saturate(
            &[
                cl("a1", vec![lit(true, "p", vec![FolTerm::cnst("c")])]),
                cl("goal", vec![lit(true, "q", vec![FolTerm::cnst("d")])]),
            ],
            &Limits::default(),
        );
        assert_eq!(r, Saturation::Saturated);
    }

    #[test]
    fn factoring_is_needed() {
        // {p(X), p(Y)} and {¬p(U), ¬p(V)}
        let v = |n: &str| FolTerm::var(n);
        let r = saturate(
            &[
                cl("a", vec![lit(true, "p", vec![v("X")]), lit(true, "p", vec![v("Y")])]),
                cl("b", vec![lit(false, "p", vec![v("U")]), lit(false, "p", vec![v("V")])]),
            ],
            &Limits::default(),
        );
        assert_eq!(r, Saturation::Proof(vec!["a".into(), "b".into()]));
    }

    #[test]
    fn zero_time_is_resource_out() {
        let limits = Limits {
            max_seconds: 0.0,
            ..Limits::default()
        };
        assert_eq!(saturate(&[], &limits), Saturation::ResourceOut(ResourceKind::Time));
    }

    #[test]
    fn subsumption() {
        let mut syms = Symbols::default();
        let mut vars = Vec::new();
        let px = Lit {
            pos: true,
            pred: 1,
            args: vec![term_in(&FolTerm::var("X"), &mut syms, &mut vars)],
        };
        let pc = Lit {
            pos: true,
            pred: 1,
            args: vec![Tm::F(9, Rc::from(Vec::new()))],
        };
        let q = Lit {
            pos: false,
            pred: 2,
            args: vec![],
        };
        let general = normalize(vec![px], vec![]).unwrap();
        let specific = normalize(vec![pc.clone(), q], vec![]).unwrap();
        assert!(subsumes(&general, &specific));
        assert!(!subsumes(&specific, &general));
        assert!(normalize(vec![pc.clone(), Lit { pos: false, ..pc }], vec![]).is_none());
    }
}
