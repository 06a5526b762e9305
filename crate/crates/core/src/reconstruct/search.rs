use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::folir::{FolFormula, FolTerm};

use super::cc::Congruence;
use super::formula::{
    atoms, canonical_key, eigen, ground_atoms, ground_subterms, instantiate, is_ground_propositional, match_atom,
    match_term, max_eigen, normalize, strip,
};
use super::rewrite::rewrite_sequent;
use super::trace::{ProofTrace, Rule};
use super::{Budget, Fail, FailReason, Sequent};

use FolFormula as F;

/// Instances tried per rule application.
const CANDIDATE_CAP: usize = 16;
/// Rewrite steps per rewrite pass.
const REWRITE_BOUND: usize = 8;
/// Stand-in term when the sequent has no ground terms at all.
const DEFAULT_TERM: &str = "#d";

#[derive(Clone)]
struct Node {
    hyps: Vec<FolFormula>,
    goal: FolFormula,
    next: u32,
}

impl Node {
    fn with_goal(&self, goal: FolFormula) -> Node {
        Node {
            hyps: self.hyps.clone(),
            goal,
            next: self.next,
        }
    }

    fn adding(&self, add: impl IntoIterator<Item = FolFormula>, goal: FolFormula) -> Node {
        let mut hyps = self.hyps.clone();
        for f in add {
            if !hyps.contains(&f) {
                hyps.push(f);
            }
        }
        Node {
            hyps,
            goal,
            next: self.next,
        }
    }

    fn replacing(&self, i: usize, add: impl IntoIterator<Item = FolFormula>) -> Node {
        let mut hyps = self.hyps.clone();
        hyps.remove(i);
        let mut n = Node {
            hyps,
            goal: self.goal.clone(),
            next: self.next,
        };
        for f in add {
            if !n.hyps.contains(&f) {
                n.hyps.push(f);
            }
        }
        n
    }

    fn fresh(&mut self) -> FolTerm {
        let e = eigen(self.next);
        self.next += 1;
        e
    }

    fn congruence(&self) -> Option<Congruence> {
        let mut cc: Option<Congruence> = None;
        for h in &self.hyps {
            if let F::Eq(l, r) = h {
                if l.is_ground() && r.is_ground() {
                    cc.get_or_insert_with(Congruence::new).merge_terms(l, r);
                }
            }
        }
        cc
    }
}

fn available(hyps: &[FolFormula], cc: &mut Option<Congruence>, a: &FolFormula) -> bool {
    if hyps.contains(a) {
        return true;
    }
    match (cc, a) {
        (Some(cc), F::Atom(..) | F::Eq(..)) => {
            matches!(a, F::Eq(l, r) if cc.equal(l, r)) || hyps.iter().any(|h| cc.atoms_equal(h, a))
        }
        (None, F::Eq(l, r)) => l == r,
        _ => false,
    }
}

enum Abort {
    Time,
    Steps,
}

type Outcome = Result<Option<ProofTrace>, Abort>;

/// Ground material of a sequent, for instantiation.
struct Pool {
    atoms: Vec<FolFormula>,
    terms: Vec<FolTerm>,
}

impl Pool {
    fn of(node: &Node) -> Pool {
        let mut atoms = Vec::new();
        let mut terms = Vec::new();
        for f in std::iter::once(&node.goal).chain(&node.hyps) {
            ground_atoms(f, &mut atoms);
            ground_subterms(f, &mut terms);
        }
        terms.sort_by_key(FolTerm::size);
        if terms.is_empty() {
            terms.push(FolTerm::cnst(DEFAULT_TERM));
        }
        Pool { atoms, terms }
    }

    /// Complete instantiations of `vars`: extensions of `seed` found by
    /// matching the atoms of `patterns` against ground atoms and equation
    /// sides against ground subterms, then the remaining variables filled
    /// with subterms by increasing size.
    fn instances(&self, vars: &[String], patterns: &[&FolFormula], seed: &[Option<FolTerm>]) -> Vec<Vec<FolTerm>> {
        let mut seeds: Vec<Vec<Option<FolTerm>>> = Vec::new();
        if seed.iter().any(Option::is_none) {
            let mut pats = Vec::new();
            for p in patterns {
                atoms(p, &mut pats);
            }
            for p in pats {
                for g in &self.atoms {
                    for s in match_atom(p, g, vars, seed) {
                        if s != seed && !seeds.contains(&s) {
                            seeds.push(s);
                        }
                    }
                }
                if let F::Eq(l, r) = p {
                    for side in [l, r] {
                        if matches!(side, FolTerm::Var(_)) {
                            continue;
                        }
                        for t in &self.terms {
                            let mut s = seed.to_vec();
                            if match_term(side, t, vars, &mut s) && s != seed && !seeds.contains(&s) {
                                seeds.push(s);
                            }
                        }
                    }
                }
            }
            seeds.sort_by_key(|s| std::cmp::Reverse(s.iter().filter(|x| x.is_some()).count()));
        }
        seeds.push(seed.to_vec());
        let mut out: Vec<Vec<FolTerm>> = Vec::new();
        for s in seeds {
            self.complete(&s, &mut out);
            if out.len() >= CANDIDATE_CAP {
                break;
            }
        }
        out.truncate(CANDIDATE_CAP);
        out
    }

    fn complete(&self, s: &[Option<FolTerm>], out: &mut Vec<Vec<FolTerm>>) {
        let open: Vec<usize> = (0..s.len()).filter(|i| s[*i].is_none()).collect();
        let mut digits = vec![0usize; open.len()];
        loop {
            let mut inst: Vec<FolTerm> = s
                .iter()
                .map(|x| x.clone().unwrap_or_else(|| FolTerm::cnst("")))
                .collect();
            for (k, &i) in open.iter().enumerate() {
                inst[i] = self.terms[digits[k]].clone();
            }
            if !out.contains(&inst) {
                out.push(inst);
            }
            if out.len() >= CANDIDATE_CAP {
                return;
            }
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return;
                }
                digits[k] += 1;
                if digits[k] < self.terms.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }
}

struct Search {
    start: Instant,
    limit: Duration,
    max_steps: u64,
    steps: u64,
    cut: bool,
    propositional: bool,
    ancestors: HashSet<u64>,
}

impl Search {
    fn tick(&mut self) -> Result<(), Abort> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Abort::Steps);
        }
        if self.steps.is_multiple_of(256) && self.start.elapsed() > self.limit {
            return Err(Abort::Time);
        }
        Ok(())
    }

    fn closure(&self, node: &Node, cc: &mut Option<Congruence>) -> Option<ProofTrace> {
        let goal = &node.goal;
        if *goal == F::Top {
            return Some(ProofTrace::leaf(Rule::TopR));
        }
        if node.hyps.contains(&F::Bottom) {
            return Some(ProofTrace::leaf(Rule::BotL));
        }
        if !matches!(goal, F::Atom(..) | F::Eq(..)) {
            return None;
        }
        if node.hyps.contains(goal) {
            return Some(ProofTrace::leaf(Rule::Axiom {
                principal: goal.clone(),
            }));
        }
        if let F::Eq(l, r) = goal {
            if l == r || cc.as_mut().is_some_and(|c| c.equal(l, r)) {
                return Some(ProofTrace::leaf(Rule::Congruence));
            }
        }
        let c = cc.as_mut()?;
        node.hyps
            .iter()
            .find(|h| c.atoms_equal(h, goal))
            .map(|h| ProofTrace::leaf(Rule::Axiom { principal: h.clone() }))
    }

    fn prove(&mut self, node: Node, depth: Option<usize>, may_rewrite: bool) -> Outcome {
        self.tick()?;
        let mut cc = if self.propositional { None } else { node.congruence() };
        if let Some(t) = self.closure(&node, &mut cc) {
            return Ok(Some(t));
        }
        // invertible right rules
        match &node.goal {
            F::Implies(a, b) => {
                let child = node.adding([a.as_ref().clone()], b.as_ref().clone());
                return Ok(self
                    .prove(child, depth, true)?
                    .map(|t| ProofTrace::node(Rule::ImpR, vec![t])));
            }
            F::And(a, b) => {
                let Some(ta) = self.prove(node.with_goal(a.as_ref().clone()), depth, true)? else {
                    return Ok(None);
                };
                let Some(tb) = self.prove(node.with_goal(b.as_ref().clone()), depth, true)? else {
                    return Ok(None);
                };
                return Ok(Some(ProofTrace::node(Rule::AndR, vec![ta, tb])));
            }
            F::Forall(x, b) => {
                let mut child = node.clone();
                let e = child.fresh();
                child.goal = b.subst(x, &e);
                let rule = Rule::AllR { eigen: e.to_string() };
                return Ok(self.prove(child, depth, true)?.map(|t| ProofTrace::node(rule, vec![t])));
            }
            _ => {}
        }
        // invertible left rules
        for i in 0..node.hyps.len() {
            let h = &node.hyps[i];
            let principal = h.clone();
            let single = |rule: Rule, child: Node, this: &mut Search| -> Outcome {
                Ok(this.prove(child, depth, true)?.map(|t| ProofTrace::node(rule, vec![t])))
            };
            match h {
                F::Top => return self.prove(node.replacing(i, []), depth, may_rewrite),
                F::And(a, b) => {
                    let child = node.replacing(i, [a.as_ref().clone(), b.as_ref().clone()]);
                    return single(Rule::AndL { principal }, child, self);
                }
                F::Or(a, b) => {
                    let Some(ta) = self.prove(node.replacing(i, [a.as_ref().clone()]), depth, true)? else {
                        return Ok(None);
                    };
                    let Some(tb) = self.prove(node.replacing(i, [b.as_ref().clone()]), depth, true)? else {
                        return Ok(None);
                    };
                    return Ok(Some(ProofTrace::node(Rule::OrL { principal }, vec![ta, tb])));
                }
                F::Exists(x, b) => {
                    let mut child = node.replacing(i, []);
                    let e = child.fresh();
                    let inst = b.subst(x, &e);
                    if !child.hyps.contains(&inst) {
                        child.hyps.push(inst);
                    }
                    return single(
                        Rule::ExL {
                            principal,
                            eigen: e.to_string(),
                        },
                        child,
                        self,
                    );
                }
                F::Implies(a, b) => match a.as_ref() {
                    F::Bottom => return self.prove(node.replacing(i, []), depth, may_rewrite),
                    F::Top => {
                        return single(
                            Rule::ImpTopL { principal },
                            node.replacing(i, [b.as_ref().clone()]),
                            self,
                        )
                    }
                    F::And(c, d) => {
                        let f = F::implies(c.as_ref().clone(), F::implies(d.as_ref().clone(), b.as_ref().clone()));
                        return single(Rule::ImpAndL { principal }, node.replacing(i, [f]), self);
                    }
                    F::Or(c, d) => {
                        let f1 = F::implies(c.as_ref().clone(), b.as_ref().clone());
                        let f2 = F::implies(d.as_ref().clone(), b.as_ref().clone());
                        return single(Rule::ImpOrL { principal }, node.replacing(i, [f1, f2]), self);
                    }
                    F::Exists(x, c) if !b.has_free(x) => {
                        let f = F::forall(x.clone(), F::implies(c.as_ref().clone(), b.as_ref().clone()));
                        return single(Rule::ImpExL { principal }, node.replacing(i, [f]), self);
                    }
                    F::Atom(..) | F::Eq(..) if available(&node.hyps, &mut cc, a) => {
                        return single(
                            Rule::ImpAtomL { principal },
                            node.replacing(i, [b.as_ref().clone()]),
                            self,
                        );
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        let key = canonical_key(&node.hyps, &node.goal);
        if !self.ancestors.insert(key) {
            return Ok(None);
        }
        let r = self.noninvertible(&node, depth, may_rewrite);
        self.ancestors.remove(&key);
        r
    }

    fn noninvertible(&mut self, node: &Node, depth: Option<usize>, may_rewrite: bool) -> Outcome {
        let sub = match depth {
            Some(0) => {
                self.cut = true;
                None
            }
            Some(d) => Some(Some(d - 1)),
            None => Some(None),
        };
        if let Some(d) = sub {
            let found = if self.propositional {
                self.propositional_rules(node, d)?
            } else {
                self.first_order_rules(node, d)?
            };
            if found.is_some() {
                return Ok(found);
            }
        }
        if may_rewrite && !self.propositional {
            if let Some(r) = rewrite_sequent(&node.hyps, &node.goal, REWRITE_BOUND) {
                let mut child = node.with_goal(r.goal.clone());
                let mut added = Vec::new();
                for (i, h) in &r.hyps {
                    child.hyps[*i] = h.clone();
                    added.push(h.clone());
                }
                let mut seen = Vec::new();
                child.hyps.retain(|h| {
                    let fresh = !seen.contains(h);
                    seen.push(h.clone());
                    fresh
                });
                let rule = Rule::Rewrite {
                    uses: r.uses,
                    goal: r.goal,
                    added,
                };
                return Ok(self
                    .prove(child, depth, false)?
                    .map(|t| ProofTrace::node(rule, vec![t])));
            }
        }
        Ok(None)
    }

    fn disjunction_right(&mut self, node: &Node, d: Option<usize>) -> Outcome {
        if let F::Or(a, b) = &node.goal {
            for (left, g) in [(true, a), (false, b)] {
                if let Some(t) = self.prove(node.with_goal(g.as_ref().clone()), d, true)? {
                    return Ok(Some(ProofTrace::node(Rule::OrR { left }, vec![t])));
                }
            }
        }
        Ok(None)
    }

    fn implication_of_implication(&mut self, node: &Node, d: Option<usize>) -> Outcome {
        for (i, h) in node.hyps.iter().enumerate() {
            let F::Implies(a, b) = h else { continue };
            let F::Implies(c, dd) = a.as_ref() else { continue };
            let db = F::implies(dd.as_ref().clone(), b.as_ref().clone());
            let cd = F::implies(c.as_ref().clone(), dd.as_ref().clone());
            let mut left = node.replacing(i, [db]);
            left.goal = cd;
            let Some(t1) = self.prove(left, d, true)? else { continue };
            let right = node.replacing(i, [b.as_ref().clone()]);
            if let Some(t2) = self.prove(right, d, true)? {
                return Ok(Some(ProofTrace::node(
                    Rule::ImpImpL { principal: h.clone() },
                    vec![t1, t2],
                )));
            }
        }
        Ok(None)
    }

    fn propositional_rules(&mut self, node: &Node, d: Option<usize>) -> Outcome {
        if let Some(t) = self.disjunction_right(node, d)? {
            return Ok(Some(t));
        }
        self.implication_of_implication(node, d)
    }

    fn first_order_rules(&mut self, node: &Node, d: Option<usize>) -> Outcome {
        let pool = Pool::of(node);
        if let Some(t) = self.apply(node, d, &pool)? {
            return Ok(Some(t));
        }
        if let Some(t) = self.disjunction_right(node, d)? {
            return Ok(Some(t));
        }
        if let Some(t) = self.exists_right(node, d, &pool)? {
            return Ok(Some(t));
        }
        if let Some(t) = self.implication_of_implication(node, d)? {
            return Ok(Some(t));
        }
        self.forward(node, d, &pool)
    }

    /// Proves every premise of an instance; `None` as soon as one fails.
    fn premises(
        &mut self,
        node: &Node,
        prems: &[FolFormula],
        d: Option<usize>,
    ) -> Result<Option<Vec<ProofTrace>>, Abort> {
        let mut out = Vec::with_capacity(prems.len());
        for p in prems {
            match self.prove(node.with_goal(p.clone()), d, true)? {
                Some(t) => out.push(t),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn apply(&mut self, node: &Node, d: Option<usize>, pool: &Pool) -> Outcome {
        if !matches!(node.goal, F::Atom(..) | F::Eq(..)) {
            return Ok(None);
        }
        for h in &node.hyps {
            let (vars, prems, concl) = strip(h);
            if vars.is_empty() && prems.is_empty() {
                continue;
            }
            let seeds = match_atom(concl, &node.goal, &vars, &vec![None; vars.len()]);
            let mut tried: Vec<Vec<FolTerm>> = Vec::new();
            for seed in seeds {
                for terms in pool.instances(&vars, &prems, &seed) {
                    if tried.contains(&terms) || tried.len() >= CANDIDATE_CAP {
                        continue;
                    }
                    tried.push(terms.clone());
                    let inst = instantiate(h, &terms).expect("block length");
                    let (_, ps, _) = strip(&inst);
                    let ps: Vec<FolFormula> = ps.into_iter().cloned().collect();
                    if let Some(children) = self.premises(node, &ps, d)? {
                        let rule = Rule::Apply {
                            principal: h.clone(),
                            terms,
                        };
                        return Ok(Some(ProofTrace::node(rule, children)));
                    }
                }
            }
        }
        Ok(None)
    }

    fn exists_right(&mut self, node: &Node, d: Option<usize>, pool: &Pool) -> Outcome {
        let mut vars = Vec::new();
        let mut body = &node.goal;
        while let F::Exists(x, b) = body {
            vars.push(x.clone());
            body = b;
        }
        if vars.is_empty() {
            return Ok(None);
        }
        for terms in pool.instances(&vars, &[body], &vec![None; vars.len()]) {
            let mut g = node.goal.clone();
            for t in &terms {
                g = match g {
                    F::Exists(x, b) => b.subst(&x, t),
                    _ => unreachable!("block length"),
                };
            }
            if let Some(t) = self.prove(node.with_goal(g), d, true)? {
                return Ok(Some(ProofTrace::node(Rule::ExR { witnesses: terms }, vec![t])));
            }
        }
        Ok(None)
    }

    fn forward(&mut self, node: &Node, d: Option<usize>, pool: &Pool) -> Outcome {
        for h in &node.hyps {
            let (vars, prems, concl) = strip(h);
            if vars.is_empty() && prems.is_empty() {
                continue;
            }
            let mut patterns = prems.clone();
            patterns.push(concl);
            for terms in pool.instances(&vars, &patterns, &vec![None; vars.len()]) {
                let inst = instantiate(h, &terms).expect("block length");
                let (_, ps, c) = strip(&inst);
                if node.hyps.contains(c) {
                    continue;
                }
                let ps: Vec<FolFormula> = ps.into_iter().cloned().collect();
                let c = c.clone();
                let Some(mut children) = self.premises(node, &ps, d)? else {
                    continue;
                };
                if let Some(t) = self.prove(node.adding([c], node.goal.clone()), d, true)? {
                    children.push(t);
                    let rule = Rule::Forward {
                        principal: h.clone(),
                        terms,
                    };
                    return Ok(Some(ProofTrace::node(rule, children)));
                }
            }
        }
        Ok(None)
    }
}

/// Iterative-deepening proof search; `budget.depth` bounds the number of
/// non-invertible steps on a branch.
pub fn prove_seq(s: &Sequent, budget: &Budget) -> Result<ProofTrace, Fail> {
    let mut hyps: Vec<FolFormula> = Vec::new();
    for h in &s.hyps {
        let n = normalize(h);
        if !hyps.contains(&n) {
            hyps.push(n);
        }
    }
    let goal = normalize(&s.goal);
    let next = hyps
        .iter()
        .chain(std::iter::once(&goal))
        .filter_map(max_eigen)
        .max()
        .map_or(0, |m| m + 1);
    let propositional = hyps.iter().all(is_ground_propositional) && is_ground_propositional(&goal);
    let root = Node { hyps, goal, next };
    let mut search = Search {
        start: Instant::now(),
        limit: Duration::from_secs_f64(budget.seconds.max(0.0)),
        max_steps: budget.max_steps,
        steps: 0,
        cut: false,
        propositional,
        ancestors: HashSet::new(),
    };
    let fail = |search: &Search, reason| Fail {
        reason,
        steps: search.steps,
        elapsed: search.start.elapsed(),
    };
    let levels: Vec<Option<usize>> = match budget.depth {
        None => vec![None],
        Some(max) => (0..=max).map(Some).collect(),
    };
    for depth in levels {
        search.cut = false;
        search.ancestors.clear();
        match search.prove(root.clone(), depth, true) {
            Ok(Some(t)) => return Ok(t),
            Ok(None) if !search.cut => return Err(fail(&search, FailReason::NoRule)),
            Ok(None) => {}
            Err(Abort::Time) => return Err(fail(&search, FailReason::TimeOut)),
            Err(Abort::Steps) => return Err(fail(&search, FailReason::StepLimit)),
        }
    }
    Err(fail(&search, FailReason::DepthExhausted))
}
