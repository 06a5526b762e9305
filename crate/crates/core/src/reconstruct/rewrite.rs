use crate::folir::{FolFormula, FolTerm};

use super::cc::Congruence;
use super::formula::{match_term, strip};
use super::trace::RewriteUse;
use super::Sequent;

use FolFormula as F;

struct Oriented<'a> {
    principal: &'a FolFormula,
    vars: Vec<String>,
    lhs: &'a FolTerm,
    rhs: &'a FolTerm,
    conds: Vec<&'a FolFormula>,
}

fn term_vars(t: &FolTerm) -> Vec<String> {
    let mut v = Vec::new();
    t.collect_vars(&mut v);
    v
}

fn orient(h: &FolFormula) -> Option<Oriented<'_>> {
    let (vars, conds, concl) = strip(h);
    let F::Eq(l, r) = concl else {
        return None;
    };
    let usable = |lhs: &FolTerm, rhs: &FolTerm| {
        if lhs.size() <= rhs.size() || matches!(lhs, FolTerm::Var(_)) {
            return false;
        }
        let lv = term_vars(lhs);
        let bound = |x: &String| !vars.contains(x) || lv.contains(x);
        vars.iter().all(|x| lv.contains(x))
            && term_vars(rhs).iter().all(bound)
            && conds.iter().all(|c| c.free_vars().iter().all(bound))
    };
    let (lhs, rhs) = if usable(l, r) {
        (l, r)
    } else if usable(r, l) {
        (r, l)
    } else {
        return None;
    };
    Some(Oriented {
        principal: h,
        vars,
        lhs,
        rhs,
        conds,
    })
}

fn is_equational(h: &FolFormula) -> bool {
    matches!(strip(h).2, F::Eq(..))
}

/// Whether an atomic condition holds outright in `hyps`.
fn available(hyps: &[FolFormula], cc: &mut Congruence, c: &FolFormula) -> bool {
    match c {
        F::Top => true,
        F::Eq(l, r) if cc.equal(l, r) => true,
        F::Atom(..) | F::Eq(..) => hyps.iter().any(|h| cc.atoms_equal(h, c)),
        _ => hyps.contains(c),
    }
}

struct Rewriter<'a> {
    hyps: &'a [FolFormula],
    rules: Vec<Oriented<'a>>,
    cc: Congruence,
    left: usize,
    uses: Vec<RewriteUse>,
}

impl Rewriter<'_> {
    /// First rule instance rewriting `t`, as `(rhs, use)`.
    fn rewrite_at(&mut self, t: &FolTerm) -> Option<(FolTerm, RewriteUse)> {
        for rule in &self.rules {
            let mut sigma = vec![None; rule.vars.len()];
            if !match_term(rule.lhs, t, &rule.vars, &mut sigma) {
                continue;
            }
            let terms: Vec<FolTerm> = sigma
                .into_iter()
                .map(|s| s.expect("all variables occur in lhs"))
                .collect();
            let inst = |f: &FolFormula| {
                rule.vars
                    .iter()
                    .zip(&terms)
                    .rev()
                    .fold(f.clone(), |acc, (x, u)| acc.subst(x, u))
            };
            let conds: Vec<FolFormula> = rule.conds.iter().map(|c| inst(c)).collect();
            if !conds.iter().all(|c| available(self.hyps, &mut self.cc, c)) {
                continue;
            }
            let rhs = rule
                .vars
                .iter()
                .zip(&terms)
                .rev()
                .fold(rule.rhs.clone(), |acc, (x, u)| acc.subst(x, u));
            let principal = rule.principal.clone();
            return Some((rhs, RewriteUse { principal, terms }));
        }
        None
    }

    /// Outermost, leftmost rewritable ground subterm of `t`.
    fn find_in_term(&mut self, t: &FolTerm) -> Option<(FolTerm, FolTerm, RewriteUse)> {
        if t.is_ground() {
            if let Some((rhs, u)) = self.rewrite_at(t) {
                return Some((t.clone(), rhs, u));
            }
        }
        match t {
            FolTerm::Fun(_, args) => args.iter().find_map(|a| self.find_in_term(a)),
            FolTerm::Var(_) => None,
        }
    }

    fn find_in_formula(&mut self, f: &FolFormula) -> Option<(FolTerm, FolTerm, RewriteUse)> {
        let mut terms = Vec::new();
        f.for_each_term(&mut |t| terms.push(t));
        terms.into_iter().find_map(|t| self.find_in_term(t))
    }

    fn normalize(&mut self, f: &FolFormula) -> FolFormula {
        let mut cur = f.clone();
        while self.left > 0 {
            let Some((from, to, u)) = self.find_in_formula(&cur) else {
                break;
            };
            cur = cur.map_terms(&mut |t| replace(t, &from, &to));
            self.left -= 1;
            if !self.uses.contains(&u) {
                self.uses.push(u);
            }
        }
        cur
    }
}

fn replace(t: &FolTerm, from: &FolTerm, to: &FolTerm) -> FolTerm {
    if t == from {
        return to.clone();
    }
    match t {
        FolTerm::Fun(f, args) => FolTerm::Fun(f.clone(), args.iter().map(|a| replace(a, from, to)).collect()),
        FolTerm::Var(_) => t.clone(),
    }
}

pub(crate) struct RewriteResult {
    pub uses: Vec<RewriteUse>,
    pub goal: FolFormula,
    /// `(index, rewritten)` for every changed hypothesis.
    pub hyps: Vec<(usize, FolFormula)>,
}

pub(crate) fn rewrite_sequent(hyps: &[FolFormula], goal: &FolFormula, bound: usize) -> Option<RewriteResult> {
    let rules: Vec<Oriented<'_>> = hyps.iter().filter_map(orient).collect();
    if rules.is_empty() || bound == 0 {
        return None;
    }
    let mut cc = Congruence::new();
    for h in hyps {
        if let F::Eq(l, r) = h {
            if l.is_ground() && r.is_ground() {
                cc.merge_terms(l, r);
            }
        }
    }
    let mut rw = Rewriter {
        hyps,
        rules,
        cc,
        left: bound,
        uses: Vec::new(),
    };
    let new_goal = rw.normalize(goal);
    let mut changed = Vec::new();
    for (i, h) in hyps.iter().enumerate() {
        if rw.left == 0 {
            break;
        }
        if is_equational(h) {
            continue;
        }
        let n = rw.normalize(h);
        if n != *h {
            changed.push((i, n));
        }
    }
    if new_goal == *goal && changed.is_empty() {
        return None;
    }
    Some(RewriteResult {
        uses: rw.uses,
        goal: new_goal,
        hyps: changed,
    })
}

/// Rewrites the goal and the non-equational hypotheses with the oriented
/// equations, outermost first, for at most `bound` steps in total.
pub fn rewrite_pass(s: &Sequent, bound: usize) -> Sequent {
    match rewrite_sequent(&s.hyps, &s.goal, bound) {
        None => s.clone(),
        Some(r) => {
            let mut hyps = s.hyps.clone();
            for (i, h) in r.hyps {
                hyps[i] = h;
            }
            Sequent::new(hyps, r.goal)
        }
    }
}
