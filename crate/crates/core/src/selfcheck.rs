//! Comparisons of the prover-side procedures against the brute-force
//! oracles: clausification against finite models, the reconstructor
//! against the intuitionistic decision procedure, congruence closure
//! against ground completion.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::folir::{FolFormula, FolTerm, LabeledAxiom, Problem, Role};
use crate::miniatp::clausify;
use crate::oracle::{
    classical_only_formulas, enumerate_formulas, enumerate_small_fol_over, ground_completion, peirce, satisfiable_upto,
    small_signatures, IpcDecider, Signature,
};
use crate::reconstruct::{check_trace, congruence_close, prove_seq, Budget, CcQuery, FailReason, Sequent};

/// Result of one sweep.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub checked: u64,
    /// Descriptions of the cases that disagreed, at most `MAX_REPORTED`.
    pub failures: Vec<String>,
    pub violations: u64,
    pub elapsed: Duration,
}

const MAX_REPORTED: usize = 20;

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn collect(name: &str, checked: u64, bad: Vec<String>, start: Instant) -> Self {
        CheckOutcome {
            name: name.to_string(),
            checked,
            violations: bad.len() as u64,
            failures: bad.into_iter().take(MAX_REPORTED).collect(),
            elapsed: start.elapsed(),
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {} checked, {} violations, {:.2?}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.violations,
            self.elapsed
        )
    }
}

/// Clause set of a single formula, as closed formulas.
pub fn clause_formulas(f: &FolFormula) -> Vec<FolFormula> {
    let p = Problem::new(
        vec![LabeledAxiom::new("f", Role::Axiom, f.clone())],
        LabeledAxiom::new("goal", Role::Conjecture, FolFormula::Bottom),
    );
    clausify(&p).iter().map(|c| c.formula()).collect()
}

/// Satisfiability up to `max_domain` of each formula against that of its
/// clause form.
pub fn clausify_agreement(formulas: &[FolFormula], max_domain: usize) -> Vec<String> {
    formulas
        .par_iter()
        .filter_map(|f| {
            let cs = clause_formulas(f);
            let orig = satisfiable_upto(std::slice::from_ref(f), &Signature::of([f]), max_domain);
            let clausal = satisfiable_upto(&cs, &Signature::of(&cs), max_domain);
            match (orig, clausal) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => Some(format!("{f}: formula {a:?}, clauses {b:?}")),
            }
        })
        .collect()
}

/// The small first-order formulas against all models of size up to
/// `max_domain`: every formula with at most one connective, equality
/// included, and every equality-free formula with at most
/// `max_connectives` connectives.
pub fn clausify_sweep(max_connectives: usize, max_domain: usize) -> CheckOutcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for syms in small_signatures() {
        let mut fs = enumerate_small_fol_over(&syms, 1, true);
        if max_connectives > 1 {
            fs.extend(
                enumerate_small_fol_over(&syms, max_connectives, false)
                    .into_iter()
                    .filter(|f| {
                        let mut conns = 0;
                        f.visit(&mut |g| {
                            conns += usize::from(
                                !g.is_atomic() && !matches!(g, FolFormula::Forall(..) | FolFormula::Exists(..)),
                            )
                        });
                        conns > 1
                    }),
            );
        }
        checked += fs.len() as u64;
        bad.extend(clausify_agreement(&fs, max_domain));
    }
    CheckOutcome::collect("clausification vs finite models", checked, bad, start)
}

/// Budget of the propositional sweep: no depth bound, and a step ceiling
/// that contraction-free search must stay under.
pub const IPC_BUDGET: Budget = Budget {
    depth: None,
    seconds: 30.0,
    max_steps: 1_000_000,
};

/// `prove_seq` on `⊢ f` against the decision procedure; proofs must also
/// replay, and failures must be `NoRule`.
pub fn ipc_agreement(formulas: &[FolFormula]) -> Vec<String> {
    formulas
        .par_chunks(4096)
        .flat_map_iter(|chunk| {
            let mut oracle = IpcDecider::new();
            chunk
                .iter()
                .filter_map(move |f| {
                    let expected = match oracle.decide(f) {
                        Ok(v) => v,
                        Err(e) => return Some(format!("{f}: {e}")),
                    };
                    let s = Sequent::new(vec![], f.clone());
                    match prove_seq(&s, &IPC_BUDGET) {
                        Ok(t) => match check_trace(&s, &t) {
                            Err(e) => Some(format!("{f}: trace rejected: {e}")),
                            Ok(()) if !expected => Some(format!("{f}: proved, oracle says invalid")),
                            Ok(()) => None,
                        },
                        Err(e) if e.reason != FailReason::NoRule => Some(format!("{f}: {}", e.reason)),
                        Err(_) if expected => Some(format!("{f}: not proved, oracle says valid")),
                        Err(_) => None,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn ipc_sweep(atoms: usize, depth: usize) -> CheckOutcome {
    let start = Instant::now();
    let fs: Vec<FolFormula> = enumerate_formulas(atoms, depth).collect();
    let bad = ipc_agreement(&fs);
    CheckOutcome::collect(
        &format!("reconstruction vs IPC decision ({atoms} atoms, {depth} connectives)"),
        fs.len() as u64,
        bad,
        start,
    )
}

/// Peirce's law and the pinned classical-only formulas must not be proved
/// at any budget.
pub fn classical_leak_check() -> CheckOutcome {
    let start = Instant::now();
    let mut fs = vec![peirce()];
    fs.extend(classical_only_formulas());
    let budget = Budget {
        depth: Some(16),
        seconds: 10.0,
        max_steps: 5_000_000,
    };
    let bad = fs
        .iter()
        .filter(|f| prove_seq(&Sequent::new(vec![], (*f).clone()), &budget).is_ok())
        .map(|f| format!("{f}: proved"))
        .collect();
    CheckOutcome::collect("classical-only formulas fail", fs.len() as u64, bad, start)
}

/// Random ground equations over at most four symbols with one constant
/// always present, and a query pair.
#[derive(Clone, Debug)]
pub struct CcInstance {
    pub equations: Vec<(FolTerm, FolTerm)>,
    pub lhs: FolTerm,
    pub rhs: FolTerm,
}

const CC_SYMBOLS: [(&str, usize); 5] = [("b", 0), ("c", 0), ("f", 1), ("g", 2), ("h", 1)];

fn random_term(rng: &mut ChaCha8Rng, syms: &[(&str, usize)], depth: usize) -> FolTerm {
    let pick: Vec<&(&str, usize)> = syms.iter().filter(|s| depth > 0 || s.1 == 0).collect();
    let (name, arity) = **pick.choose(rng).expect("a constant is always present");
    let args = (0..arity).map(|_| random_term(rng, syms, depth - 1)).collect();
    FolTerm::fun(name, args)
}

/// Up to 8 equations over `a` and up to three of `b c f g h`, terms of
/// depth at most 3. Half the queries are drawn from subterms of the
/// equations so that positive answers are common.
pub fn random_cc_instance(rng: &mut ChaCha8Rng) -> CcInstance {
    let mut syms = vec![("a", 0)];
    let mut pool = CC_SYMBOLS.to_vec();
    pool.shuffle(rng);
    syms.extend(pool.into_iter().take(rng.gen_range(0..=3)));
    let n = rng.gen_range(0..=8);
    let equations: Vec<(FolTerm, FolTerm)> = (0..n)
        .map(|_| {
            let (d1, d2) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
            (random_term(rng, &syms, d1), random_term(rng, &syms, d2))
        })
        .collect();
    let mut subs: Vec<&FolTerm> = Vec::new();
    for (l, r) in &equations {
        l.subterms(&mut subs);
        r.subterms(&mut subs);
    }
    let query = |rng: &mut ChaCha8Rng| {
        if !subs.is_empty() && rng.gen_bool(0.5) {
            (*subs.choose(rng).expect("non-empty")).clone()
        } else {
            let d = rng.gen_range(0..=3);
            random_term(rng, &syms, d)
        }
    };
    let lhs = query(rng);
    let rhs = query(rng);
    CcInstance { equations, lhs, rhs }
}

/// `count` seeded random instances, congruence closure against ground
/// completion. Returns the outcome and how many queries held.
pub fn cc_sweep(count: usize, seed: u64) -> (CheckOutcome, usize) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut positive = 0;
    for _ in 0..count {
        let inst = random_cc_instance(&mut rng);
        let ours = congruence_close(&inst.equations, &CcQuery::Terms(inst.lhs.clone(), inst.rhs.clone()));
        let oracle = ground_completion(&inst.equations, &inst.lhs, &inst.rhs);
        positive += usize::from(oracle);
        if ours != oracle {
            bad.push(format!("{inst:?}: closure {ours}, completion {oracle}"));
        }
    }
    (
        CheckOutcome::collect("congruence closure vs ground completion", count as u64, bad, start),
        positive,
    )
}

/// All oracle comparisons; `quick` shrinks the sweeps to a few seconds.
pub fn run_all(quick: bool) -> Vec<CheckOutcome> {
    let (conns, depth, cc) = if quick { (1, 3, 200) } else { (2, 4, 1000) };
    vec![
        clausify_sweep(conns, 2),
        ipc_sweep(3, depth),
        classical_leak_check(),
        cc_sweep(cc, 0).0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_form_of_simple_formula() {
        let f = FolFormula::exists("X0", FolFormula::atom("p", vec![FolTerm::var("X0")]));
        let cs = clause_formulas(&f);
        assert_eq!(cs.len(), 1);
        assert!(clausify_agreement(&[f], 2).is_empty());
    }

    #[test]
    fn quick_cc_sweep_agrees() {
        let (o, positive) = cc_sweep(100, 7);
        assert!(o.passed(), "{:?}", o.failures);
        assert!(positive > 10);
    }

    #[test]
    fn instances_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let inst = random_cc_instance(&mut rng);
            assert!(inst.equations.len() <= 8);
            let mut syms = std::collections::BTreeSet::new();
            let mut depth_ok = true;
            for t in inst
                .equations
                .iter()
                .flat_map(|(l, r)| [l, r])
                .chain([&inst.lhs, &inst.rhs])
            {
                let mut subs = Vec::new();
                t.subterms(&mut subs);
                for s in subs {
                    if let FolTerm::Fun(f, _) = s {
                        syms.insert(f.clone());
                    }
                }
                depth_ok &= term_depth(t) <= 3;
            }
            assert!(syms.len() <= 4 && depth_ok);
        }
    }

    fn term_depth(t: &FolTerm) -> usize {
        match t {
            FolTerm::Fun(_, args) => args.iter().map(term_depth).max().map_or(0, |d| d + 1),
            FolTerm::Var(_) => 0,
        }
    }
}
