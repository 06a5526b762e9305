use crate::folir::{FolFormula, FolTerm};

const ATOM_NAMES: [&str; 3] = ["A", "B", "C"];

/// Propositional formulas over the first `atoms` atoms and `⊥`, built with
/// `¬`, `→`, `∧`, `∨` and using at most `depth` connectives, without
/// repetition. Order: by connective count; within a count, `¬` first, then
/// `→`, `∧`, `∨`, each by size of the left operand and then by the
/// positions of the operands in this same order.
pub fn enumerate_formulas(atoms: usize, depth: usize) -> impl Iterator<Item = FolFormula> {
    assert!(atoms <= ATOM_NAMES.len(), "at most {} atoms", ATOM_NAMES.len());
    let mut levels: Vec<Vec<FolFormula>> = Vec::new();
    let mut leaves: Vec<FolFormula> = ATOM_NAMES[..atoms]
        .iter()
        .map(|a| FolFormula::atom(*a, vec![]))
        .collect();
    leaves.push(FolFormula::Bottom);
    levels.push(leaves);
    for k in 1..depth {
        let level: Vec<FolFormula> = level_iter(&levels, k).collect();
        levels.push(level);
    }
    let last = if depth == 0 {
        None
    } else {
        Some(level_iter(&levels, depth).collect::<Vec<_>>().into_iter())
    };
    let cached: Vec<FolFormula> = levels.into_iter().flatten().collect();
    cached.into_iter().chain(last.into_iter().flatten())
}

fn level_iter(levels: &[Vec<FolFormula>], k: usize) -> impl Iterator<Item = FolFormula> + '_ {
    let nots = levels[k - 1].iter().map(|f| FolFormula::not(f.clone()));
    let binaries = (0..3).flat_map(move |op| {
        (0..k).flat_map(move |i| {
            let j = k - 1 - i;
            levels[i].iter().flat_map(move |l| {
                levels[j].iter().map(move |r| {
                    let (l, r) = (l.clone(), r.clone());
                    match op {
                        0 => FolFormula::implies(l, r),
                        1 => FolFormula::and(l, r),
                        _ => FolFormula::or(l, r),
                    }
                })
            })
        })
    });
    nots.chain(binaries)
}

/// Number of formulas `enumerate_formulas(atoms, depth)` yields.
pub fn count_formulas(atoms: usize, depth: usize) -> u64 {
    let mut c = vec![atoms as u64 + 1];
    for k in 1..=depth {
        let bin: u64 = (0..k).map(|i| c[i] * c[k - 1 - i]).sum();
        c.push(c[k - 1] + 3 * bin);
    }
    c.iter().sum()
}

/// Symbols the first-order enumeration draws from: `(name, arity, is_predicate)`.
pub const SMALL_SIGNATURE: [(&str, usize, bool); 5] = [
    ("q", 0, true),
    ("p", 1, true),
    ("r", 2, true),
    ("c", 0, false),
    ("f", 1, false),
];

fn small_terms(scope: usize, syms: &[(&str, usize, bool)]) -> Vec<FolTerm> {
    let mut base: Vec<FolTerm> = (0..scope).map(|i| FolTerm::var(format!("X{i}"))).collect();
    if syms.iter().any(|s| s.0 == "c") {
        base.push(FolTerm::cnst("c"));
    }
    let mut out = base.clone();
    if syms.iter().any(|s| s.0 == "f") {
        out.extend(base.into_iter().map(|t| FolTerm::fun("f", vec![t])));
    }
    out
}

fn small_atoms(scope: usize, syms: &[(&str, usize, bool)], equality: bool) -> Vec<FolFormula> {
    let terms = small_terms(scope, syms);
    let mut out = Vec::new();
    for &(name, arity, pred) in syms {
        if !pred {
            continue;
        }
        match arity {
            0 => out.push(FolFormula::atom(name, vec![])),
            1 => out.extend(terms.iter().map(|t| FolFormula::atom(name, vec![t.clone()]))),
            _ => {
                for a in &terms {
                    out.extend(terms.iter().map(|b| FolFormula::atom(name, vec![a.clone(), b.clone()])));
                }
            }
        }
    }
    if equality {
        for a in &terms {
            out.extend(terms.iter().map(|b| FolFormula::eq(a.clone(), b.clone())));
        }
    }
    out
}

/// Formulas with variables `X0..X{scope-1}` in scope, exactly `quants`
/// quantifiers and exactly `conns` connectives.
fn small_fol(scope: usize, quants: usize, conns: usize, syms: &[(&str, usize, bool)], eq: bool) -> Vec<FolFormula> {
    let mut out = Vec::new();
    if quants == 0 && conns == 0 {
        return small_atoms(scope, syms, eq);
    }
    if quants > 0 {
        let x = format!("X{scope}");
        for body in small_fol(scope + 1, quants - 1, conns, syms, eq) {
            out.push(FolFormula::forall(x.clone(), body.clone()));
            out.push(FolFormula::exists(x.clone(), body));
        }
    }
    if conns > 0 {
        out.extend(
            small_fol(scope, quants, conns - 1, syms, eq)
                .into_iter()
                .map(FolFormula::not),
        );
        for lq in 0..=quants {
            for lc in 0..conns {
                let rights = small_fol(scope, quants - lq, conns - 1 - lc, syms, eq);
                for l in small_fol(scope, lq, lc, syms, eq) {
                    for r in &rights {
                        out.push(FolFormula::and(l.clone(), r.clone()));
                        out.push(FolFormula::or(l.clone(), r.clone()));
                        out.push(FolFormula::implies(l.clone(), r.clone()));
                        out.push(FolFormula::iff(l.clone(), r.clone()));
                    }
                }
            }
        }
    }
    out
}

/// Nonempty sets of at most two symbols of [`SMALL_SIGNATURE`].
pub fn small_signatures() -> Vec<Vec<(&'static str, usize, bool)>> {
    let mut subsets: Vec<Vec<_>> = SMALL_SIGNATURE.iter().map(|s| vec![*s]).collect();
    for (i, a) in SMALL_SIGNATURE.iter().enumerate() {
        for b in &SMALL_SIGNATURE[i + 1..] {
            subsets.push(vec![*a, *b]);
        }
    }
    subsets
}

/// Closed first-order formulas using exactly the symbols `syms`, optionally
/// equality, at most two quantifiers and at most `max_connectives` of
/// `¬ ∧ ∨ → ↔`. Terms nest `f` at most once; bound variables are named by
/// nesting depth, so alpha variants do not repeat.
pub fn enumerate_small_fol_over(
    syms: &[(&str, usize, bool)],
    max_connectives: usize,
    equality: bool,
) -> Vec<FolFormula> {
    let mut out = Vec::new();
    for quants in 0..=2 {
        for conns in 0..=max_connectives {
            for f in small_fol(0, quants, conns, syms, equality) {
                let preds = f.predicates();
                let funs = f.functions();
                let uses = |s: &str| preds.iter().chain(&funs).any(|(n, _)| n == s);
                if syms.iter().all(|s| uses(s.0)) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// [`enumerate_small_fol_over`] for every set of [`small_signatures`].
pub fn enumerate_small_fol(max_connectives: usize, equality: bool) -> Vec<FolFormula> {
    small_signatures()
        .iter()
        .flat_map(|syms| enumerate_small_fol_over(syms, max_connectives, equality))
        .collect()
}
