use std::collections::{BTreeMap, HashMap};

use crate::folir::{FolFormula, FolTerm};

use super::OracleError;

/// A finite structure over the domain `0..domain_size`. Tables are indexed
/// by the arguments read as a base-`domain_size` number, first argument most
/// significant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub domain_size: usize,
    pub functions: HashMap<String, Vec<usize>>,
    pub predicates: HashMap<String, Vec<bool>>,
}

fn index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, a| acc * n + a)
}

impl Model {
    fn term(&self, t: &FolTerm, env: &mut Vec<(String, usize)>) -> Result<usize, OracleError> {
        match t {
            FolTerm::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, v)| *v)
                .ok_or_else(|| OracleError::MissingTable(x.clone())),
            FolTerm::Fun(f, args) => {
                let table = self
                    .functions
                    .get(f)
                    .ok_or_else(|| OracleError::MissingTable(f.clone()))?;
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                table
                    .get(index(&vals, self.domain_size))
                    .copied()
                    .ok_or_else(|| OracleError::MissingTable(f.clone()))
            }
        }
    }

    fn formula(&self, f: &FolFormula, env: &mut Vec<(String, usize)>) -> Result<bool, OracleError> {
        use FolFormula as F;
        Ok(match f {
            F::Atom(p, args) => {
                let table = self
                    .predicates
                    .get(p)
                    .ok_or_else(|| OracleError::MissingTable(p.clone()))?;
                let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                *table
                    .get(index(&vals, self.domain_size))
                    .ok_or_else(|| OracleError::MissingTable(p.clone()))?
            }
            F::Eq(l, r) => self.term(l, env)? == self.term(r, env)?,
            F::Top => true,
            F::Bottom => false,
            F::Not(a) => !self.formula(a, env)?,
            F::And(a, b) => self.formula(a, env)? && self.formula(b, env)?,
            F::Or(a, b) => self.formula(a, env)? || self.formula(b, env)?,
            F::Implies(a, b) => !self.formula(a, env)? || self.formula(b, env)?,
            F::Iff(a, b) => self.formula(a, env)? == self.formula(b, env)?,
            F::Forall(x, a) | F::Exists(x, a) => {
                let universal = matches!(f, F::Forall(..));
                for v in 0..self.domain_size {
                    env.push((x.clone(), v));
                    let r = self.formula(a, env);
                    env.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
        })
    }
}

/// Tarskian truth of a closed formula in `model`.
pub fn eval_finite_model(f: &FolFormula, model: &Model) -> Result<bool, OracleError> {
    if model.domain_size == 0 {
        return Err(OracleError::EmptyDomain);
    }
    model.formula(f, &mut Vec::new())
}

/// Function and predicate symbols of a formula set, with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn of<'a>(fs: impl IntoIterator<Item = &'a FolFormula>) -> Self {
        let mut sig = Signature::default();
        for f in fs {
            sig.functions.extend(f.functions());
            sig.predicates.extend(f.predicates());
        }
        sig
    }
}

fn pow(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, _| acc.saturating_mul(n))
}

/// Every model of `sig` with the given domain size, in a fixed order.
pub fn all_models(sig: &Signature, domain_size: usize) -> impl Iterator<Item = Model> + '_ {
    // one mixed-radix digit per table cell
    let mut cells: Vec<usize> = Vec::new();
    for a in sig.functions.values() {
        cells.extend(std::iter::repeat_n(domain_size, pow(domain_size, *a)));
    }
    for a in sig.predicates.values() {
        cells.extend(std::iter::repeat_n(2, pow(domain_size, *a)));
    }
    let mut digits = vec![0usize; cells.len()];
    let mut done = domain_size == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut model = Model {
            domain_size,
            ..Model::default()
        };
        let mut it = digits.iter();
        for (f, a) in &sig.functions {
            let table = it.by_ref().take(pow(domain_size, *a)).copied().collect();
            model.functions.insert(f.clone(), table);
        }
        for (p, a) in &sig.predicates {
            let table = it.by_ref().take(pow(domain_size, *a)).map(|d| *d == 1).collect();
            model.predicates.insert(p.clone(), table);
        }
        // advance
        let mut i = 0;
        loop {
            if i == digits.len() {
                done = true;
                break;
            }
            digits[i] += 1;
            if digits[i] < cells[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(model)
    })
}

/// Whether some model with domain size in `1..=max_domain` satisfies every
/// formula; symbols are taken from `sig`, which must cover the formulas.
pub fn satisfiable_upto(fs: &[FolFormula], sig: &Signature, max_domain: usize) -> Result<bool, OracleError> {
    for n in 1..=max_domain {
        for m in all_models(sig, n) {
            let mut all = true;
            for f in fs {
                if !eval_finite_model(f, &m)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
