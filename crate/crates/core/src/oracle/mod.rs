//! Reference procedures, independent of the prover and the reconstructor.

mod completion;
mod enumerate;
mod ipc;
mod model;

pub use completion::ground_completion;
pub use enumerate::{
    count_formulas, enumerate_formulas, enumerate_small_fol, enumerate_small_fol_over, small_signatures,
    SMALL_SIGNATURE,
};
pub use ipc::{classical_only_formulas, classically_valid, ipc_decide, peirce, IpcDecider};
pub use model::{all_models, eval_finite_model, satisfiable_upto, Model, Signature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no interpretation for `{0}`")]
    MissingTable(String),
    #[error("empty domain")]
    EmptyDomain,
    #[error("not a propositional formula: {0}")]
    NotPropositional(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folir::{FolFormula as F, FolTerm};

    fn a(n: &str) -> F {
        F::atom(n, vec![])
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (0..=3).map(|d| enumerate_formulas(3, d).count()).collect();
        assert_eq!(counts, vec![4, 56, 1356, 41968]);
        assert_eq!(count_formulas(3, 4), 4 + 52 + 1300 + 40612 + 1420900);
    }

    #[test]
    fn enumeration_is_ordered_and_distinct() {
        let fs: Vec<F> = enumerate_formulas(3, 2).collect();
        assert_eq!(fs[0], a("A"));
        assert_eq!(fs[3], F::Bottom);
        assert_eq!(fs[4], F::not(a("A")));
        assert_eq!(fs[8], F::implies(a("A"), a("A")));
        let set: std::collections::HashSet<String> = fs.iter().map(|f| f.to_string()).collect();
        assert_eq!(set.len(), fs.len());
    }

    #[test]
    fn ipc_known_cases() {
        let (x, y) = (a("A"), a("B"));
        assert!(ipc_decide(&F::implies(x.clone(), x.clone())).unwrap());
        assert!(ipc_decide(&F::not(F::not(F::or(x.clone(), F::not(x.clone()))))).unwrap());
        assert!(ipc_decide(&F::implies(F::and(x.clone(), y.clone()), F::and(y.clone(), x.clone()))).unwrap());
        assert!(ipc_decide(&F::implies(
            F::implies(F::or(x.clone(), y.clone()), F::Bottom),
            F::not(x.clone())
        ))
        .unwrap());
        assert!(!ipc_decide(&peirce()).unwrap());
        assert!(classically_valid(&peirce()).unwrap());
        for f in classical_only_formulas() {
            assert!(classically_valid(&f).unwrap(), "{f}");
            assert!(!ipc_decide(&f).unwrap(), "{f}");
        }
        assert!(ipc_decide(&F::atom("p", vec![FolTerm::cnst("c")])).is_err());
    }

    #[test]
    fn intuitionistic_implies_classical() {
        let mut d = IpcDecider::new();
        for f in enumerate_formulas(3, 2) {
            if d.decide(&f).unwrap() {
                assert!(classically_valid(&f).unwrap(), "{f}");
            }
        }
    }

    #[test]
    fn finite_models() {
        let x = "X".to_string();
        let f = F::forall(x.clone(), F::atom("q", vec![FolTerm::var(x.clone())]));
        let mut m = Model {
            domain_size: 2,
            ..Model::default()
        };
        m.predicates.insert("q".into(), vec![true, false]);
        assert!(!eval_finite_model(&f, &m).unwrap());
        let e = F::exists(x.clone(), F::atom("q", vec![FolTerm::var(x)]));
        assert!(eval_finite_model(&e, &m).unwrap());
        let sig = Signature::of([&f]);
        assert_eq!(all_models(&sig, 2).count(), 4);
        assert!(satisfiable_upto(std::slice::from_ref(&f), &sig, 2).unwrap());
        assert!(!satisfiable_upto(&[f.clone(), F::not(f)], &sig, 3).unwrap());
    }
}
