#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use hammer_core::folir::{to_tptp, Problem};
use hammer_core::kernel::{
    free_context, infer_type, is_proof, parse_env, Case, Context, Declaration, Environment, Term,
};

pub const STEMS: [&str; 3] = ["arith", "logic", "nat"];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_env(stem: &str) -> Environment {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{stem}.sx"))).unwrap();
    parse_env(&text).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Body,
    Type,
}

/// A proof subterm somewhere in a declaration.
#[derive(Clone, Debug)]
pub struct ProofSite {
    pub decl: usize,
    pub part: Part,
    pub path: Vec<usize>,
    /// The local variables the proof depends on, outermost first.
    pub context: Vec<(String, Term)>,
    pub prop: Term,
}

fn children(t: &Term) -> Vec<&Term> {
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Const(_) => vec![],
        Term::App(f, a) => vec![f, a],
        Term::Lambda(_, ty, b) | Term::Pi(_, ty, b) => vec![ty, b],
        Term::Case(c) => [&c.scrutinee, &c.return_pred].into_iter().chain(&c.branches).collect(),
    }
}

fn sites_in(
    env: &Environment,
    ctx: &Context,
    t: &Term,
    path: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Context, Term)>,
) {
    if !matches!(t, Term::Sort(_) | Term::Pi(..)) && is_proof(env, ctx, t) {
        if let Ok(prop) = infer_type(env, ctx, t) {
            out.push((path.clone(), ctx.clone(), prop));
        }
    }
    let binder = match t {
        Term::Lambda(x, ty, _) | Term::Pi(x, ty, _) => Some((x.clone(), (**ty).clone())),
        _ => None,
    };
    for (i, c) in children(t).into_iter().enumerate() {
        path.push(i);
        match (&binder, i) {
            (Some((x, ty)), 1) => {
                if !ctx.contains(x) {
                    sites_in(env, &ctx.extended(x.clone(), ty.clone()), c, path, out);
                }
            }
            _ => sites_in(env, ctx, c, path, out),
        }
        path.pop();
    }
}

/// Every subterm that is a proof, in definition bodies and in types.
pub fn proof_sites(env: &Environment) -> Vec<ProofSite> {
    let mut out = Vec::new();
    for (i, d) in env.decls().enumerate() {
        let parts: Vec<(Part, &Term)> = match d {
            Declaration::Definition { body, ty, .. } => vec![(Part::Body, body), (Part::Type, ty)],
            Declaration::Typing { ty, .. } => vec![(Part::Type, ty)],
            Declaration::Inductive(_) => vec![],
        };
        for (part, t) in parts {
            let mut found = Vec::new();
            sites_in(env, &Context::new(), t, &mut Vec::new(), &mut found);
            for (path, ctx, prop) in found {
                let mut sub = t;
                for &k in &path {
                    sub = children(sub)[k];
                }
                let needed = free_context(&ctx, &Term::app(sub.clone(), prop.clone()));
                out.push(ProofSite {
                    decl: i,
                    part,
                    path,
                    context: needed.entries().to_vec(),
                    prop,
                });
            }
        }
    }
    out
}

fn replace_at(t: &Term, path: &[usize], new: &Term) -> Term {
    let Some((&k, rest)) = path.split_first() else {
        return new.clone();
    };
    let go = |c: &Term| replace_at(c, rest, new);
    match t {
        Term::App(f, a) if k == 0 => Term::app(go(f), (**a).clone()),
        Term::App(f, a) => Term::app((**f).clone(), go(a)),
        Term::Lambda(x, ty, b) if k == 0 => Term::lambda(x.clone(), go(ty), (**b).clone()),
        Term::Lambda(x, ty, b) => Term::lambda(x.clone(), (**ty).clone(), go(b)),
        Term::Pi(x, ty, b) if k == 0 => Term::pi(x.clone(), go(ty), (**b).clone()),
        Term::Pi(x, ty, b) => Term::pi(x.clone(), (**ty).clone(), go(b)),
        Term::Case(c) => {
            let mut c2: Case = (**c).clone();
            match k {
                0 => c2.scrutinee = go(&c.scrutinee),
                1 => c2.return_pred = go(&c.return_pred),
                n => c2.branches[n - 2] = go(&c.branches[n - 2]),
            }
            Term::Case(Box::new(c2))
        }
        _ => panic!("bad path"),
    }
}

/// The environment with the proof at `site` replaced by a fresh opaque
/// constant `fresh` applied to the proof's context; `fresh` is declared
/// just before the declaration.
pub fn replace_with_opaque(env: &Environment, site: &ProofSite, fresh: &str) -> Environment {
    let closed = site
        .context
        .iter()
        .rev()
        .fold(site.prop.clone(), |acc, (x, ty)| Term::pi(x.clone(), ty.clone(), acc));
    let applied = Term::apps(
        Term::cnst(fresh),
        site.context.iter().map(|(x, _)| Term::var(x.clone())),
    );
    let mut decls = Vec::new();
    for (i, d) in env.decls().enumerate() {
        if i != site.decl {
            decls.push(d.clone());
            continue;
        }
        decls.push(Declaration::Typing {
            name: fresh.to_string(),
            ty: closed.clone(),
        });
        decls.push(match (d, site.part) {
            (Declaration::Definition { name, body, ty }, Part::Body) => Declaration::Definition {
                name: name.clone(),
                body: replace_at(body, &site.path, &applied),
                ty: ty.clone(),
            },
            (Declaration::Definition { name, body, ty }, Part::Type) => Declaration::Definition {
                name: name.clone(),
                body: body.clone(),
                ty: replace_at(ty, &site.path, &applied),
            },
            (Declaration::Typing { name, ty }, _) => Declaration::Typing {
                name: name.clone(),
                ty: replace_at(ty, &site.path, &applied),
            },
            (Declaration::Inductive(_), _) => unreachable!("no sites in inductives"),
        });
    }
    Environment::from_decls(decls).unwrap()
}

/// TPTP text of a problem without the axioms originating from `drop`, with
/// lifted symbol names renumbered in order of first occurrence.
pub fn canonical_text(p: &Problem, drop: &str) -> String {
    let kept: Vec<_> = p
        .axioms
        .iter()
        .filter(|a| a.origin.as_ref().is_none_or(|o| o.decl != drop))
        .cloned()
        .collect();
    let text = to_tptp(&Problem::new(kept, p.conjecture.clone())).unwrap();
    let mut names: Vec<String> = Vec::new();
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String, names: &mut Vec<String>| {
        let lifted = ["lam_", "case_", "pi_"].iter().any(|p| {
            word.strip_prefix(p)
                .is_some_and(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()))
        });
        if lifted {
            let i = names.iter().position(|n| n == word).unwrap_or_else(|| {
                names.push(word.clone());
                names.len() - 1
            });
            out.push_str(&format!("lifted{i}"));
        } else {
            out.push_str(word);
        }
        word.clear();
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out, &mut names);
            out.push(c);
        }
    }
    flush(&mut word, &mut out, &mut names);
    out
}
