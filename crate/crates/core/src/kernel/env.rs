use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;

use super::term::{fresh_name, Term};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub ty: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inductive {
    pub name: String,
    pub arity: Term,
    pub n_params: usize,
    pub constructors: Vec<Constructor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    /// `name = body : ty`
    Definition {
        name: String,
        body: Term,
        ty: Term,
    },
    /// `name : ty`
    Typing {
        name: String,
        ty: Term,
    },
    Inductive(Inductive),
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Definition { name, .. } | Declaration::Typing { name, .. } => name,
            Declaration::Inductive(ind) => &ind.name,
        }
    }

    /// Every global name this declaration introduces.
    pub fn introduced_names(&self) -> Vec<&str> {
        match self {
            Declaration::Inductive(ind) => std::iter::once(ind.name.as_str())
                .chain(ind.constructors.iter().map(|c| c.name.as_str()))
                .collect(),
            _ => vec![self.name()],
        }
    }

    pub fn alpha_eq(&self, other: &Declaration) -> bool {
        match (self, other) {
            (
                Declaration::Definition {
                    name: a,
                    body: b,
                    ty: t,
                },
                Declaration::Definition {
                    name: c,
                    body: d,
                    ty: u,
                },
            ) => a == c && b.alpha_eq(d) && t.alpha_eq(u),
            (Declaration::Typing { name: a, ty: t }, Declaration::Typing { name: c, ty: u }) => a == c && t.alpha_eq(u),
            (Declaration::Inductive(i), Declaration::Inductive(j)) => {
                i.name == j.name
                    && i.n_params == j.n_params
                    && i.arity.alpha_eq(&j.arity)
                    && i.constructors.len() == j.constructors.len()
                    && i.constructors
                        .iter()
                        .zip(&j.constructors)
                        .all(|(a, b)| a.name == b.name && a.ty.alpha_eq(&b.ty))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Declaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Declaration::Definition { name, body, ty } => {
                write!(f, "(definition {name} {body} {ty})")
            }
            Declaration::Typing { name, ty } => write!(f, "(typing {name} {ty})"),
            Declaration::Inductive(ind) => {
                write!(f, "(inductive {} {} {} (", ind.name, ind.arity, ind.n_params)?;
                for (i, c) in ind.constructors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({} {})", c.name, c.ty)?;
                }
                write!(f, "))")
            }
        }
    }
}

/// What a global name refers to.
#[derive(Clone, Copy, Debug)]
pub enum GlobalRef<'a> {
    Definition { body: &'a Term, ty: &'a Term },
    Typing { ty: &'a Term },
    Inductive(&'a Inductive),
    Constructor { ind: &'a Inductive, index: usize },
}

impl<'a> GlobalRef<'a> {
    pub fn ty(&self) -> &'a Term {
        match *self {
            GlobalRef::Definition { ty, .. } | GlobalRef::Typing { ty } => ty,
            GlobalRef::Inductive(ind) => &ind.arity,
            GlobalRef::Constructor { ind, index } => &ind.constructors[index].ty,
        }
    }
}

/// Global environment: declarations in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    decls: IndexMap<String, Declaration>,
    ctor_index: HashMap<String, (String, usize)>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_decls(decls: impl IntoIterator<Item = Declaration>) -> Result<Self, KernelError> {
        let mut env = Self::new();
        for d in decls {
            env.add(d)?;
        }
        Ok(env)
    }

    pub fn add(&mut self, decl: Declaration) -> Result<(), KernelError> {
        for n in decl.introduced_names() {
            if self.contains(n) {
                return Err(KernelError::Duplicate(n.to_string()));
            }
        }
        if let Declaration::Inductive(ind) = &decl {
            let mut seen = HashSet::new();
            seen.insert(ind.name.as_str());
            for (i, c) in ind.constructors.iter().enumerate() {
                if !seen.insert(&c.name) {
                    return Err(KernelError::Duplicate(c.name.clone()));
                }
                self.ctor_index.insert(c.name.clone(), (ind.name.clone(), i));
            }
        }
        self.decls.insert(decl.name().to_string(), decl);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name) || self.ctor_index.contains_key(name)
    }

    pub fn decl(&self, name: &str) -> Option<&Declaration> {
        self.decls.get(name)
    }

    pub fn decls(&self) -> impl Iterator<Item = &Declaration> {
        self.decls.values()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.decls.get_index_of(self.owner(name)?)
    }

    /// Name of the declaration introducing `name` (an inductive owns its constructors).
    pub fn owner<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        if let Some((k, _)) = self.decls.get_key_value(name) {
            return Some(k.as_str());
        }
        self.ctor_index.get(name).map(|(ind, _)| ind.as_str())
    }

    pub fn lookup(&self, name: &str) -> Option<GlobalRef<'_>> {
        if let Some(d) = self.decls.get(name) {
            return Some(match d {
                Declaration::Definition { body, ty, .. } => GlobalRef::Definition { body, ty },
                Declaration::Typing { ty, .. } => GlobalRef::Typing { ty },
                Declaration::Inductive(ind) => GlobalRef::Inductive(ind),
            });
        }
        let (ind, index) = self.ctor_index.get(name)?;
        match self.decls.get(ind) {
            Some(Declaration::Inductive(ind)) => Some(GlobalRef::Constructor { ind, index: *index }),
            _ => None,
        }
    }

    pub fn type_of(&self, name: &str) -> Option<&Term> {
        self.lookup(name).map(|g| g.ty())
    }

    pub fn definition_body(&self, name: &str) -> Option<&Term> {
        match self.decls.get(name) {
            Some(Declaration::Definition { body, .. }) => Some(body),
            _ => None,
        }
    }

    pub fn inductive(&self, name: &str) -> Option<&Inductive> {
        match self.decls.get(name) {
            Some(Declaration::Inductive(ind)) => Some(ind),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }
}

/// Local typing context; later entries may mention earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(String, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(String, Term)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(String, Term)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, x: &str) -> Option<&Term> {
        self.entries.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == x)
    }

    pub fn push(&mut self, x: impl Into<String>, ty: Term) {
        self.entries.push((x.into(), ty));
    }

    pub fn pop(&mut self) -> Option<(String, Term)> {
        self.entries.pop()
    }

    pub fn extended(&self, x: impl Into<String>, ty: Term) -> Context {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    /// Picks a binder name not already bound here, renaming `body` to match.
    pub fn freshen(&self, x: &str, body: &Term) -> (String, Term) {
        if !self.contains(x) {
            return (x.to_string(), body.clone());
        }
        let mut avoid: HashSet<String> = self.names().map(str::to_string).collect();
        avoid.extend(body.free_vars());
        let fresh = fresh_name(x, &avoid);
        let renamed = body.subst(x, &Term::Var(fresh.clone()));
        (fresh, renamed)
    }
}
