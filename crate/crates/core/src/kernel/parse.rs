//! Reader for the s-expression export format.
//!
//! ```text
//! decl ::= (definition NAME term term) | (typing NAME term)
//!        | (inductive NAME term NAT ((NAME term) ...))
//! term ::= (sort prop|set|type) | (var NAME) | (const NAME)
//!        | (app term term) | (lambda (NAME term) term) | (pi (NAME term) term)
//!        | (case NAME NAT term term (term ...))
//! ```
//!
//! Names are checked while reading: `var` must be bound by an enclosing
//! binder, `const` must name an earlier declaration (an inductive may mention
//! itself in its constructor types).

use super::env::{Constructor, Declaration, Environment, Inductive};
use super::term::{Case, Sort, Term};
use super::KernelError;

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> KernelError {
    KernelError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

fn read_all(src: &str) -> Result<Vec<Sexp>, KernelError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let mut atom = String::new();
    let mut atom_pos = Pos { line, col };

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<Sexp>, Pos)], top: &mut Vec<Sexp>) {
        if atom.is_empty() {
            return;
        }
        let a = Sexp::Atom(std::mem::take(atom), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(a),
            None => top.push(a),
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match c {
            ';' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                let (items, pos) = stack.pop().ok_or_else(|| syntax(here, "unbalanced ')'"))?;
                let l = Sexp::List(items, pos);
                match stack.last_mut() {
                    Some((items, _)) => items.push(l),
                    None => top.push(l),
                }
            }
            c if c.is_whitespace() => flush(&mut atom, atom_pos, &mut stack, &mut top),
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
    }
    flush(&mut atom, atom_pos, &mut stack, &mut top);
    if let Some((_, pos)) = stack.pop() {
        return Err(syntax(pos, "unclosed '('"));
    }
    Ok(top)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

struct Reader<'e> {
    env: &'e Environment,
    /// Extra global names visible while reading the current declaration.
    local_globals: Vec<String>,
    bound: Vec<String>,
}

impl Reader<'_> {
    fn ident(&self, s: &Sexp) -> Result<String, KernelError> {
        match s {
            Sexp::Atom(a, p) if is_ident(a) => Ok(a.clone()),
            Sexp::Atom(a, p) => Err(syntax(*p, format!("invalid identifier '{a}'"))),
            Sexp::List(_, p) => Err(syntax(*p, "expected identifier")),
        }
    }

    fn nat(&self, s: &Sexp) -> Result<usize, KernelError> {
        match s {
            Sexp::Atom(a, p) => a
                .parse()
                .map_err(|_| syntax(*p, format!("expected natural number, got '{a}'"))),
            Sexp::List(_, p) => Err(syntax(*p, "expected natural number")),
        }
    }

    fn list<'s>(&self, s: &'s Sexp) -> Result<&'s [Sexp], KernelError> {
        match s {
            Sexp::List(items, _) => Ok(items),
            Sexp::Atom(_, p) => Err(syntax(*p, "expected list")),
        }
    }

    fn global_known(&self, name: &str) -> bool {
        self.env.contains(name) || self.local_globals.iter().any(|g| g == name)
    }

    fn binder(&mut self, s: &Sexp) -> Result<(String, Term), KernelError> {
        let items = self.list(s)?;
        if items.len() != 2 {
            return Err(syntax(s.pos(), "binder must be (NAME term)"));
        }
        let x = self.ident(&items[0])?;
        let ty = self.term(&items[1])?;
        Ok((x, ty))
    }

    fn term(&mut self, s: &Sexp) -> Result<Term, KernelError> {
        let items = self.list(s)?;
        let pos = s.pos();
        let head = match items.first() {
            Some(Sexp::Atom(h, _)) => h.as_str(),
            _ => return Err(syntax(pos, "expected term keyword")),
        };
        let arity = |n: usize| -> Result<(), KernelError> {
            if items.len() == n + 1 {
                Ok(())
            } else {
                Err(syntax(pos, format!("'{head}' takes {n} arguments")))
            }
        };
        match head {
            "sort" => {
                arity(1)?;
                match &items[1] {
                    Sexp::Atom(a, _) if a == "prop" => Ok(Term::Sort(Sort::Prop)),
                    Sexp::Atom(a, _) if a == "set" => Ok(Term::Sort(Sort::Set)),
                    Sexp::Atom(a, _) if a == "type" => Ok(Term::Sort(Sort::Type)),
                    other => Err(syntax(other.pos(), "sort must be prop, set or type")),
                }
            }
            "var" => {
                arity(1)?;
                let x = self.ident(&items[1])?;
                if !self.bound.contains(&x) {
                    let p = items[1].pos();
                    return Err(KernelError::Unbound {
                        name: x,
                        line: p.line,
                        col: p.col,
                    });
                }
                Ok(Term::Var(x))
            }
            "const" => {
                arity(1)?;
                let c = self.ident(&items[1])?;
                if !self.global_known(&c) {
                    let p = items[1].pos();
                    return Err(KernelError::Unbound {
                        name: c,
                        line: p.line,
                        col: p.col,
                    });
                }
                Ok(Term::Const(c))
            }
            "app" => {
                arity(2)?;
                let f = self.term(&items[1])?;
                let a = self.term(&items[2])?;
                Ok(Term::app(f, a))
            }
            "lambda" | "pi" => {
                arity(2)?;
                let (x, ty) = self.binder(&items[1])?;
                self.bound.push(x.clone());
                let body = self.term(&items[2]);
                self.bound.pop();
                let body = body?;
                Ok(if head == "lambda" {
                    Term::lambda(x, ty, body)
                } else {
                    Term::pi(x, ty, body)
                })
            }
            "case" => {
                arity(5)?;
                let ind = self.ident(&items[1])?;
                let n_params = self.nat(&items[2])?;
                let scrutinee = self.term(&items[3])?;
                let return_pred = self.term(&items[4])?;
                let branches = self
                    .list(&items[5])?
                    .iter()
                    .map(|b| self.term(b))
                    .collect::<Result<Vec<_>, _>>()?;
                let Some(decl) = self.env.inductive(&ind) else {
                    let p = items[1].pos();
                    return Err(KernelError::Unbound {
                        name: ind,
                        line: p.line,
                        col: p.col,
                    });
                };
                if decl.constructors.len() != branches.len() {
                    return Err(syntax(
                        pos,
                        format!(
                            "case on '{ind}' needs {} branches, found {}",
                            decl.constructors.len(),
                            branches.len()
                        ),
                    ));
                }
                Ok(Term::Case(Box::new(Case {
                    ind,
                    n_params,
                    scrutinee,
                    return_pred,
                    branches,
                })))
            }
            other => Err(syntax(pos, format!("unknown term keyword '{other}'"))),
        }
    }

    fn decl(&mut self, s: &Sexp) -> Result<Declaration, KernelError> {
        let items = self.list(s)?;
        let pos = s.pos();
        let head = match items.first() {
            Some(Sexp::Atom(h, _)) => h.as_str(),
            _ => return Err(syntax(pos, "expected declaration keyword")),
        };
        self.local_globals.clear();
        match head {
            "definition" => {
                if items.len() != 4 {
                    return Err(syntax(pos, "definition takes NAME body type"));
                }
                let name = self.ident(&items[1])?;
                let body = self.term(&items[2])?;
                let ty = self.term(&items[3])?;
                Ok(Declaration::Definition { name, body, ty })
            }
            "typing" => {
                if items.len() != 3 {
                    return Err(syntax(pos, "typing takes NAME type"));
                }
                let name = self.ident(&items[1])?;
                let ty = self.term(&items[2])?;
                Ok(Declaration::Typing { name, ty })
            }
            "inductive" => {
                if items.len() != 5 {
                    return Err(syntax(pos, "inductive takes NAME arity NAT constructors"));
                }
                let name = self.ident(&items[1])?;
                let arity = self.term(&items[2])?;
                let n_params = self.nat(&items[3])?;
                self.local_globals.push(name.clone());
                let mut constructors = Vec::new();
                for c in self.list(&items[4])? {
                    let parts = self.list(c)?;
                    if parts.len() != 2 {
                        return Err(syntax(c.pos(), "constructor must be (NAME type)"));
                    }
                    let cname = self.ident(&parts[0])?;
                    let ty = self.term(&parts[1])?;
                    constructors.push(Constructor { name: cname, ty });
                }
                self.local_globals.clear();
                Ok(Declaration::Inductive(Inductive {
                    name,
                    arity,
                    n_params,
                    constructors,
                }))
            }
            other => Err(syntax(pos, format!("unknown declaration keyword '{other}'"))),
        }
    }
}

/// Parses a whole export file, returning the declarations in source order.
pub fn parse_decls(source: &str) -> Result<Vec<Declaration>, KernelError> {
    Ok(parse_env(source)?.decls().cloned().collect())
}

/// Parses a whole export file into an environment.
pub fn parse_env(source: &str) -> Result<Environment, KernelError> {
    let mut env = Environment::new();
    for s in read_all(source)? {
        let decl = {
            let mut r = Reader {
                env: &env,
                local_globals: Vec::new(),
                bound: Vec::new(),
            };
            r.decl(&s)?
        };
        env.add(decl)?;
    }
    Ok(env)
}

/// Parses a single closed term against an environment.
pub fn parse_term(env: &Environment, source: &str) -> Result<Term, KernelError> {
    let sexps = read_all(source)?;
    let [s] = sexps.as_slice() else {
        return Err(syntax(Pos { line: 1, col: 1 }, "expected exactly one term"));
    };
    Reader {
        env,
        local_globals: Vec::new(),
        bound: Vec::new(),
    }
    .term(s)
}

/// Prints declarations one per line in the export syntax.
pub fn print_decls<'a>(decls: impl IntoIterator<Item = &'a Declaration>) -> String {
    let mut out = String::new();
    for d in decls {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}
