//! TPTP FOF emission and a reader for our own emissions.
//!
//! Name mangling (symbols and labels use separate tables, variables are
//! renamed per formula):
//! - the reserved symbols `$P`, `$T` and `@` print as `p`, `t` and `ap`;
//! - already-quoted atoms are kept as they are;
//! - one leading `$` or `'` (internal sigils) is dropped;
//! - names matching `[A-Za-z][A-Za-z0-9_]*` get a lowercase first letter;
//! - anything else is single-quoted with `\` and `'` escaped;
//! - if the result is already taken by a different name, `_h` plus eight hex
//!   digits of the FNV-1a hash of the original name is appended (inside the
//!   quotes for quoted atoms) until it is free.
//!
//! Each axiom with a known origin is preceded by a comment line
//! `% origin LABEL KIND DECL` that the reader uses to recover hints.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::fol::{FolFormula, FolTerm, LabeledAxiom, Origin, OriginKind, Problem, Role, APP, HAS_TYPE, PROVABLE};
use super::FolError;

fn fnv1a(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

fn is_lower_word_shape(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_quoted_atom(s: &str) -> bool {
    if s.len() < 3 || !s.starts_with('\'') || !s.ends_with('\'') {
        return false;
    }
    let mut cs = s[1..s.len() - 1].chars();
    while let Some(c) = cs.next() {
        match c {
            '\\' => {
                if !matches!(cs.next(), Some('\\' | '\'')) {
                    return false;
                }
            }
            '\'' => return false,
            _ => {}
        }
    }
    true
}

fn base_mangle(name: &str) -> String {
    if is_quoted_atom(name) {
        return name.to_string();
    }
    let stripped = name
        .strip_prefix('$')
        .or_else(|| name.strip_prefix('\''))
        .filter(|s| !s.is_empty())
        .unwrap_or(name);
    if is_lower_word_shape(stripped) {
        let mut cs = stripped.chars();
        let first = cs.next().unwrap().to_ascii_lowercase();
        std::iter::once(first).chain(cs).collect()
    } else {
        let mut q = String::from("'");
        for c in stripped.chars() {
            if c == '\\' || c == '\'' {
                q.push('\\');
            }
            q.push(c);
        }
        q.push('\'');
        q
    }
}

/// Injective name table for one namespace.
#[derive(Debug, Default, Clone)]
pub struct Mangler {
    forward: HashMap<String, String>,
    taken: HashMap<String, String>,
}

impl Mangler {
    pub fn with_reserved(reserved: &[(&str, &str)]) -> Self {
        let mut m = Self::default();
        for (orig, out) in reserved {
            m.forward.insert(orig.to_string(), out.to_string());
            m.taken.insert(out.to_string(), orig.to_string());
        }
        m
    }

    pub fn mangle(&mut self, name: &str) -> String {
        if let Some(m) = self.forward.get(name) {
            return m.clone();
        }
        let mut cand = base_mangle(name);
        let hash = format!("_h{:08x}", fnv1a(name));
        while self.taken.contains_key(&cand) {
            if let Some(inner) = cand.strip_suffix('\'') {
                cand = format!("{inner}{hash}'");
            } else {
                cand.push_str(&hash);
            }
        }
        self.forward.insert(name.to_string(), cand.clone());
        self.taken.insert(cand.clone(), name.to_string());
        cand
    }
}

fn symbol_mangler() -> Mangler {
    Mangler::with_reserved(&[(PROVABLE, "p"), (HAS_TYPE, "t"), (APP, "ap")])
}

/// Checks that every symbol is used at a single arity across the problem.
pub fn check_arity(p: &Problem) -> Result<(), FolError> {
    check_arity_of(p.all())
}

fn check_arity_of<'a>(axioms: impl IntoIterator<Item = &'a LabeledAxiom>) -> Result<(), FolError> {
    let mut seen: HashMap<String, (String, usize, &'static str)> = HashMap::new();
    for ax in axioms {
        let uses = ax
            .formula
            .functions()
            .into_iter()
            .map(|(n, a)| (n, a, "function"))
            .chain(ax.formula.predicates().into_iter().map(|(n, a)| (n, a, "predicate")));
        for (name, arity, kind) in uses {
            match seen.get(&name) {
                Some((label, a, k)) if *a != arity || *k != kind => {
                    return Err(FolError::ArityClash {
                        symbol: name,
                        first: format!("{k} of arity {a} in {label}"),
                        second: format!("{kind} of arity {arity} in {}", ax.label),
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(name, (ax.label.clone(), arity, kind));
                }
            }
        }
    }
    Ok(())
}

struct Emitter {
    symbols: Mangler,
}

impl Emitter {
    fn term(&mut self, t: &FolTerm, vars: &HashMap<String, String>, out: &mut String) {
        match t {
            FolTerm::Var(x) => out.push_str(vars.get(x).map(String::as_str).unwrap_or(x)),
            FolTerm::Fun(f, args) => {
                out.push_str(&self.symbols.mangle(f));
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.term(a, vars, out);
                    }
                    out.push(')');
                }
            }
        }
    }

    fn fresh_var(x: &str, used: &mut Vec<String>) -> String {
        let mut base: String = x
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        match base.chars().next() {
            Some(c) if c.is_ascii_alphabetic() => {
                let up = c.to_ascii_uppercase();
                base.replace_range(0..1, &up.to_string());
            }
            _ => base.insert(0, 'X'),
        }
        let mut cand = base.clone();
        let mut n = 1;
        while used.contains(&cand) {
            cand = format!("{base}{n}");
            n += 1;
        }
        used.push(cand.clone());
        cand
    }

    /// Prints `f` as a unit formula (parenthesized unless atomic-like).
    fn unit(&mut self, f: &FolFormula, vars: &mut HashMap<String, String>, used: &mut Vec<String>, out: &mut String) {
        match f {
            FolFormula::Eq(..) => {
                out.push('(');
                self.formula(f, vars, used, out);
                out.push(')');
            }
            _ => self.formula(f, vars, used, out),
        }
    }

    fn formula(
        &mut self,
        f: &FolFormula,
        vars: &mut HashMap<String, String>,
        used: &mut Vec<String>,
        out: &mut String,
    ) {
        match f {
            FolFormula::Atom(p, args) => self.term(&FolTerm::Fun(p.clone(), args.clone()), vars, out),
            FolFormula::Eq(l, r) => {
                self.term(l, vars, out);
                out.push_str(" = ");
                self.term(r, vars, out);
            }
            FolFormula::Top => out.push_str("$true"),
            FolFormula::Bottom => out.push_str("$false"),
            FolFormula::Not(a) => {
                out.push_str("~ ");
                self.unit(a, vars, used, out);
            }
            FolFormula::And(a, b) => self.binary(a, "&", b, vars, used, out),
            FolFormula::Or(a, b) => self.binary(a, "|", b, vars, used, out),
            FolFormula::Implies(a, b) => self.binary(a, "=>", b, vars, used, out),
            FolFormula::Iff(a, b) => self.binary(a, "<=>", b, vars, used, out),
            FolFormula::Forall(x, body) | FolFormula::Exists(x, body) => {
                let q = if matches!(f, FolFormula::Forall(..)) { '!' } else { '?' };
                let v = Self::fresh_var(x, used);
                let prev = vars.insert(x.clone(), v.clone());
                let _ = write!(out, "{q}[{v}]: ");
                self.unit(body, vars, used, out);
                match prev {
                    Some(p) => vars.insert(x.clone(), p),
                    None => vars.remove(x),
                };
            }
        }
    }

    fn binary(
        &mut self,
        a: &FolFormula,
        op: &str,
        b: &FolFormula,
        vars: &mut HashMap<String, String>,
        used: &mut Vec<String>,
        out: &mut String,
    ) {
        out.push('(');
        self.formula(a, vars, used, out);
        let _ = write!(out, " {op} ");
        self.formula(b, vars, used, out);
        out.push(')');
    }

    fn closed_formula(&mut self, f: &FolFormula) -> String {
        let mut used = Vec::new();
        let mut vars = HashMap::new();
        for x in f.free_vars() {
            let v = Self::fresh_var(&x, &mut used);
            vars.insert(x, v);
        }
        let mut out = String::new();
        self.formula(f, &mut vars, &mut used, &mut out);
        out
    }
}

/// Serializes a problem as TPTP FOF. Deterministic: equal problems give
/// byte-identical text.
pub fn to_tptp(p: &Problem) -> Result<String, FolError> {
    emit(&p.all().collect::<Vec<_>>())
}

/// The `fof` lines, with origin comments, of a list of axioms.
pub fn axioms_to_tptp(axioms: &[LabeledAxiom]) -> Result<String, FolError> {
    emit(&axioms.iter().collect::<Vec<_>>())
}

fn emit(axioms: &[&LabeledAxiom]) -> Result<String, FolError> {
    check_arity_of(axioms.iter().copied())?;
    let mut labels = Mangler::default();
    let mut em = Emitter {
        symbols: symbol_mangler(),
    };
    let mut out = String::new();
    for ax in axioms {
        let label = labels.mangle(&ax.label);
        let role = if ax.role == Role::Conjecture {
            "conjecture"
        } else {
            "axiom"
        };
        if let Some(o) = &ax.origin {
            let _ = writeln!(out, "% origin {label} {} {}", o.kind.as_str(), o.decl);
        }
        let body = em.closed_formula(&ax.formula);
        let _ = writeln!(out, "fof({label}, {role}, {body}).");
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reader

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    Dollar(String),
    Punct(&'static str),
}

type Lexed = (Vec<Tok>, Vec<(String, Origin)>);

fn lex(src: &str) -> Result<Lexed, FolError> {
    let mut toks = Vec::new();
    let mut origins = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    const PUNCT: [&str; 16] = [
        "<=>", "<~>", "=>", "<=", "!=", "~|", "~&", "(", ")", "[", "]", ",", ":", ".", "&", "|",
    ];
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '%' {
            let start = i;
            while i < cs.len() && cs[i] != '\n' {
                i += 1;
            }
            let line: String = cs[start..i].iter().collect();
            let parts: Vec<&str> = line.split_whitespace().collect();
            if let ["%", "origin", label, kind, decl] = parts.as_slice() {
                if let Some(kind) = OriginKind::parse(kind) {
                    origins.push((
                        label.to_string(),
                        Origin {
                            decl: decl.to_string(),
                            kind,
                        },
                    ));
                }
            }
        } else if c == '\'' {
            let mut s = String::from("'");
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err(FolError::Parse("unterminated quoted atom".into())),
                    Some('\\') => {
                        s.push('\\');
                        s.push(*cs.get(i + 1).ok_or_else(|| FolError::Parse("bad escape".into()))?);
                        i += 2;
                    }
                    Some('\'') => {
                        s.push('\'');
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            toks.push(Tok::Quoted(s));
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            i += 1;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            let w: String = cs[start..i].iter().collect();
            toks.push(if c == '$' {
                Tok::Dollar(w)
            } else if c.is_ascii_uppercase() || c == '_' {
                Tok::Upper(w)
            } else {
                Tok::Lower(w)
            });
        } else {
            let rest: String = cs[i..cs.len().min(i + 3)].iter().collect();
            let p = PUNCT
                .iter()
                .chain(["=", "~", "!", "?"].iter())
                .find(|p| rest.starts_with(**p))
                .ok_or_else(|| FolError::Parse(format!("unexpected character '{c}'")))?;
            toks.push(Tok::Punct(p));
            i += p.chars().count();
        }
    }
    Ok((toks, origins))
}

struct TptpParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl TptpParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, FolError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| FolError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, p: &str) -> Result<(), FolError> {
        match self.next()? {
            Tok::Punct(q) if q == p => Ok(()),
            t => Err(FolError::Parse(format!("expected '{p}', found {t:?}"))),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn name(&mut self) -> Result<String, FolError> {
        match self.next()? {
            Tok::Lower(s) | Tok::Quoted(s) => Ok(s),
            t => Err(FolError::Parse(format!("expected name, found {t:?}"))),
        }
    }

    fn term(&mut self) -> Result<FolTerm, FolError> {
        match self.next()? {
            Tok::Upper(v) => Ok(FolTerm::Var(v)),
            Tok::Lower(f) | Tok::Quoted(f) => {
                let mut args = Vec::new();
                if self.is_punct("(") {
                    self.next()?;
                    loop {
                        args.push(self.term()?);
                        if self.is_punct(",") {
                            self.next()?;
                        } else {
                            break;
                        }
                    }
                    self.expect(")")?;
                }
                let f = if f == "ap" && args.len() == 2 {
                    APP.to_string()
                } else {
                    f
                };
                Ok(FolTerm::Fun(f, args))
            }
            t => Err(FolError::Parse(format!("expected term, found {t:?}"))),
        }
    }

    fn formula(&mut self) -> Result<FolFormula, FolError> {
        let lhs = self.unit()?;
        let op = match self.peek() {
            Some(Tok::Punct(p)) if ["&", "|", "=>", "<=>", "<=", "<~>"].contains(p) => *p,
            _ => return Ok(lhs),
        };
        self.next()?;
        let rhs = self.unit()?;
        let mut acc = match op {
            "&" => FolFormula::and(lhs, rhs),
            "|" => FolFormula::or(lhs, rhs),
            "=>" => return Ok(FolFormula::implies(lhs, rhs)),
            "<=" => return Ok(FolFormula::implies(rhs, lhs)),
            "<=>" => return Ok(FolFormula::iff(lhs, rhs)),
            _ => return Ok(FolFormula::not(FolFormula::iff(lhs, rhs))),
        };
        while self.is_punct(op) {
            self.next()?;
            let r = self.unit()?;
            acc = if op == "&" {
                FolFormula::and(acc, r)
            } else {
                FolFormula::or(acc, r)
            };
        }
        Ok(acc)
    }

    fn unit(&mut self) -> Result<FolFormula, FolError> {
        match self.peek().cloned() {
            Some(Tok::Punct("(")) => {
                self.next()?;
                let f = self.formula()?;
                self.expect(")")?;
                Ok(f)
            }
            Some(Tok::Punct("~")) => {
                self.next()?;
                Ok(FolFormula::not(self.unit()?))
            }
            Some(Tok::Punct(q @ ("!" | "?"))) => {
                self.next()?;
                self.expect("[")?;
                let mut vs = Vec::new();
                loop {
                    match self.next()? {
                        Tok::Upper(v) => vs.push(v),
                        t => return Err(FolError::Parse(format!("expected variable, found {t:?}"))),
                    }
                    if self.is_punct(",") {
                        self.next()?;
                    } else {
                        break;
                    }
                }
                self.expect("]")?;
                self.expect(":")?;
                let body = self.unit()?;
                Ok(if q == "!" {
                    FolFormula::forall_many(&vs, body)
                } else {
                    FolFormula::exists_many(&vs, body)
                })
            }
            Some(Tok::Dollar(d)) if d == "$true" => {
                self.next()?;
                Ok(FolFormula::Top)
            }
            Some(Tok::Dollar(d)) if d == "$false" => {
                self.next()?;
                Ok(FolFormula::Bottom)
            }
            _ => {
                let t = self.term()?;
                if self.is_punct("=") {
                    self.next()?;
                    Ok(FolFormula::Eq(t, self.term()?))
                } else if self.is_punct("!=") {
                    self.next()?;
                    Ok(FolFormula::not(FolFormula::Eq(t, self.term()?)))
                } else {
                    match t {
                        FolTerm::Fun(p, args) => {
                            let p = match (p.as_str(), args.len()) {
                                ("p", 1) => PROVABLE.to_string(),
                                ("t", 2) => HAS_TYPE.to_string(),
                                (APP, 2) => "ap".to_string(),
                                _ => p,
                            };
                            Ok(FolFormula::Atom(p, args))
                        }
                        FolTerm::Var(v) => Err(FolError::Parse(format!("variable {v} used as formula"))),
                    }
                }
            }
        }
    }
}

/// Reads a FOF problem as emitted by [`to_tptp`]. Apart from the reserved
/// `p`, `t` and `ap`, symbol names stay mangled.
pub fn parse_tptp(src: &str) -> Result<Problem, FolError> {
    let (toks, origins) = lex(src)?;
    let origins: HashMap<String, Origin> = origins.into_iter().collect();
    let mut p = TptpParser { toks, pos: 0 };
    let mut axioms = Vec::new();
    let mut conjecture = None;
    while p.peek().is_some() {
        match p.next()? {
            Tok::Lower(w) if w == "fof" => {}
            t => return Err(FolError::Parse(format!("expected fof, found {t:?}"))),
        }
        p.expect("(")?;
        let label = p.name()?;
        p.expect(",")?;
        let role = p.name()?;
        p.expect(",")?;
        let formula = p.formula()?;
        // optional source/useful-info annotations are skipped
        let mut depth = 0usize;
        loop {
            match p.next()? {
                Tok::Punct("(") => depth += 1,
                Tok::Punct(")") if depth == 0 => break,
                Tok::Punct(")") => depth -= 1,
                _ => {}
            }
        }
        p.expect(".")?;
        let mut ax = LabeledAxiom::new(
            label.clone(),
            if role == "conjecture" {
                Role::Conjecture
            } else {
                Role::Axiom
            },
            formula,
        );
        ax.origin = origins.get(&label).cloned();
        if role == "conjecture" {
            if conjecture.replace(ax).is_some() {
                return Err(FolError::Parse("more than one conjecture".into()));
            }
        } else {
            axioms.push(ax);
        }
    }
    let conjecture = conjecture.ok_or_else(|| FolError::Parse("no conjecture".into()))?;
    Ok(Problem { axioms, conjecture })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_problem() {
        let conj = LabeledAxiom::new("goal", Role::Conjecture, FolFormula::provable(FolTerm::cnst("c")));
        let p = Problem::new(vec![], conj);
        assert_eq!(to_tptp(&p).unwrap(), "fof(goal, conjecture, p(c)).\n");
    }

    #[test]
    fn guard_axiom_syntax() {
        let ax = FolFormula::forall(
            "x",
            FolFormula::implies(
                FolFormula::has_type(FolTerm::var("x"), FolTerm::cnst("nat")),
                FolFormula::eq(FolTerm::var("x"), FolTerm::var("x")),
            ),
        );
        let p = Problem::new(
            vec![LabeledAxiom::new("a1", Role::Axiom, ax)],
            LabeledAxiom::new("goal", Role::Conjecture, FolFormula::Top),
        );
        let text = to_tptp(&p).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "fof(a1, axiom, ![X]: (t(X,nat) => X = X))."
        );
    }

    #[test]
    fn mangling_is_injective() {
        let mut m = symbol_mangler();
        let a = m.mangle("O");
        let b = m.mangle("o");
        let c = m.mangle("x.y");
        let d = m.mangle("p");
        let e = m.mangle("'pi_0");
        assert_eq!(a, "o");
        assert_ne!(a, b);
        assert!(b.starts_with("o_h"));
        assert_eq!(c, "'x.y'");
        assert_ne!(d, "p");
        assert_eq!(e, "pi_0");
        assert_eq!(m.mangle("O"), "o");
    }

    #[test]
    fn arity_clash_reported() {
        let f1 = FolFormula::provable(FolTerm::fun("f", vec![FolTerm::cnst("a")]));
        let f2 = FolFormula::provable(FolTerm::cnst("f"));
        let p = Problem::new(
            vec![LabeledAxiom::new("a1", Role::Axiom, f1)],
            LabeledAxiom::new("goal", Role::Conjecture, f2),
        );
        match to_tptp(&p) {
            Err(FolError::ArityClash { symbol, first, second }) => {
                assert_eq!(symbol, "f");
                assert!(first.contains("a1") && second.contains("goal"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reader_roundtrip_on_emitted_text() {
        let x = FolTerm::var("x");
        let f = FolFormula::forall(
            "x",
            FolFormula::iff(
                FolFormula::not(FolFormula::eq(x.clone(), FolTerm::cnst("O"))),
                FolFormula::exists(
                    "y",
                    FolFormula::and(
                        FolFormula::has_type(FolTerm::var("y"), FolTerm::cnst("nat")),
                        FolFormula::or(FolFormula::Bottom, FolFormula::Top),
                    ),
                ),
            ),
        );
        let p = Problem::new(
            vec![LabeledAxiom::new("ax.1", Role::Axiom, f).with_origin("nat", OriginKind::Inversion)],
            LabeledAxiom::new("goal", Role::Conjecture, FolFormula::provable(FolTerm::cnst("'pi_0"))),
        );
        let text = to_tptp(&p).unwrap();
        let back = parse_tptp(&text).unwrap();
        assert_eq!(to_tptp(&back).unwrap(), text);
        assert_eq!(back.axioms[0].origin.as_ref().unwrap().kind, OriginKind::Inversion);
    }
}
