//! Lambda terms over predicates, with de Bruijn indices.
//!
//! Lexicon syntax:
//!
//! ```text
//! term := '\' ident '.' term | atom
//! atom := '(' head atom* ')' | ident | "string" | integer
//! head := predicate-name | variable
//! ```
//!
//! A predicate head builds a node and must receive exactly its arity; a
//! variable head is curried application. Bare predicate names must be nullary.

use std::fmt;

use crate::logic::{Expr, Predicate};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    Lam(Box<Term>),
    App(Box<Term>, Box<Term>),
    Node(Predicate, Vec<Term>),
    Str(String),
    Int(i64),
}

impl Term {
    pub fn lam(body: Term) -> Term {
        Term::Lam(Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Number of leading binders.
    pub fn binders(&self) -> usize {
        match self {
            Term::Lam(b) => 1 + b.binders(),
            _ => 0,
        }
    }

    pub fn shift(&self, d: isize, cutoff: usize) -> Term {
        match self {
            Term::Var(k) if *k >= cutoff => Term::Var((*k as isize + d) as usize),
            Term::Var(k) => Term::Var(*k),
            Term::Lam(b) => Term::lam(b.shift(d, cutoff + 1)),
            Term::App(f, a) => Term::app(f.shift(d, cutoff), a.shift(d, cutoff)),
            Term::Node(p, c) => Term::Node(*p, c.iter().map(|t| t.shift(d, cutoff)).collect()),
            t => t.clone(),
        }
    }

    fn subst(&self, j: usize, s: &Term) -> Term {
        match self {
            Term::Var(k) if *k == j => s.clone(),
            Term::Var(k) => Term::Var(*k),
            Term::Lam(b) => Term::lam(b.subst(j + 1, &s.shift(1, 0))),
            Term::App(f, a) => Term::app(f.subst(j, s), a.subst(j, s)),
            Term::Node(p, c) => Term::Node(*p, c.iter().map(|t| t.subst(j, s)).collect()),
            t => t.clone(),
        }
    }

    /// Full beta normal form.
    pub fn normalize(&self) -> Term {
        match self {
            Term::App(f, a) => {
                let f = f.normalize();
                let a = a.normalize();
                match f {
                    Term::Lam(body) => body.subst(0, &a.shift(1, 0)).shift(-1, 0).normalize(),
                    f => Term::app(f, a),
                }
            }
            Term::Lam(b) => Term::lam(b.normalize()),
            Term::Node(p, c) => Term::Node(*p, c.iter().map(Term::normalize).collect()),
            t => t.clone(),
        }
    }

    /// Whether the term is a plain expression tree (no variables, binders or
    /// pending applications).
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) | Term::Lam(_) | Term::App(..) => false,
            Term::Node(_, c) => c.iter().all(Term::is_ground),
            Term::Str(_) | Term::Int(_) => true,
        }
    }

    pub fn to_expr(&self) -> Option<Expr> {
        Some(match self {
            Term::Node(p, c) => Expr::node(*p, c.iter().map(Term::to_expr).collect::<Option<_>>()?),
            Term::Str(s) => Expr::Str(s.clone()),
            Term::Int(n) => Expr::Int(*n),
            _ => return None,
        })
    }

    /// False if some ground subtree fails type checking, so the term can never
    /// become a valid form.
    pub fn well_typed(&self) -> bool {
        match self {
            Term::Node(..) if self.is_ground() => crate::logic::validate(&self.to_expr().expect("ground")).is_ok(),
            Term::Node(_, c) => c.iter().all(Term::well_typed),
            Term::Lam(b) => b.well_typed(),
            Term::App(f, a) => f.well_typed() && a.well_typed(),
            _ => true,
        }
    }

    pub fn parse(src: &str) -> Result<Term, String> {
        let toks = lex(src)?;
        let mut p = TermParser { toks, pos: 0, scope: Vec::new() };
        let t = p.term()?;
        if p.pos != p.toks.len() {
            return Err(format!("unexpected {:?}", p.toks[p.pos]));
        }
        Ok(t)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Term, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Term::Var(k) => write!(f, "v{}", depth - 1 - k),
                Term::Lam(b) => {
                    write!(f, "\\v{depth}.")?;
                    go(b, depth + 1, f)
                }
                Term::App(a, b) => {
                    f.write_str("(")?;
                    go(a, depth, f)?;
                    f.write_str(" ")?;
                    go(b, depth, f)?;
                    f.write_str(")")
                }
                Term::Node(p, c) if c.is_empty() => write!(f, "{p}"),
                Term::Node(p, c) => {
                    write!(f, "({p}")?;
                    for x in c {
                        f.write_str(" ")?;
                        go(x, depth, f)?;
                    }
                    f.write_str(")")
                }
                Term::Str(s) => write!(f, "{s:?}"),
                Term::Int(n) => write!(f, "{n}"),
            }
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    Open,
    Close,
    Ident(String),
    Str(String),
    Int(i64),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '\\' => {
                out.push(Tok::Lambda);
                i += 1
            }
            '.' => {
                out.push(Tok::Dot);
                i += 1
            }
            '(' => {
                out.push(Tok::Open);
                i += 1
            }
            ')' => {
                out.push(Tok::Close);
                i += 1
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                while i < cs.len() && cs[i] != '"' {
                    s.push(cs[i]);
                    i += 1;
                }
                if i == cs.len() {
                    return Err("unterminated string".into());
                }
                i += 1;
                out.push(Tok::Str(s));
            }
            _ if c.is_ascii_digit() || c == '-' => {
                let start = i;
                i += 1;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                out.push(Tok::Int(s.parse().map_err(|_| format!("bad integer {s:?}"))?));
            }
            _ if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[start..i].iter().collect()));
            }
            _ => return Err(format!("unexpected character {c:?}")),
        }
    }
    Ok(out)
}

struct TermParser {
    toks: Vec<Tok>,
    pos: usize,
    scope: Vec<String>,
}

impl TermParser {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn term(&mut self) -> Result<Term, String> {
        if self.peek() == Some(&Tok::Lambda) {
            self.pos += 1;
            let Some(Tok::Ident(name)) = self.next() else {
                return Err("expected a variable after '\\'".into());
            };
            if self.next() != Some(Tok::Dot) {
                return Err("expected '.' after binder".into());
            }
            self.scope.push(name);
            let body = self.term();
            self.scope.pop();
            return Ok(Term::lam(body?));
        }
        self.atom()
    }

    fn var(&self, name: &str) -> Option<Term> {
        self.scope.iter().rev().position(|s| s == name).map(Term::Var)
    }

    fn atom(&mut self) -> Result<Term, String> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(Term::Str(s)),
            Some(Tok::Int(n)) => Ok(Term::Int(n)),
            Some(Tok::Ident(name)) => {
                if let Some(v) = self.var(&name) {
                    return Ok(v);
                }
                match Predicate::from_name(&name) {
                    Some(p) if p.arity() == 0 => Ok(Term::Node(p, vec![])),
                    Some(p) => Err(format!("{p} needs {} argument(s)", p.arity())),
                    None => Err(format!("unbound name {name:?}")),
                }
            }
            Some(Tok::Open) => {
                let head = match self.next() {
                    Some(Tok::Ident(h)) => h,
                    other => return Err(format!("expected a head, found {other:?}")),
                };
                let mut args = Vec::new();
                while self.peek().is_some_and(|t| *t != Tok::Close) {
                    args.push(if self.peek() == Some(&Tok::Lambda) { self.term()? } else { self.atom()? });
                }
                if self.next() != Some(Tok::Close) {
                    return Err("missing ')'".into());
                }
                if let Some(v) = self.var(&head) {
                    return Ok(args.into_iter().fold(v, Term::app));
                }
                let p = Predicate::from_name(&head).ok_or_else(|| format!("unknown predicate {head:?}"))?;
                if args.len() != p.arity() {
                    return Err(format!("{p} takes {} argument(s), found {}", p.arity(), args.len()));
                }
                Ok(Term::Node(p, args))
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sexpr;

    #[test]
    fn parse_and_reduce() {
        let f = Term::parse(r"\x.\y.(Is y (Left x))").unwrap();
        assert_eq!(f.binders(), 2);
        let t = Term::app(Term::app(f, Term::Node(Predicate::ArgY, vec![])), Term::Str("fair".into()));
        let e = t.normalize().to_expr().unwrap();
        assert_eq!(sexpr::print(&e), r#"(Is "fair" (Left ArgY))"#);
        assert!(!t.normalize().well_typed());
    }

    #[test]
    fn composition_under_binders() {
        // \z. f (g z) with f = \m.(Direct m), g = \y.(Left y)
        let f = Term::parse(r"\m.(Direct m)").unwrap();
        let g = Term::parse(r"\y.(Left y)").unwrap();
        let comp = Term::lam(Term::app(f.shift(1, 0), Term::app(g.shift(1, 0), Term::Var(0)))).normalize();
        assert_eq!(comp, Term::parse(r"\y.(Direct (Left y))").unwrap());
    }

    #[test]
    fn errors() {
        assert!(Term::parse(r"\x.(Is x)").is_err());
        assert!(Term::parse(r"\x.(Foo x)").is_err());
        assert!(Term::parse("y").is_err());
        assert!(Term::parse("Left").is_err());
        assert_eq!(Term::parse("ArgX").unwrap(), Term::Node(Predicate::ArgX, vec![]));
    }

    #[test]
    fn variable_heads_apply() {
        let t = Term::parse(r"\f.\x.(f x x)").unwrap();
        assert_eq!(t, Term::lam(Term::lam(Term::app(Term::app(Term::Var(1), Term::Var(0)), Term::Var(0)))));
    }
}
