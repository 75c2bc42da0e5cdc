//! Text format for logical forms.
//!
//! ```text
//! expr    := INT | STRING | NAME | '(' NAME expr* ')' | '(' "Token" STRING ')'
//! INT     := '-'? [0-9]+
//! STRING  := '"' ( [^"\\] | '\\' ["\\] )* '"'
//! NAME    := predicate name, e.g. And, Word, ArgY
//! ```
//!
//! A bare string is a `String` literal and a bare integer an `Int` literal.
//! Zero-argument predicates print bare (`ArgY`, `True`). Printing is canonical:
//! single spaces, no trailing whitespace, so `parse(print(e)) == e` and
//! `print(parse(s)) == s` for canonical `s`.

use std::fmt;

use super::expr::Expr;
use super::predicate::Predicate;
use crate::error::{Error, Result};

pub(crate) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Str(s) => write_quoted(s, f),
        Expr::Token(s) => {
            f.write_str("(Token ")?;
            write_quoted(s, f)?;
            f.write_str(")")
        }
        Expr::Node(p, c) if c.is_empty() => f.write_str(p.name()),
        Expr::Node(p, c) => {
            write!(f, "({}", p.name())?;
            for child in c {
                f.write_str(" ")?;
                write_expr(child, f)?;
            }
            f.write_str(")")
        }
    }
}

fn write_quoted(s: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("\"")?;
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{ch}")?;
    }
    f.write_str("\"")
}

pub fn print(e: &Expr) -> String {
    e.to_string()
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let name_pos = self.pos;
                let name = self.name()?;
                let pred = Predicate::from_name(&name)
                    .ok_or(Error::Syntax { pos: name_pos, msg: format!("unknown predicate {name}") })?;
                let expr = match pred {
                    Predicate::Token | Predicate::String => {
                        self.skip_ws();
                        let s = self.string()?;
                        if pred == Predicate::Token {
                            Expr::Token(s)
                        } else {
                            Expr::Str(s)
                        }
                    }
                    Predicate::Int => {
                        self.skip_ws();
                        Expr::Int(self.int()?)
                    }
                    _ => {
                        let mut children = Vec::new();
                        loop {
                            self.skip_ws();
                            match self.peek() {
                                Some(b')') => break,
                                None => return Err(self.err("unclosed parenthesis")),
                                _ => children.push(self.expr()?),
                            }
                        }
                        Expr::Node(pred, children)
                    }
                };
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(expr)
            }
            Some(b'"') => Ok(Expr::Str(self.string()?)),
            Some(c) if c == b'-' || c.is_ascii_digit() => Ok(Expr::Int(self.int()?)),
            Some(_) => {
                let name_pos = self.pos;
                let name = self.name()?;
                match Predicate::from_name(&name) {
                    Some(p) if !p.is_literal() => Ok(Expr::Node(p, Vec::new())),
                    _ => Err(Error::Syntax { pos: name_pos, msg: format!("unknown atom {name}") }),
                }
            }
        }
    }

    fn name(&mut self) -> Result<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax { pos: start, msg: "bad integer".into() })
    }

    fn string(&mut self) -> Result<String> {
        if self.peek() != Some(b'"') {
            return Err(self.err("expected '\"'"));
        }
        self.pos += 1;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated string")),
                Some(b'"') => {
                    self.pos += 1;
                    break;
                }
                Some(b'\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ (b'"' | b'\\')) => {
                            out.push(c);
                            self.pos += 1;
                        }
                        _ => return Err(self.err("bad escape")),
                    }
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
        String::from_utf8(out).map_err(|_| self.err("invalid utf-8 in string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_prints() {
        let src = r#"(And (Is (Word "fair") (Direct (Left "price"))) (Not False))"#;
        let e = parse(src).unwrap();
        assert_eq!(print(&e), src);
    }

    #[test]
    fn literals() {
        assert_eq!(parse("3").unwrap(), Expr::Int(3));
        assert_eq!(parse("(Int -2)").unwrap(), Expr::Int(-2));
        assert_eq!(parse(r#"(String "a b")"#).unwrap(), Expr::str("a b"));
        assert_eq!(parse(r#"(Token "x")"#).unwrap(), Expr::Token("x".into()));
        assert_eq!(print(&Expr::str(r#"say "hi""#)), r#""say \"hi\"""#);
    }

    #[test]
    fn errors() {
        assert!(parse("(And True").is_err());
        assert!(parse("(Foo True)").is_err());
        assert!(parse("True False").is_err());
        assert!(parse("Int").is_err());
        assert!(parse("\"open").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            any::<i16>().prop_map(|n| Expr::Int(n as i64)),
            "[a-z \"\\\\]{0,6}".prop_map(Expr::Str),
            "[a-z]{1,4}".prop_map(Expr::Token),
            prop::sample::select(vec![
                Predicate::ArgX,
                Predicate::ArgY,
                Predicate::Arg,
                Predicate::True,
                Predicate::False
            ])
            .prop_map(Expr::leaf),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            (
                prop::sample::select(vec![
                    Predicate::And,
                    Predicate::Or,
                    Predicate::Not,
                    Predicate::Is,
                    Predicate::Left,
                    Predicate::Word,
                ]),
                prop::collection::vec(inner, 1..4),
            )
                .prop_map(|(p, c)| Expr::node(p, c))
        })
    }

    proptest! {
        // Syntax round-trip holds for ill-typed trees too.
        #[test]
        fn round_trip(e in arb_expr()) {
            let s = print(&e);
            prop_assert_eq!(parse(&s).unwrap(), e);
        }
    }
}
