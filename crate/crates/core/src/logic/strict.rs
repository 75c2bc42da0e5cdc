//! Boolean executor: exact keyword matching, strict positions and counts.
//!
//! This is deliberately written over position *sets* rather than the vectors
//! used by the soft executor, so the two can cross-check each other.

use std::collections::BTreeSet;

use super::expr::Expr;
use super::instance::{Instance, Span};
use super::predicate::Predicate;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Val {
    Bool(bool),
    Str(Vec<String>),
    /// Locations of an anchor or all exact occurrences of a phrase.
    Places(Vec<Span>),
    Int(i64),
    Positions(BTreeSet<usize>),
    /// Positions on one side of a set of places, with the smallest distance
    /// to any of them.
    Side(Vec<(usize, usize)>),
}

/// Exact occurrences of a phrase in the lowercased sentence.
pub fn phrase_occurrences(x: &Instance, phrase: &[String]) -> Vec<Span> {
    let toks = x.lower();
    let mut out = Vec::new();
    if phrase.is_empty() || phrase.len() > toks.len() {
        return out;
    }
    'outer: for start in 0..=toks.len() - phrase.len() {
        for (k, w) in phrase.iter().enumerate() {
            if toks[start + k] != *w {
                continue 'outer;
            }
        }
        out.push(Span::new(start, start + phrase.len()));
    }
    out
}

/// Lowercased tokens of a query literal.
pub fn query_tokens(s: &str) -> Vec<String> {
    super::instance::tokenize(s).into_iter().map(|t| t.to_lowercase()).collect()
}

fn places(v: Val, x: &Instance) -> Vec<Span> {
    match v {
        Val::Places(p) => p,
        Val::Str(q) => phrase_occurrences(x, &q),
        _ => unreachable!("validated form"),
    }
}

fn side(places: &[Span], n: usize, left: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..n {
        let best = places
            .iter()
            .filter_map(|s| {
                if left && p < s.start {
                    Some(s.start - p)
                } else if !left && p >= s.end {
                    Some(p + 1 - s.end)
                } else {
                    None
                }
            })
            .min();
        if let Some(d) = best {
            out.push((p, d));
        }
    }
    out
}

fn holds(pred: Predicate, value: i64, bound: i64) -> bool {
    match pred {
        Predicate::AtMost => value <= bound,
        Predicate::AtLeast => value >= bound,
        Predicate::MoreThan => value > bound,
        Predicate::LessThan => value < bound,
        Predicate::Equals => value == bound,
        _ => unreachable!(),
    }
}

fn eval(e: &Expr, x: &Instance) -> Result<Val> {
    let (p, c) = match e {
        Expr::Int(n) => return Ok(Val::Int(*n)),
        Expr::Str(s) | Expr::Token(s) => return Ok(Val::Str(query_tokens(s))),
        Expr::Node(p, c) => (*p, c),
    };
    use Predicate::*;
    let arg = |i: usize| eval(&c[i], x);
    let bool_of = |v: Val| match v {
        Val::Bool(b) => b,
        _ => unreachable!("validated form"),
    };
    Ok(match p {
        True => Val::Bool(true),
        False => Val::Bool(false),
        ArgX | ArgY | Arg => Val::Places(vec![x.anchor(p.anchor_role().unwrap())?]),
        Because => arg(0)?,
        And | Separator => Val::Bool(bool_of(arg(0)?) && bool_of(arg(1)?)),
        Or => Val::Bool(bool_of(arg(0)?) || bool_of(arg(1)?)),
        Not => Val::Bool(!bool_of(arg(0)?)),
        Is => {
            let hits: BTreeSet<usize> = match arg(0)? {
                Val::Positions(s) => s,
                Val::Places(spans) => spans.iter().flat_map(|s| s.start..s.end).collect(),
                _ => unreachable!(),
            };
            let mask: BTreeSet<usize> = match arg(1)? {
                Val::Positions(s) => s,
                Val::Side(v) => v.into_iter().map(|(i, _)| i).collect(),
                _ => unreachable!(),
            };
            Val::Bool(!hits.is_disjoint(&mask))
        }
        Occur => match arg(0)? {
            Val::Positions(s) => Val::Bool(!s.is_empty()),
            _ => unreachable!(),
        },
        Word => {
            let q = places(arg(0)?, x);
            Val::Positions(q.iter().flat_map(|s| s.start..s.end).collect())
        }
        Contains => {
            let anchor = places(arg(0)?, x)[0];
            let q = places(arg(1)?, x);
            Val::Positions(q.iter().flat_map(|s| s.start..s.end).filter(|i| anchor.contains(*i)).collect())
        }
        Link => {
            let q = places(arg(0)?, x);
            let between = between_set(&places(arg(1)?, x), &places(arg(2)?, x));
            Val::Positions(q.iter().flat_map(|s| s.start..s.end).filter(|i| between.contains(i)).collect())
        }
        Left | Right => Val::Side(side(&places(arg(0)?, x), x.len(), p == Left)),
        Between => Val::Positions(between_set(&places(arg(0)?, x), &places(arg(1)?, x))),
        Within => {
            let pl = places(arg(0)?, x);
            let k = match arg(1)? {
                Val::Int(k) => k,
                _ => unreachable!(),
            };
            let mut set = BTreeSet::new();
            for (i, d) in side(&pl, x.len(), true).into_iter().chain(side(&pl, x.len(), false)) {
                let inside = pl.iter().any(|s| s.contains(i));
                if !inside && (d as i64) <= k {
                    set.insert(i);
                }
            }
            Val::Positions(set)
        }
        NumberOf => match arg(0)? {
            Val::Positions(s) => Val::Int(s.len() as i64),
            Val::Side(v) => Val::Int(v.len() as i64),
            _ => unreachable!(),
        },
        AtMost | AtLeast | MoreThan | LessThan | Equals => {
            let bound = match arg(1)? {
                Val::Int(n) => n,
                _ => unreachable!(),
            };
            match arg(0)? {
                Val::Int(v) => Val::Bool(holds(p, v, bound)),
                Val::Side(v) => {
                    Val::Positions(v.into_iter().filter(|&(_, d)| holds(p, d as i64, bound)).map(|(i, _)| i).collect())
                }
                _ => unreachable!(),
            }
        }
        Direct => match arg(0)? {
            Val::Side(v) => Val::Positions(v.into_iter().filter(|&(_, d)| d == 1).map(|(i, _)| i).collect()),
            _ => unreachable!(),
        },
        Int | Token | String => unreachable!("literal nodes rejected by validation"),
    })
}

fn between_set(a: &[Span], b: &[Span]) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    for sa in a {
        for sb in b {
            let (lo, hi) = if sa.start <= sb.start { (sa, sb) } else { (sb, sa) };
            for i in lo.end..hi.start {
                set.insert(i);
            }
        }
    }
    set
}

/// Strictly executes a boolean form on an instance.
///
/// The form must already be validated (e.g. by constructing a
/// [`LogicalForm`](super::LogicalForm)); only anchor lookups can fail.
pub fn exec_strict(form: &Expr, x: &Instance) -> Result<bool> {
    match eval(form, x)? {
        Val::Bool(b) => Ok(b),
        _ => Err(Error::InvalidForm(vec![super::TypeError { path: vec![], message: "form is not boolean".into() }])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sexpr::parse;

    fn sent(text: &str) -> Instance {
        Instance::from_text("t", text).unwrap()
    }

    #[test]
    fn directly_preceded_example() {
        let form = parse(r#"(Is (Word "fair") (Direct (Left "price")))"#).unwrap();
        let src = sent("Quality ingredients preparation all around, and a very fair price for NYC");
        assert!(exec_strict(&form, &src).unwrap());
        let other = sent("Decent sushi at a fair enough price");
        assert!(!exec_strict(&form, &other).unwrap());
    }

    #[test]
    fn false_leaf_never_matches() {
        let form = parse(r#"(And (Occur (Word "fair")) False)"#).unwrap();
        assert!(!exec_strict(&form, &sent("fair price")).unwrap());
    }

    #[test]
    fn anchor_missing() {
        let form = parse(r#"(Is (Word "coach") (Between ArgX ArgY))"#).unwrap();
        let x = sent("the coach spoke");
        assert!(matches!(exec_strict(&form, &x), Err(Error::AnchorMissing(_))));
    }

    #[test]
    fn between_and_counts() {
        let x = sent("OBJ-ORGANIZATION coach SUBJ-PERSON insisted he would");
        let f = parse(r#"(And (Equals (NumberOf (Between ArgX ArgY)) 1) (Is (Word "coach") (Between ArgX ArgY)))"#)
            .unwrap();
        assert!(exec_strict(&f, &x).unwrap());
        let g = parse(r#"(Is (Word "insisted") (AtMost (Right ArgX) 1))"#).unwrap();
        assert!(exec_strict(&g, &x).unwrap());
        let h = parse(r#"(Is (Word "would") (AtMost (Right ArgX) 2))"#).unwrap();
        assert!(!exec_strict(&h, &x).unwrap());
    }

    #[test]
    fn within_is_edge_inclusive() {
        let x = sent("a b TERM c d");
        let f = parse(r#"(Is (Word "a") (Within Arg 2))"#).unwrap();
        assert!(exec_strict(&f, &x).unwrap());
        let g = parse(r#"(Is (Word "a") (Within Arg 1))"#).unwrap();
        assert!(!exec_strict(&g, &x).unwrap());
    }

    #[test]
    fn multiword_phrase() {
        let x = sent("X is a OBJ-NATIONALITY citizen");
        let f = parse(r#"(And (Is (Word "is a") (Direct (Left ArgY))) (Is (Word "citizen") (Direct (Right ArgY))))"#)
            .unwrap();
        assert!(exec_strict(&f, &x).unwrap());
    }
}
