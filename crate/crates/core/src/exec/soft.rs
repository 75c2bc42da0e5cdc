use super::fuzzy::{and, not, or};
use super::mask::{between, counting_from_distances, side_distances, CountConstraint, CountOp, Side};
use super::{MatchResult, SoftConfig, StringMatcher};
use crate::error::Result;
use crate::logic::{phrase_occurrences, query_tokens, Expr, Instance, LogicalForm, Predicate, Span};

#[derive(Debug, Clone)]
enum SVal {
    Score(f64),
    Str(Vec<String>),
    Places(Vec<Span>),
    Int(i64),
    Seq(Vec<f64>),
    Dist(Vec<Option<usize>>),
    Mask(Vec<f64>),
}

/// What one node evaluated to, for visualisation.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTrace {
    pub path: Vec<usize>,
    pub expr: String,
    pub score: Option<f64>,
    pub per_token: Option<Vec<f64>>,
}

struct Ctx<'a, M: ?Sized> {
    x: &'a Instance,
    matcher: &'a M,
    cfg: &'a SoftConfig,
    trace: Option<&'a mut Vec<NodeTrace>>,
}

fn max_pool(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

impl<M: StringMatcher + ?Sized> Ctx<'_, M> {
    fn places(&self, v: SVal) -> Vec<Span> {
        match v {
            SVal::Places(p) => p,
            SVal::Str(q) => phrase_occurrences(self.x, &q),
            _ => unreachable!("validated form"),
        }
    }

    fn score(&mut self, e: &Expr, path: &mut Vec<usize>, i: usize) -> Result<f64> {
        match self.eval_child(e, path, i)? {
            SVal::Score(s) => Ok(s),
            _ => unreachable!("validated form"),
        }
    }

    fn eval_child(&mut self, e: &Expr, path: &mut Vec<usize>, i: usize) -> Result<SVal> {
        path.push(i);
        let r = self.eval(e, path);
        path.pop();
        r
    }

    fn eval(&mut self, e: &Expr, path: &mut Vec<usize>) -> Result<SVal> {
        let v = self.eval_node(e, path)?;
        if let Some(t) = self.trace.as_deref_mut() {
            let (score, per_token) = match &v {
                SVal::Score(s) => (Some(*s), None),
                SVal::Seq(s) | SVal::Mask(s) => (None, Some(s.clone())),
                SVal::Dist(d) => (None, Some(d.iter().map(|d| if d.is_some() { 1.0 } else { 0.0 }).collect())),
                _ => (None, None),
            };
            if score.is_some() || per_token.is_some() {
                t.push(NodeTrace { path: path.clone(), expr: e.to_string(), score, per_token });
            }
        }
        Ok(v)
    }

    fn eval_node(&mut self, e: &Expr, path: &mut Vec<usize>) -> Result<SVal> {
        use Predicate::*;
        let (p, c) = match e {
            Expr::Int(n) => return Ok(SVal::Int(*n)),
            Expr::Str(s) | Expr::Token(s) => return Ok(SVal::Str(query_tokens(s))),
            Expr::Node(p, c) => (*p, c.as_slice()),
        };
        let n = self.x.len();
        Ok(match p {
            True => SVal::Score(1.0),
            False => SVal::Score(0.0),
            ArgX | ArgY | Arg => SVal::Places(vec![self.x.anchor(p.anchor_role().unwrap())?]),
            Because => SVal::Score(self.score(&c[0], path, 0)?),
            And | Separator => {
                let a = self.score(&c[0], path, 0)?;
                SVal::Score(and(a, self.score(&c[1], path, 1)?))
            }
            Or => {
                let a = self.score(&c[0], path, 0)?;
                SVal::Score(or(a, self.score(&c[1], path, 1)?))
            }
            Not => SVal::Score(not(self.score(&c[0], path, 0)?)),
            Is => {
                let seq = match self.eval_child(&c[0], path, 0)? {
                    SVal::Seq(s) => s,
                    SVal::Places(pl) => {
                        let mut s = vec![0.0; n];
                        for sp in pl {
                            s[sp.start..sp.end].iter_mut().for_each(|v| *v = 1.0);
                        }
                        s
                    }
                    _ => unreachable!(),
                };
                let mask = self.mask_of(&c[1], path, 1)?;
                SVal::Score(max_pool(seq.iter().zip(&mask).map(|(s, m)| s * m)))
            }
            Occur => match self.eval_child(&c[0], path, 0)? {
                SVal::Seq(s) => SVal::Score(max_pool(s)),
                _ => unreachable!(),
            },
            Word => {
                let q = self.str_arg(&c[0], path, 0)?;
                SVal::Seq(self.matcher.string_match_scores(self.x, &q)?.0)
            }
            Contains => {
                let anchor = self.eval_child(&c[0], path, 0)?;
                let anchor = self.places(anchor);
                let q = self.str_arg(&c[1], path, 1)?;
                let mut s = self.matcher.string_match_scores(self.x, &q)?.0;
                for (i, v) in s.iter_mut().enumerate() {
                    if !anchor.iter().any(|a| a.contains(i)) {
                        *v = 0.0;
                    }
                }
                SVal::Seq(s)
            }
            Link => {
                let q = self.str_arg(&c[0], path, 0)?;
                let a = self.eval_child(&c[1], path, 1)?;
                let a = self.places(a);
                let b = self.eval_child(&c[2], path, 2)?;
                let b = self.places(b);
                let s = self.matcher.string_match_scores(self.x, &q)?.0;
                let m = between(&a, &b, n);
                SVal::Seq(s.iter().zip(&m).map(|(s, m)| s * m).collect())
            }
            Left | Right => {
                let pl = self.eval_child(&c[0], path, 0)?;
                let pl = self.places(pl);
                let side = if p == Left { Side::Left } else { Side::Right };
                SVal::Dist(side_distances(&pl, n, side))
            }
            Between => {
                let a = self.eval_child(&c[0], path, 0)?;
                let a = self.places(a);
                let b = self.eval_child(&c[1], path, 1)?;
                let b = self.places(b);
                SVal::Mask(between(&a, &b, n))
            }
            Within => {
                let pl = self.eval_child(&c[0], path, 0)?;
                let pl = self.places(pl);
                let k = self.int_arg(&c[1], path, 1)?;
                let m = super::mask::deterministic_mask(self.x, super::mask::DetFn::Within(&pl, k));
                SVal::Mask(m.0)
            }
            NumberOf => {
                let m = self.mask_of(&c[0], path, 0)?;
                SVal::Int(m.iter().filter(|&&v| v == 1.0).count() as i64)
            }
            AtMost | AtLeast | MoreThan | LessThan | Equals => {
                let op = CountOp::from_predicate(p).unwrap();
                let bound = self.int_arg(&c[1], path, 1)?;
                let cons = CountConstraint { op, bound };
                match self.eval_child(&c[0], path, 0)? {
                    SVal::Dist(d) => SVal::Mask(counting_from_distances(&d, cons, self.cfg)),
                    SVal::Int(v) => SVal::Score(super::mask::count_score(cons, v, self.cfg)),
                    _ => unreachable!(),
                }
            }
            Direct => match self.eval_child(&c[0], path, 0)? {
                SVal::Dist(d) => SVal::Mask(counting_from_distances(&d, CountConstraint::DIRECT, self.cfg)),
                _ => unreachable!(),
            },
            Int | Token | String => unreachable!("literal nodes rejected by validation"),
        })
    }

    fn mask_of(&mut self, e: &Expr, path: &mut Vec<usize>, i: usize) -> Result<Vec<f64>> {
        Ok(match self.eval_child(e, path, i)? {
            SVal::Mask(m) => m,
            SVal::Dist(d) => d.iter().map(|d| if d.is_some() { 1.0 } else { 0.0 }).collect(),
            _ => unreachable!(),
        })
    }

    fn str_arg(&mut self, e: &Expr, path: &mut Vec<usize>, i: usize) -> Result<Vec<String>> {
        match self.eval_child(e, path, i)? {
            SVal::Str(s) => Ok(s),
            _ => unreachable!(),
        }
    }

    fn int_arg(&mut self, e: &Expr, path: &mut Vec<usize>, i: usize) -> Result<i64> {
        match self.eval_child(e, path, i)? {
            SVal::Int(k) => Ok(k),
            _ => unreachable!(),
        }
    }
}

/// Soft score of a validated boolean expression.
pub fn soft_score<M: StringMatcher + ?Sized>(e: &Expr, x: &Instance, matcher: &M, cfg: &SoftConfig) -> Result<f64> {
    let mut ctx = Ctx { x, matcher, cfg, trace: None };
    match ctx.eval(e, &mut Vec::new())? {
        SVal::Score(s) => Ok(s.clamp(0.0, 1.0)),
        _ => unreachable!("form roots are boolean"),
    }
}

/// Like [`soft_score`] but also records every scored node in post-order.
pub fn soft_trace<M: StringMatcher + ?Sized>(
    e: &Expr,
    x: &Instance,
    matcher: &M,
    cfg: &SoftConfig,
) -> Result<(f64, Vec<NodeTrace>)> {
    let mut trace = Vec::new();
    let mut ctx = Ctx { x, matcher, cfg, trace: Some(&mut trace) };
    let s = match ctx.eval(e, &mut Vec::new())? {
        SVal::Score(s) => s.clamp(0.0, 1.0),
        _ => unreachable!("form roots are boolean"),
    };
    Ok((s, trace))
}

/// Softly executes a labeling function on an instance.
pub fn exec_soft<M: StringMatcher + ?Sized>(
    form: &LogicalForm,
    x: &Instance,
    matcher: &M,
    cfg: &SoftConfig,
) -> Result<MatchResult> {
    Ok(MatchResult {
        form_id: form.id.clone(),
        score: soft_score(form.root(), x, matcher, cfg)?,
        label: form.label().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ExactMatcher;
    use crate::logic::sexpr::parse;

    fn form(s: &str) -> LogicalForm {
        LogicalForm::new("f", parse(s).unwrap(), "positive").unwrap()
    }

    #[test]
    fn source_sentence_scores_one() {
        let f = form(r#"(Is (Word "fair") (Direct (Left "price")))"#);
        let x = Instance::from_text("x", "Quality ingredients preparation all around, and a very fair price for NYC")
            .unwrap();
        let r = exec_soft(&f, &x, &ExactMatcher, &SoftConfig::default()).unwrap();
        assert_eq!(r.score, 1.0);
        assert_eq!(r.label, "positive");
    }

    #[test]
    fn slack_gives_mu() {
        let f = form(r#"(Is (Word "fair") (Direct (Left "price")))"#);
        let x = Instance::from_text("x", "Decent sushi at a fair enough price").unwrap();
        let cfg = SoftConfig { mu: 0.5, slack_width: 1 };
        assert_eq!(exec_soft(&f, &x, &ExactMatcher, &cfg).unwrap().score, 0.5);
        let strict = SoftConfig { mu: 0.5, slack_width: 0 };
        assert_eq!(exec_soft(&f, &x, &ExactMatcher, &strict).unwrap().score, 0.0);
    }

    #[test]
    fn no_candidate_tokens_scores_zero() {
        let f = form(r#"(Or (Occur (Word "fair")) (Is (Word "cheap") (Right Arg)))"#);
        let x = Instance::from_text("x", "TERM was awful").unwrap();
        assert_eq!(exec_soft(&f, &x, &ExactMatcher, &SoftConfig::default()).unwrap().score, 0.0);
    }

    #[test]
    fn trace_records_clauses() {
        let f = parse(r#"(And (Occur (Word "a")) (Not (Occur (Word "b"))))"#).unwrap();
        let x = Instance::from_text("x", "a c").unwrap();
        let (s, trace) = soft_trace(&f, &x, &ExactMatcher, &SoftConfig::default()).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(trace.last().unwrap().path, Vec::<usize>::new());
        assert!(trace.iter().any(|t| t.path == vec![0, 0] && t.per_token == Some(vec![1.0, 0.0])));
    }
}
