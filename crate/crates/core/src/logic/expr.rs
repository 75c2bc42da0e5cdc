use std::fmt;

use super::predicate::{ModuleClass, Predicate, Type};
use crate::error::{Error, Result};

/// A logical-form expression tree.
///
/// Literal leaves (`Int`, `Str`, `Token`) carry their payload directly; every
/// other predicate is a `Node` whose children are checked against the
/// predicate's signatures by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Int(i64),
    /// A phrase literal (`String` predicate).
    Str(String),
    /// A single-token literal (`Token` predicate).
    Token(String),
    Node(Predicate, Vec<Expr>),
}

impl Expr {
    pub fn node(p: Predicate, children: Vec<Expr>) -> Expr {
        Expr::Node(p, children)
    }

    pub fn leaf(p: Predicate) -> Expr {
        Expr::Node(p, Vec::new())
    }

    pub fn str(s: impl Into<String>) -> Expr {
        Expr::Str(s.into())
    }

    pub fn predicate(&self) -> Predicate {
        match self {
            Expr::Int(_) => Predicate::Int,
            Expr::Str(_) => Predicate::String,
            Expr::Token(_) => Predicate::Token,
            Expr::Node(p, _) => *p,
        }
    }

    pub fn children(&self) -> &[Expr] {
        match self {
            Expr::Node(_, c) => c,
            _ => &[],
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Anchor roles referenced anywhere in the tree.
    pub fn anchor_roles(&self) -> Vec<super::AnchorRole> {
        let mut roles = Vec::new();
        self.walk(&mut |e| {
            if let Some(r) = e.predicate().anchor_role() {
                if !roles.contains(&r) {
                    roles.push(r);
                }
            }
        });
        roles
    }

    /// Query strings of every string-matching predicate, in pre-order.
    pub fn queries(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Node(p, c) = e {
                let lit = match p {
                    Predicate::Word | Predicate::Link => c.first(),
                    Predicate::Contains => c.get(1),
                    _ => None,
                };
                if let Some(Expr::Str(s) | Expr::Token(s)) = lit {
                    out.push(s.as_str());
                }
            }
        });
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::sexpr::write_expr(self, f)
    }
}

/// A typing or arity violation, located by the child-index path from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in &self.path {
            write!(f, ".{i}")?;
        }
        write!(f, ": {}", self.message)
    }
}

fn accepts(param: &[Type], actual: Type) -> bool {
    param.contains(&actual)
}

fn check(expr: &Expr, path: &mut Vec<usize>, errs: &mut Vec<TypeError>) -> Option<Type> {
    let (pred, children) = match expr {
        Expr::Int(_) => return Some(Type::Int),
        Expr::Str(_) | Expr::Token(_) => return Some(Type::Str),
        Expr::Node(p, c) => (*p, c),
    };
    if pred.is_literal() {
        errs.push(TypeError {
            path: path.clone(),
            message: format!("literal predicate {pred} must carry a value, not children"),
        });
        return None;
    }

    let mut child_types = Vec::with_capacity(children.len());
    for (i, c) in children.iter().enumerate() {
        path.push(i);
        child_types.push(check(c, path, errs));
        path.pop();
    }

    if children.len() != pred.arity() {
        errs.push(TypeError {
            path: path.clone(),
            message: format!("{pred} takes {} argument(s), found {}", pred.arity(), children.len()),
        });
        return None;
    }
    // Children already reported; avoid cascading errors.
    let child_types: Vec<Type> = child_types.into_iter().collect::<Option<_>>()?;

    for sig in pred.signatures() {
        if sig.params.iter().zip(&child_types).all(|(p, t)| accepts(p, *t)) {
            return Some(sig.result);
        }
    }
    let found = child_types.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
    let expected = pred
        .signatures()
        .iter()
        .map(|s| {
            s.params
                .iter()
                .map(|p| p.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("|"))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect::<Vec<_>>()
        .join(" or ");
    errs.push(TypeError { path: path.clone(), message: format!("{pred} expects ({expected}), found ({found})") });
    None
}

/// Type-check an expression, returning its result type.
pub fn validate(expr: &Expr) -> std::result::Result<Type, Vec<TypeError>> {
    let mut errs = Vec::new();
    let mut path = Vec::new();
    match check(expr, &mut path, &mut errs) {
        Some(t) if errs.is_empty() => Ok(t),
        _ => Err(errs),
    }
}

/// Whether the tree contains a clause that inspects the sentence at all.
pub fn asserts_something(expr: &Expr) -> bool {
    let mut found = false;
    expr.walk(&mut |e| {
        if matches!(e.predicate().module_class(), ModuleClass::StringMatch | ModuleClass::Deterministic) {
            found = true;
        }
    });
    found
}

/// A validated labeling function: a boolean expression plus the label it votes for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalForm {
    pub id: String,
    root: Expr,
    label: String,
}

impl LogicalForm {
    pub fn new(id: impl Into<String>, root: Expr, label: impl Into<String>) -> Result<Self> {
        check_form(&root)?;
        Ok(LogicalForm { id: id.into(), root, label: label.into() })
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Checks everything a form root must satisfy: well-typed, boolean, and
/// referencing the sentence through a string-match or position predicate.
pub fn check_form(root: &Expr) -> Result<()> {
    match validate(root) {
        Ok(Type::Bool) => {}
        Ok(t) => {
            return Err(Error::InvalidForm(vec![TypeError {
                path: vec![],
                message: format!("a logical form must be boolean, found {t}"),
            }]))
        }
        Err(errs) => return Err(Error::InvalidForm(errs)),
    }
    if !asserts_something(root) {
        return Err(Error::InvalidForm(vec![TypeError {
            path: vec![],
            message: "form has no string-match or position clause".into(),
        }]));
    }
    Ok(())
}
