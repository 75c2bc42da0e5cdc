use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::lexicon::{tokenize_explanation, ExplToken, Lexicon};
use super::{Category, Prim, Term};
use crate::error::{Error, Result};
use crate::logic::{check_form, sexpr, Expr};

/// Length of the feature vector: one count per tracked combinator plus the
/// number of lexicon entries used.
pub const NUM_FEATURES: usize = 6;

/// Combinators, in feature order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    FwdApp,
    BwdApp,
    FwdComp,
    BwdComp,
    /// A conjunction takes its right conjunct. Counted once per coordination.
    Coord,
    /// The left conjunct completes a coordination. Not counted separately.
    CoordJoin,
}

impl Rule {
    fn feature(self) -> Option<usize> {
        match self {
            Rule::FwdApp => Some(0),
            Rule::BwdApp => Some(1),
            Rule::FwdComp => Some(2),
            Rule::BwdComp => Some(3),
            Rule::Coord => Some(4),
            Rule::CoordJoin => None,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rule::FwdApp => ">",
            Rule::BwdApp => "<",
            Rule::FwdComp => ">B",
            Rule::BwdComp => "<B",
            Rule::Coord => "<&>",
            Rule::CoordJoin => "<&",
        }
    }
}

/// How a constituent was built.
#[derive(Debug, Clone, PartialEq)]
pub enum Derivation {
    Leaf {
        start: usize,
        end: usize,
        /// Index into the lexicon, or `None` for a literal (quoted, unknown or numeric token).
        entry: Option<usize>,
        category: Category,
    },
    Node {
        rule: Rule,
        start: usize,
        end: usize,
        category: Category,
        left: Arc<Derivation>,
        right: Arc<Derivation>,
    },
}

impl Derivation {
    pub fn span(&self) -> (usize, usize) {
        match self {
            Derivation::Leaf { start, end, .. } | Derivation::Node { start, end, .. } => (*start, *end),
        }
    }

    /// Recounts the feature vector from the derivation tree.
    pub fn features(&self) -> [u32; NUM_FEATURES] {
        let mut f = [0; NUM_FEATURES];
        self.count(&mut f);
        f
    }

    fn count(&self, f: &mut [u32; NUM_FEATURES]) {
        match self {
            Derivation::Leaf { entry, .. } => {
                if entry.is_some() {
                    f[5] += 1;
                }
            }
            Derivation::Node { rule, left, right, .. } => {
                if let Some(i) = rule.feature() {
                    f[i] += 1;
                }
                left.count(f);
                right.count(f);
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Leaf { start, end, entry, category } => {
                let src = if entry.is_some() { "lex" } else { "lit" };
                writeln!(f, "{pad}[{start},{end}) {category} {src}")
            }
            Derivation::Node { rule, start, end, category, left, right } => {
                writeln!(f, "{pad}[{start},{end}) {category} {}", rule.symbol())?;
                left.write(f, depth + 1)?;
                right.write(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// A complete parse of an explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseCandidate {
    pub form: Expr,
    pub sexpr: String,
    pub features: [u32; NUM_FEATURES],
    pub derivation: Arc<Derivation>,
}

impl ParseCandidate {
    pub fn phi(&self) -> Vec<f64> {
        self.features.iter().map(|&c| c as f64).collect()
    }
}

/// Upper bound on candidates returned per explanation.
pub const MAX_CANDIDATES: usize = 512;
const MAX_CELL: usize = 1024;

#[derive(Debug, Clone)]
struct Item {
    cat: Category,
    sem: Term,
    feats: [u32; NUM_FEATURES],
    apps: u32,
    coord: bool,
    deriv: Arc<Derivation>,
}

impl Item {
    /// Among derivations of the same constituent keep the one with the fewest
    /// combinator applications, then the lexicographically smallest features.
    fn better_than(&self, other: &Item) -> bool {
        (self.apps, self.feats) < (other.apps, other.feats)
    }
}

type Cell = BTreeMap<(Category, Term, bool), Item>;

fn insert(cell: &mut Cell, item: Item, overflow: &mut bool) {
    if !item.sem.well_typed() {
        return;
    }
    let key = (item.cat.clone(), item.sem.clone(), item.coord);
    match cell.get(&key) {
        Some(old) if !item.better_than(old) => {}
        Some(_) => {
            cell.insert(key, item);
        }
        None if cell.len() >= MAX_CELL => *overflow = true,
        None => {
            cell.insert(key, item);
        }
    }
}

fn combine_feats(a: &Item, b: &Item, rule: Rule) -> ([u32; NUM_FEATURES], u32) {
    let mut f = a.feats;
    for (x, y) in f.iter_mut().zip(&b.feats) {
        *x += y;
    }
    if let Some(i) = rule.feature() {
        f[i] += 1;
    }
    (f, a.apps + b.apps + 1)
}

/// Coordination is allowed at `S` and `S\NP`.
fn coordinable(c: &Category) -> bool {
    *c == Category::S || *c == Category::bwd(Category::S, Category::NP)
}

fn coordinate(conj: &Term, right: &Term, cat: &Category) -> Term {
    if *cat == Category::S {
        // \l. conj l r
        Term::lam(Term::app(Term::app(conj.shift(1, 0), Term::Var(0)), right.shift(1, 0)))
    } else {
        // \l. \x. conj (l x) (r x)
        Term::lam(Term::lam(Term::app(
            Term::app(conj.shift(2, 0), Term::app(Term::Var(1), Term::Var(0))),
            Term::app(right.shift(2, 0), Term::Var(0)),
        )))
    }
}

fn apply_rules(l: &Item, r: &Item, start: usize, end: usize, out: &mut Vec<Item>) {
    let mut push = |rule: Rule, cat: Category, sem: Term, coord: bool| {
        let (feats, apps) = combine_feats(l, r, rule);
        let deriv = Arc::new(Derivation::Node {
            rule,
            start,
            end,
            category: cat.clone(),
            left: l.deriv.clone(),
            right: r.deriv.clone(),
        });
        out.push(Item { cat, sem: sem.normalize(), feats, apps, coord, deriv });
    };

    if r.coord {
        if let Category::Bwd(res, arg) = &r.cat {
            if !l.coord && **arg == l.cat {
                push(Rule::CoordJoin, (**res).clone(), Term::app(r.sem.clone(), l.sem.clone()), false);
            }
        }
        return;
    }
    if l.coord {
        return;
    }
    if l.cat.is_prim(Prim::Conj) && coordinable(&r.cat) {
        let cat = Category::bwd(r.cat.clone(), r.cat.clone());
        push(Rule::Coord, cat.clone(), coordinate(&l.sem, &r.sem, &r.cat), true);
        return;
    }
    if let Category::Fwd(x, y) = &l.cat {
        if **y == r.cat {
            push(Rule::FwdApp, (**x).clone(), Term::app(l.sem.clone(), r.sem.clone()), false);
        }
        if let Category::Fwd(y2, z) = &r.cat {
            if y == y2 {
                let sem = Term::lam(Term::app(l.sem.shift(1, 0), Term::app(r.sem.shift(1, 0), Term::Var(0))));
                push(Rule::FwdComp, Category::fwd((**x).clone(), (**z).clone()), sem, false);
            }
        }
    }
    if let Category::Bwd(x, y) = &r.cat {
        if **y == l.cat {
            push(Rule::BwdApp, (**x).clone(), Term::app(r.sem.clone(), l.sem.clone()), false);
        }
        if let Category::Bwd(y2, z) = &l.cat {
            if y == y2 {
                let sem = Term::lam(Term::app(r.sem.shift(1, 0), Term::app(l.sem.shift(1, 0), Term::Var(0))));
                push(Rule::BwdComp, Category::bwd((**x).clone(), (**z).clone()), sem, false);
            }
        }
    }
}

fn word_query(s: &str) -> Term {
    Term::Node(crate::logic::Predicate::Word, vec![Term::Str(s.to_string())])
}

/// Lexical items by start position, as `(length, item)`. A literal string is
/// offered both as a location and as a word query; type checking later keeps
/// whichever reading fits.
fn leaves(tokens: &[ExplToken], lexicon: &Lexicon) -> Vec<Vec<(usize, Item)>> {
    let words: Vec<Option<&str>> = tokens
        .iter()
        .map(|t| match t {
            ExplToken::Word(w) => Some(w.as_str()),
            _ => None,
        })
        .collect();
    let mut by_start = vec![Vec::new(); tokens.len()];
    for (i, tok) in tokens.iter().enumerate() {
        let literal = |cat: Category, sem: Term| Item {
            deriv: Arc::new(Derivation::Leaf { start: i, end: i + 1, entry: None, category: cat.clone() }),
            cat,
            sem,
            feats: [0; NUM_FEATURES],
            apps: 0,
            coord: false,
        };
        match tok {
            ExplToken::Quoted(s) => {
                by_start[i].push((1, literal(Category::NP, Term::Str(s.clone()))));
                by_start[i].push((1, literal(Category::NP, word_query(s))));
            }
            ExplToken::Number(n) => by_start[i].push((1, literal(Category::Prim(Prim::Int), Term::Int(*n)))),
            ExplToken::Word(w) => {
                for (e, len) in lexicon.matches_at(&words[i..]) {
                    let entry = &lexicon.entries()[e];
                    let mut feats = [0; NUM_FEATURES];
                    feats[5] = 1;
                    by_start[i].push((
                        len,
                        Item {
                            cat: entry.category.clone(),
                            sem: entry.semantics.clone(),
                            feats,
                            apps: 0,
                            coord: false,
                            deriv: Arc::new(Derivation::Leaf {
                                start: i,
                                end: i + len,
                                entry: Some(e),
                                category: entry.category.clone(),
                            }),
                        },
                    ));
                }
                if !lexicon.knows(w) {
                    by_start[i].push((1, literal(Category::NP, Term::Str(w.clone()))));
                    by_start[i].push((1, literal(Category::NP, word_query(w))));
                }
            }
        }
    }
    by_start
}

/// All well-typed complete parses of `text`, one per distinct logical form,
/// sorted by serialized form.
///
/// Quoted spans and words the lexicon does not know become string literals;
/// digits become integers. A parse is complete if it spans every token, has
/// category `S`, and yields a boolean form that inspects the sentence.
pub fn chart_parse(text: &str, lexicon: &Lexicon) -> Result<Vec<ParseCandidate>> {
    let tokens = tokenize_explanation(text);
    let n = tokens.len();
    if n == 0 || lexicon.is_empty() {
        return Err(Error::NoParse);
    }
    // chart[i][len - 1] holds constituents covering tokens i..i+len.
    let mut chart: Vec<Vec<Cell>> = (0..n).map(|i| vec![Cell::new(); n - i]).collect();
    let mut overflow = false;
    for (i, items) in leaves(&tokens, lexicon).into_iter().enumerate() {
        for (len, item) in items {
            insert(&mut chart[i][len - 1], item, &mut overflow);
        }
    }
    let mut fresh = Vec::new();
    for len in 2..=n {
        for i in 0..=n - len {
            for split in 1..len {
                let (left, right) = (&chart[i][split - 1], &chart[i + split][len - split - 1]);
                for l in left.values() {
                    for r in right.values() {
                        apply_rules(l, r, i, i + len, &mut fresh);
                    }
                }
            }
            for item in fresh.drain(..) {
                insert(&mut chart[i][len - 1], item, &mut overflow);
            }
        }
    }
    if overflow {
        log::warn!("chart cell limit of {MAX_CELL} reached while parsing {text:?}; some derivations were dropped");
    }

    let mut out: Vec<ParseCandidate> = chart[0][n - 1]
        .values()
        .filter(|it| it.cat == Category::S && !it.coord)
        .filter_map(|it| {
            let form = it.sem.to_expr()?;
            check_form(&form).ok()?;
            Some(ParseCandidate { sexpr: sexpr::print(&form), form, features: it.feats, derivation: it.deriv.clone() })
        })
        .collect();
    if out.is_empty() {
        return Err(Error::NoParse);
    }
    out.sort_by(|a, b| a.sexpr.cmp(&b.sexpr));
    if out.len() > MAX_CANDIDATES {
        log::warn!("{} parses for {text:?}; keeping the first {MAX_CANDIDATES}", out.len());
        out.truncate(MAX_CANDIDATES);
    }
    Ok(out)
}
