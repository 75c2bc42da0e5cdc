//! Position masks for deterministic functions and soft counting constraints.

use super::{MaskSequence, SoftConfig};
use crate::logic::{Instance, Predicate, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountOp {
    AtMost,
    AtLeast,
    MoreThan,
    LessThan,
    Equals,
}

impl CountOp {
    pub fn from_predicate(p: Predicate) -> Option<CountOp> {
        Some(match p {
            Predicate::AtMost => CountOp::AtMost,
            Predicate::AtLeast => CountOp::AtLeast,
            Predicate::MoreThan => CountOp::MoreThan,
            Predicate::LessThan => CountOp::LessThan,
            Predicate::Equals | Predicate::Direct => CountOp::Equals,
            _ => return None,
        })
    }
}

/// A counting constraint `op bound`, e.g. "at most 3".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConstraint {
    pub op: CountOp,
    pub bound: i64,
}

impl CountConstraint {
    /// "directly": distance exactly one.
    pub const DIRECT: CountConstraint = CountConstraint { op: CountOp::Equals, bound: 1 };
}

/// Soft score of `value op bound`: 1 when it holds, `mu` when it misses by at
/// most `slack_width`, 0 otherwise.
pub fn count_score(c: CountConstraint, value: i64, cfg: &SoftConfig) -> f64 {
    let (b, s) = (c.bound, cfg.slack_width as i64);
    let (strict, slack) = match c.op {
        CountOp::AtMost => (value <= b, value > b && value <= b + s),
        CountOp::LessThan => (value < b, value >= b && value < b + s),
        CountOp::AtLeast => (value >= b, value < b && value >= b - s),
        CountOp::MoreThan => (value > b, value <= b && value > b - s),
        CountOp::Equals => (value == b, value != b && (value - b).abs() <= s),
    };
    if strict {
        1.0
    } else if slack {
        cfg.mu
    } else {
        0.0
    }
}

/// Distance from each position to the nearest of `places` on one side, or
/// `None` for positions not on that side.
pub fn side_distances(places: &[Span], n: usize, side: Side) -> Vec<Option<usize>> {
    let mut out = vec![None; n];
    for s in places {
        let range: Box<dyn Iterator<Item = usize>> = match side {
            Side::Left => Box::new(0..s.start.min(n)),
            Side::Right => Box::new(s.end.min(n)..n),
        };
        for p in range {
            let d = match side {
                Side::Left => s.start - p,
                Side::Right => p + 1 - s.end,
            };
            out[p] = Some(out[p].map_or(d, |old: usize| old.min(d)));
        }
    }
    out
}

/// Soft mask of positions on `side` of `anchor` whose distance satisfies `c`.
pub fn counting_mask(x: &Instance, anchor: Span, side: Side, c: CountConstraint, cfg: &SoftConfig) -> MaskSequence {
    MaskSequence(counting_from_distances(&side_distances(&[anchor], x.len(), side), c, cfg))
}

pub(crate) fn counting_from_distances(dist: &[Option<usize>], c: CountConstraint, cfg: &SoftConfig) -> Vec<f64> {
    dist.iter().map(|d| d.map_or(0.0, |d| count_score(c, d as i64, cfg))).collect()
}

/// A deterministic position function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetFn<'a> {
    Left(&'a [Span]),
    Right(&'a [Span]),
    Between(&'a [Span], &'a [Span]),
    Within(&'a [Span], i64),
}

/// 0/1 mask of a deterministic function. `Between` excludes both endpoints;
/// `Within` is inclusive of the range edge and excludes the location itself.
pub fn deterministic_mask(x: &Instance, f: DetFn<'_>) -> MaskSequence {
    let n = x.len();
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let v = match f {
        DetFn::Left(pl) => side_distances(pl, n, Side::Left).iter().map(|d| ind(d.is_some())).collect(),
        DetFn::Right(pl) => side_distances(pl, n, Side::Right).iter().map(|d| ind(d.is_some())).collect(),
        DetFn::Between(a, b) => between(a, b, n),
        DetFn::Within(pl, k) => {
            let l = side_distances(pl, n, Side::Left);
            let r = side_distances(pl, n, Side::Right);
            (0..n)
                .map(|i| {
                    let inside = pl.iter().any(|s| s.contains(i));
                    let d = match (l[i], r[i]) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    ind(!inside && d.is_some_and(|d| d as i64 <= k))
                })
                .collect()
        }
    };
    MaskSequence(v)
}

pub(crate) fn between(a: &[Span], b: &[Span], n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for sa in a {
        for sb in b {
            let (lo, hi) = if sa.start <= sb.start { (sa, sb) } else { (sb, sa) };
            for slot in v.iter_mut().take(hi.start.min(n)).skip(lo.end) {
                *slot = 1.0;
            }
        }
    }
    v
}

/// Number of positions set in a deterministic mask.
pub fn number_of(mask: &MaskSequence) -> i64 {
    mask.0.iter().filter(|&&m| m == 1.0).count() as i64
}
