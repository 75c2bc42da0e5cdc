//! Soft execution of logical forms.
//!
//! Every predicate is routed to one of four kinds of evaluation: string
//! matching produces a per-token [`ScoreSequence`], deterministic functions and
//! counting constraints produce a [`MaskSequence`], and logical predicates
//! combine them. A clause `Is(seq, mask)` is the max-pool of the elementwise
//! product; boolean connectives use Łukasiewicz logic.

mod fuzzy;
pub mod mask;
mod soft;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::logic::{phrase_occurrences, Instance};

pub use fuzzy::{luk_and, luk_not, luk_or};
pub use mask::{count_score, counting_mask, deterministic_mask, number_of, CountConstraint, CountOp, DetFn, Side};
pub use soft::{exec_soft, soft_score, soft_trace, NodeTrace};

/// Per-token similarity to a query, each entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSequence(pub Vec<f64>);

/// Per-token constraint values: `{0, 1}` for deterministic functions,
/// `{0, mu, 1}` for counting constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSequence(pub Vec<f64>);

/// Slack parameters for soft counting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftConfig {
    /// Score given to positions that miss a counting bound by at most `slack_width`.
    pub mu: f64,
    pub slack_width: usize,
}

impl Default for SoftConfig {
    fn default() -> Self {
        SoftConfig { mu: 0.5, slack_width: 2 }
    }
}

impl SoftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(crate::Error::Config(format!("mu must lie in (0, 1), got {}", self.mu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub form_id: String,
    pub score: f64,
    pub label: String,
}

/// Scores every token of a sentence against a keyword query.
pub trait StringMatcher: Sync {
    fn string_match_scores(&self, x: &Instance, query: &[String]) -> Result<ScoreSequence>;
}

/// Exact keyword search: 1 on tokens covered by an exact (lowercased)
/// occurrence of the query phrase, 0 elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatcher;

impl StringMatcher for ExactMatcher {
    fn string_match_scores(&self, x: &Instance, query: &[String]) -> Result<ScoreSequence> {
        if query.is_empty() {
            return Err(crate::Error::EmptyQuery);
        }
        let mut s = vec![0.0; x.len()];
        for span in phrase_occurrences(x, query) {
            s[span.start..span.end].iter_mut().for_each(|v| *v = 1.0);
        }
        Ok(ScoreSequence(s))
    }
}
