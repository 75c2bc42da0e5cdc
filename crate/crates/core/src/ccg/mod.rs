//! Explanation parsing.
//!
//! A CKY chart over the explanation's tokens combines lexical categories with
//! forward/backward application, forward/backward composition and
//! coordination. Semantics are lambda terms, beta-reduced after every step;
//! constituents whose closed subterms fail type checking are pruned. Each
//! complete parse carries a feature vector counting the combinator
//! applications of its derivation and the number of lexical entries used,
//! which a log-linear model turns into `P(f | e)`.

mod category;
mod chart;
mod lexicon;
mod model;
mod term;

pub use category::{Category, Prim};
pub use chart::{chart_parse, Derivation, ParseCandidate, Rule, MAX_CANDIDATES, NUM_FEATURES};
pub use lexicon::{tokenize_explanation, ExplToken, Lexicon, LexiconEntry, DEFAULT_LEXICON};
pub use model::{
    parser_objective, prepare, score_candidates, train_parser, AnnotatedExplanation, ParserModel, ParserTrainReport,
    PreparedExample, Skipped,
};
pub use term::Term;
