//! File formats, evaluation and the synthetic paraphrase corpus.
//!
//! Corpus, gold, forms, explanations, queries and pseudo-labels are JSON
//! Lines, one record per line. Embeddings use the usual `word v1 .. vd` text
//! format. Training logs are CSV with a version comment.

mod eval;
mod metrics;
mod records;
mod synth;

pub use eval::{evaluate, Evaluation, Prf};
pub use metrics::{read_metrics_csv, write_metrics_csv, METRICS_VERSION};
pub use records::{
    load_corpus, load_explanations, load_forms, load_gold, load_queries, parse_jsonl, read_jsonl, resolve_explanations,
    save_corpus, save_forms, write_jsonl, write_jsonl_to, CorpusRecord, ExplanationRecord, FormRecord, GoldRecord,
    LabelRecord, QueryRecord, SourceRecord,
};
pub use synth::{generate_synthetic, SynonymClass, SyntheticData, SyntheticSpec, OBJ_TOKEN, SUBJ_TOKEN};
