//! Trainable soft keyword matching.
//!
//! For token `i` of a sentence, every window of up to `max_window` tokens that
//! contains it is encoded into a context vector `z_ij`. Its similarity to the
//! query encoding `z_q` is `cos(z_ij ⊙ d, z_q ⊙ d)` and the token score is
//! `clamp(Σ_j v_j cos(..), 0, 1)`. Embeddings are frozen; only `d` and `v`
//! are trained, by a keyword-finding cross-entropy plus a contrastive margin
//! loss that pulls queries of one class together.

mod embedding;
mod encoder;
mod loss;
mod model;
mod pretrain;

pub use embedding::EmbeddingTable;
pub use encoder::{num_windows, windows, ContextEncoder, MeanEncoder};
pub use loss::{
    bce_mean, class_sets, l_find, l_sim, l_sim_mean, l_string, sim_hinge, FindExample, QueryClassSets, BCE_EPS,
};
pub use model::{scaled_cosine, scaled_cosine_value, Checkpoint, MatcherGrad, MatcherModel, ScoreCache};
pub use pretrain::{pretrain, synthesize_find_examples, PretrainConfig, PretrainReport};
