//! Weak supervision from labeling functions.
//!
//! The corpus is split by exact matching into a labeled part and an
//! unlabeled remainder. Unlabeled sentences get pseudo-labels from soft
//! execution, weighted by a temperature softmax over their scores, and a
//! downstream classifier is trained on both parts while the string matcher
//! keeps training on its own objective.

mod classifier;
mod label;
mod loss;
mod partition;
mod train;

pub use classifier::{fit_classifier, Classifier, LogisticRegression, PROB_SMOOTHING};
pub use label::{entropy, form_queries, normalize_scores, pseudo_label, soft_match, PseudoLabel, PseudoLabeledBatch};
pub use loss::{labeled_loss, total_loss, unlabeled_loss};
pub use partition::{partition_corpus, strict_matches, LabeledInstance, Partition};
pub use train::{accuracy, train_joint, JointData, MetricsRow, TrainConfig, TrainOutcome};
