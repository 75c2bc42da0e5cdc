//! The `train` config file and the trained-model checkpoint.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use exptree::logic::LabelSet;
use exptree::matcher::{Checkpoint, EmbeddingTable, MatcherModel, PretrainConfig};
use exptree::pipeline::{Classifier, LogisticRegression, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::DataError;

pub const CONFIG_VERSION: u32 = 1;

/// Input files. Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub corpus: PathBuf,
    pub forms: PathBuf,
    pub embeddings: PathBuf,
    /// Query JSONL for the contrastive term; defaults to the forms' phrases.
    pub queries: Option<PathBuf>,
    #[serde(default = "default_none")]
    pub none_label: String,
    /// Class order; defaults to the forms' labels plus the none label.
    pub labels: Option<Vec<String>>,
    pub dev_corpus: Option<PathBuf>,
    pub dev_gold: Option<PathBuf>,
}

fn default_none() -> String {
    "no_relation".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherSection {
    pub max_window: usize,
    /// Pretrained matcher; when absent the matcher is pretrained first.
    pub checkpoint: Option<PathBuf>,
}

impl Default for MatcherSection {
    fn default() -> Self {
        MatcherSection { max_window: 2, checkpoint: None }
    }
}

/// Output files, relative to `--out-dir` or else the config directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
    pub predictions: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            checkpoint: "model.json".into(),
            metrics: "metrics.csv".into(),
            predictions: "dev_predictions.jsonl".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainFile {
    pub version: u32,
    pub data: DataSection,
    #[serde(default)]
    pub matcher: MatcherSection,
    #[serde(default)]
    pub pretrain: PretrainConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub output: OutputSection,
}

impl TrainFile {
    pub fn load(path: &Path) -> Result<TrainFile, DataError> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let tf: TrainFile = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if tf.version != CONFIG_VERSION {
            return Err(DataError(format!("{}: unsupported config version {}", path.display(), tf.version)));
        }
        tf.train.validate()?;
        Ok(tf)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierWeights {
    pub num_features: usize,
    pub weights: Vec<f64>,
}

/// Output of `train`: the label order, classifier weights and matcher.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub version: u32,
    pub labels: Vec<String>,
    pub none_label: String,
    pub classifier: ClassifierWeights,
    pub matcher: Checkpoint,
}

impl ModelCheckpoint {
    pub fn new(labels: &LabelSet, clf: &LogisticRegression, matcher: &MatcherModel) -> ModelCheckpoint {
        ModelCheckpoint {
            version: CONFIG_VERSION,
            labels: labels.labels().to_vec(),
            none_label: labels.none_label().to_string(),
            classifier: ClassifierWeights { num_features: clf.num_features(), weights: clf.params().to_vec() },
            matcher: matcher.to_checkpoint(),
        }
    }

    pub fn restore(&self, emb: Arc<EmbeddingTable>) -> Result<(LabelSet, LogisticRegression, MatcherModel), DataError> {
        if self.version != CONFIG_VERSION {
            return Err(DataError(format!("unsupported model version {}", self.version)));
        }
        let labels = LabelSet::new(self.labels.clone(), &self.none_label)?;
        let mut clf = LogisticRegression::new(emb.clone(), labels.len());
        if clf.num_features() != self.classifier.num_features || clf.params().len() != self.classifier.weights.len() {
            return Err(DataError("classifier weights do not fit the embedding dimension".into()));
        }
        clf.set_params(&self.classifier.weights);
        let m = MatcherModel::from_checkpoint(emb, &self.matcher)?;
        Ok((labels, clf, m))
    }
}
