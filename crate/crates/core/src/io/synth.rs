use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::records::{ExplanationRecord, GoldRecord, QueryRecord};
use crate::error::{Error, Result};
use crate::logic::{sexpr, AnchorRole, Instance, LabelSet, LogicalForm, Span};
use crate::matcher::EmbeddingTable;

/// A class label and the words that express it. The first words serve as
/// form keywords; the rest only ever appear as paraphrases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymClass {
    pub label: String,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub num_forms: usize,
    pub size: usize,
    /// Fraction of instances whose keyword is swapped for a synonym.
    pub paraphrase_rate: f64,
    /// Size of the separately drawn test split; 0 for none.
    pub test_size: usize,
    pub dim: usize,
    /// Cosine between two words of the same class.
    pub semantic_share: f64,
    pub none_label: String,
    pub classes: Vec<SynonymClass>,
}

fn class(label: &str, words: &[&str]) -> SynonymClass {
    SynonymClass { label: label.into(), words: words.iter().map(|w| w.to_string()).collect() }
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 0,
            num_forms: 9,
            size: 1000,
            paraphrase_rate: 0.4,
            test_size: 0,
            dim: 48,
            semantic_share: 0.3,
            none_label: "no_relation".into(),
            classes: vec![
                class("org:founded_by", &["founded", "established", "created", "started", "launched", "formed"]),
                class("per:employee_of", &["works", "employed", "hired", "serves", "joined", "staffs"]),
                class("per:origin", &["born", "raised", "native", "hails", "grew", "originated"]),
            ],
        }
    }
}

const FILLERS: &[&str] = &[
    "the",
    "a",
    "of",
    "in",
    "on",
    "at",
    "with",
    "for",
    "company",
    "year",
    "city",
    "group",
    "last",
    "new",
    "said",
    "report",
    "local",
    "early",
    "state",
    "today",
    "according",
    "official",
    "news",
    "also",
    "former",
    "team",
    "later",
    "during",
    "its",
    "their",
    "this",
    "that",
    "week",
    "two",
    "many",
    "public",
    "board",
    "recent",
    "small",
    "large",
];

pub const SUBJ_TOKEN: &str = "SUBJ-PERSON";
pub const OBJ_TOKEN: &str = "OBJ-ORGANIZATION";
const TEMPLATES: usize = 5;

/// Generated corpus with everything needed to run and score the pipeline.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub labels: LabelSet,
    pub corpus: Vec<Instance>,
    pub gold: Vec<GoldRecord>,
    pub forms: Vec<LogicalForm>,
    pub queries: Vec<QueryRecord>,
    pub explanations: Vec<ExplanationRecord>,
    pub embeddings: EmbeddingTable,
    /// Ids of corpus instances that carry a synonym instead of the keyword.
    pub paraphrased: BTreeSet<String>,
    pub test: Vec<Instance>,
    pub test_gold: Vec<GoldRecord>,
}

impl SyntheticData {
    pub fn gold_map(&self) -> BTreeMap<String, String> {
        self.gold.iter().map(|g| (g.id.clone(), g.label.clone())).collect()
    }

    pub fn test_gold_map(&self) -> BTreeMap<String, String> {
        self.test_gold.iter().map(|g| (g.id.clone(), g.label.clone())).collect()
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.paraphrase_rate) {
            return bad(format!("paraphrase_rate must lie in [0, 1], got {}", self.paraphrase_rate));
        }
        if self.classes.is_empty() {
            return bad("at least one synonym class is required".into());
        }
        let c = self.classes.len();
        let keywords = self.num_forms.div_ceil(c);
        if self.num_forms == 0 || self.classes.iter().any(|k| k.words.len() <= keywords) {
            return bad(format!("{} forms over {c} classes need more than {keywords} words per class", self.num_forms));
        }
        let mut seen = BTreeSet::new();
        for w in self.classes.iter().flat_map(|k| &k.words) {
            if !seen.insert(w.to_lowercase()) || FILLERS.contains(&w.as_str()) {
                return bad(format!("synonym word {w} is repeated or collides with filler vocabulary"));
            }
        }
        if self.dim < 2 || !(0.0..=1.0).contains(&self.semantic_share) {
            return bad("dim must be at least 2 and semantic_share must lie in [0, 1]".into());
        }
        Ok(())
    }

    fn form_shape(&self, k: usize) -> (usize, &str, usize) {
        let c = k % self.classes.len();
        (c, &self.classes[c].words[k / self.classes.len()], k % TEMPLATES)
    }

    fn keywords_per_class(&self) -> usize {
        self.num_forms.div_ceil(self.classes.len())
    }
}

fn form_sexpr(template: usize, w: &str) -> String {
    let mask = match template {
        0 => "(Between ArgX ArgY)".to_string(),
        1 => "(Direct (Left ArgY))".to_string(),
        2 => "(AtMost (Right ArgY) 3)".to_string(),
        3 => "(Left ArgX)".to_string(),
        _ => "(Direct (Right ArgX))".to_string(),
    };
    format!("(Is (Word \"{w}\") {mask})")
}

fn explanation_text(template: usize, w: &str) -> String {
    let tail = match template {
        0 => "between SUBJECT and OBJECT",
        1 => "right before OBJECT",
        2 => "at most three words after OBJECT",
        3 => "before SUBJECT",
        _ => "right after SUBJECT",
    };
    format!("the word '{w}' appears {tail}")
}

fn fill(out: &mut Vec<String>, lo: usize, hi: usize, rng: &mut ChaCha8Rng) {
    for _ in 0..rng.gen_range(lo..=hi) {
        out.push(FILLERS.choose(rng).unwrap().to_string());
    }
}

/// Tokens and anchors of one sentence built around `w`.
fn sentence(template: usize, w: &str, rng: &mut ChaCha8Rng) -> (Vec<String>, BTreeMap<AnchorRole, Span>) {
    let mut t = Vec::new();
    let (mut s, mut o) = (0, 0);
    let subj = |t: &mut Vec<String>, s: &mut usize| {
        *s = t.len();
        t.push(SUBJ_TOKEN.to_string());
    };
    let obj = |t: &mut Vec<String>, o: &mut usize| {
        *o = t.len();
        t.push(OBJ_TOKEN.to_string());
    };
    fill(&mut t, 0, 2, rng);
    match template {
        0 => {
            subj(&mut t, &mut s);
            fill(&mut t, 0, 2, rng);
            t.push(w.into());
            fill(&mut t, 0, 2, rng);
            obj(&mut t, &mut o);
        }
        1 => {
            subj(&mut t, &mut s);
            fill(&mut t, 1, 3, rng);
            t.push(w.into());
            obj(&mut t, &mut o);
        }
        2 => {
            subj(&mut t, &mut s);
            fill(&mut t, 1, 3, rng);
            obj(&mut t, &mut o);
            fill(&mut t, 0, 2, rng);
            t.push(w.into());
        }
        3 => {
            t.push(w.into());
            fill(&mut t, 0, 2, rng);
            subj(&mut t, &mut s);
            fill(&mut t, 1, 3, rng);
            obj(&mut t, &mut o);
        }
        _ => {
            subj(&mut t, &mut s);
            t.push(w.into());
            fill(&mut t, 1, 3, rng);
            obj(&mut t, &mut o);
        }
    }
    fill(&mut t, 0, 2, rng);
    let anchors =
        BTreeMap::from([(AnchorRole::Subject, Span::new(s, s + 1)), (AnchorRole::Object, Span::new(o, o + 1))]);
    (t, anchors)
}

fn unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Word vectors with a class block and a private block. Words of one class
/// share the class block direction, so their cosine is `semantic_share`;
/// fillers and anchor tokens are random unit vectors.
fn embeddings(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<EmbeddingTable> {
    let half = spec.dim / 2;
    let rest = spec.dim - half;
    let (a, b) = (spec.semantic_share.sqrt(), (1.0 - spec.semantic_share).sqrt());
    let mut emb = EmbeddingTable::new(spec.dim);
    for c in &spec.classes {
        let centroid = unit(half, rng);
        for w in &c.words {
            let noise = unit(rest, rng);
            let v: Vec<f64> = centroid.iter().map(|x| a * x).chain(noise.iter().map(|x| b * x)).collect();
            emb.insert(w, &v)?;
        }
    }
    for w in FILLERS.iter().copied().chain([SUBJ_TOKEN, OBJ_TOKEN]) {
        emb.insert(w, &unit(spec.dim, rng))?;
    }
    Ok(emb)
}

// instances, gold, paraphrased ids, form index per instance
type Split = (Vec<Instance>, Vec<GoldRecord>, BTreeSet<String>, Vec<usize>);

fn split(spec: &SyntheticSpec, size: usize, prefix: &str, rng: &mut ChaCha8Rng) -> Result<Split> {
    let n_para = (spec.paraphrase_rate * size as f64).round() as usize;
    let para: BTreeSet<usize> = sample(rng, size, n_para.min(size)).into_iter().collect();
    let kw = spec.keywords_per_class();
    let (mut corpus, mut gold, mut ids, mut origin) = (Vec::new(), Vec::new(), BTreeSet::new(), Vec::new());
    for i in 0..size {
        let k = rng.gen_range(0..spec.num_forms);
        let (c, w, template) = spec.form_shape(k);
        let id = format!("{prefix}{i:05}");
        let word = if para.contains(&i) {
            ids.insert(id.clone());
            spec.classes[c].words[kw..].choose(rng).unwrap().as_str()
        } else {
            w
        };
        let (tokens, anchors) = sentence(template, word, rng);
        corpus.push(Instance::new(id.clone(), tokens, anchors)?);
        gold.push(GoldRecord { id, label: spec.classes[c].label.clone() });
        origin.push(k);
    }
    Ok((corpus, gold, ids, origin))
}

/// Builds a corpus in which every sentence comes from one gold form. Exactly
/// `round(rate * size)` sentences carry a non-keyword synonym, so they fail
/// exact matching while staying close in embedding space.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng_emb = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_train = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(1));
    let mut rng_test = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(2));
    let embeddings = embeddings(spec, &mut rng_emb)?;

    let mut labels: Vec<String> = spec.classes.iter().map(|c| c.label.clone()).collect();
    labels.push(spec.none_label.clone());
    let labels = LabelSet::new(labels, &spec.none_label)?;

    let mut forms = Vec::new();
    let mut queries = Vec::new();
    for k in 0..spec.num_forms {
        let (c, w, template) = spec.form_shape(k);
        let label = &spec.classes[c].label;
        forms.push(LogicalForm::new(format!("f{k:02}"), sexpr::parse(&form_sexpr(template, w))?, label.clone())?);
        queries.push(QueryRecord { query: w.to_string(), class: label.clone() });
    }

    let (corpus, gold, paraphrased, origin) = split(spec, spec.size, "s", &mut rng_train)?;
    let (test, test_gold, _, _) = split(spec, spec.test_size, "t", &mut rng_test)?;

    let explanations = (0..spec.num_forms)
        .map(|k| {
            let (c, w, template) = spec.form_shape(k);
            let source_id = origin
                .iter()
                .zip(&corpus)
                .find(|(&o, x)| o == k && !paraphrased.contains(&x.id))
                .map(|(_, x)| x.id.clone());
            ExplanationRecord {
                id: format!("e{k:02}"),
                text: explanation_text(template, w),
                label: spec.classes[c].label.clone(),
                source_id,
                source_instance: None,
            }
        })
        .filter(|e| e.source_id.is_some())
        .collect();

    Ok(SyntheticData { labels, corpus, gold, forms, queries, explanations, embeddings, paraphrased, test, test_gold })
}
