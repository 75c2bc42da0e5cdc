use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ccg::AnnotatedExplanation;
use crate::error::{Error, Result};
use crate::logic::{sexpr, AnchorRole, Instance, LogicalForm, Span};

/// `{id, tokens, anchors}` with anchors as half-open `[start, end]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub tokens: Vec<String>,
    #[serde(default)]
    pub anchors: BTreeMap<AnchorRole, [usize; 2]>,
}

impl CorpusRecord {
    pub fn from_instance(x: &Instance) -> CorpusRecord {
        CorpusRecord {
            id: x.id.clone(),
            tokens: x.tokens().to_vec(),
            anchors: x.anchors().iter().map(|(r, s)| (*r, [s.start, s.end])).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let anchors = self.anchors.iter().map(|(r, [a, b])| (*r, Span::new(*a, *b))).collect();
        Instance::new(self.id.clone(), self.tokens.clone(), anchors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldRecord {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormRecord {
    pub id: String,
    pub sexpr: String,
    pub label: String,
}

impl FormRecord {
    pub fn from_form(f: &LogicalForm) -> FormRecord {
        FormRecord { id: f.id.clone(), sexpr: sexpr::print(f.root()), label: f.label().to_string() }
    }

    pub fn to_form(&self) -> Result<LogicalForm> {
        LogicalForm::new(self.id.clone(), sexpr::parse(&self.sexpr)?, self.label.clone())
    }
}

/// An inline source sentence: either raw `text` (anchors found from role
/// tokens) or explicit `tokens` and `anchors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub anchors: BTreeMap<AnchorRole, [usize; 2]>,
}

impl SourceRecord {
    pub fn to_instance(&self) -> Result<Instance> {
        match (&self.text, &self.tokens) {
            (Some(t), None) => Instance::from_text(self.id.clone(), t),
            (None, Some(toks)) => {
                CorpusRecord { id: self.id.clone(), tokens: toks.clone(), anchors: self.anchors.clone() }.to_instance()
            }
            _ => Err(Error::InvalidInstance(format!("{}: give exactly one of text or tokens", self.id))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplanationRecord {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_instance: Option<SourceRecord>,
}

/// One line of `label` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub instance_id: String,
    pub label: String,
    pub u: f64,
    pub omega: f64,
}

/// A labeling-function query phrase and the class of its form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRecord {
    pub query: String,
    pub class: String,
}

/// Reads one JSON value per non-blank line.
pub fn parse_jsonl<T: DeserializeOwned>(r: impl BufRead, path: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| Error::Format {
        path: path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })?;
    parse_jsonl(BufReader::new(f), &path.display().to_string())
}

pub fn write_jsonl_to<T: Serialize>(mut w: impl Write, items: &[T]) -> Result<()> {
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    write_jsonl_to(BufWriter::new(File::create(path)?), items)
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>, path: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(Error::Format { path: path.to_string(), line: i + 1, msg: format!("duplicate id {id}") });
        }
    }
    Ok(())
}

fn at_line<T>(r: Result<T>, path: &Path, line: usize) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Format { .. } => e,
        e => Error::Format { path: path.display().to_string(), line, msg: e.to_string() },
    })
}

pub fn load_corpus(path: &Path) -> Result<Vec<Instance>> {
    let recs: Vec<CorpusRecord> = read_jsonl(path)?;
    check_unique(recs.iter().map(|r| r.id.as_str()), &path.display().to_string())?;
    recs.iter().enumerate().map(|(i, r)| at_line(r.to_instance(), path, i + 1)).collect()
}

pub fn save_corpus(path: &Path, corpus: &[Instance]) -> Result<()> {
    write_jsonl(path, &corpus.iter().map(CorpusRecord::from_instance).collect::<Vec<_>>())
}

pub fn load_forms(path: &Path) -> Result<Vec<LogicalForm>> {
    let recs: Vec<FormRecord> = read_jsonl(path)?;
    check_unique(recs.iter().map(|r| r.id.as_str()), &path.display().to_string())?;
    recs.iter().enumerate().map(|(i, r)| at_line(r.to_form(), path, i + 1)).collect()
}

pub fn save_forms(path: &Path, forms: &[LogicalForm]) -> Result<()> {
    write_jsonl(path, &forms.iter().map(FormRecord::from_form).collect::<Vec<_>>())
}

/// Map from instance id to label.
pub fn load_gold(path: &Path) -> Result<BTreeMap<String, String>> {
    let recs: Vec<GoldRecord> = read_jsonl(path)?;
    check_unique(recs.iter().map(|r| r.id.as_str()), &path.display().to_string())?;
    Ok(recs.into_iter().map(|r| (r.id, r.label)).collect())
}

/// Query phrases tokenized the way the matcher sees them, with their classes.
pub fn load_queries(path: &Path) -> Result<Vec<(Vec<String>, String)>> {
    let recs: Vec<QueryRecord> = read_jsonl(path)?;
    Ok(recs.into_iter().map(|r| (crate::logic::query_tokens(&r.query), r.class)).collect())
}

/// Resolves each explanation's source sentence, either inline or by id in
/// `corpus`.
pub fn resolve_explanations(
    recs: &[ExplanationRecord],
    corpus: &[Instance],
    path: &str,
) -> Result<Vec<AnnotatedExplanation>> {
    check_unique(recs.iter().map(|r| r.id.as_str()), path)?;
    let by_id: BTreeMap<&str, &Instance> = corpus.iter().map(|x| (x.id.as_str(), x)).collect();
    recs.iter()
        .enumerate()
        .map(|(i, r)| {
            let err = |msg: String| Error::Format { path: path.to_string(), line: i + 1, msg };
            let source = match (&r.source_instance, &r.source_id) {
                (Some(s), _) => s.to_instance().map_err(|e| err(e.to_string()))?,
                (None, Some(id)) => {
                    (*by_id.get(id.as_str()).ok_or_else(|| err(format!("unknown source_id {id}")))?).clone()
                }
                (None, None) => return Err(err(format!("explanation {} has no source", r.id))),
            };
            Ok(AnnotatedExplanation { id: r.id.clone(), text: r.text.clone(), label: r.label.clone(), source })
        })
        .collect()
}

pub fn load_explanations(path: &Path, corpus: &[Instance]) -> Result<Vec<AnnotatedExplanation>> {
    let recs: Vec<ExplanationRecord> = read_jsonl(path)?;
    resolve_explanations(&recs, corpus, &path.display().to_string())
}
