use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorRole {
    Subject,
    Object,
    Term,
}

impl AnchorRole {
    pub const ALL: [AnchorRole; 3] = [AnchorRole::Subject, AnchorRole::Object, AnchorRole::Term];
}

impl fmt::Display for AnchorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorRole::Subject => "SUBJECT",
            AnchorRole::Object => "OBJECT",
            AnchorRole::Term => "TERM",
        })
    }
}

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }
}

/// A tokenized sentence with its anchor spans.
///
/// Original casing is kept in `tokens`; matching always uses the lowercased copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    tokens: Vec<String>,
    lower: Vec<String>,
    anchors: BTreeMap<AnchorRole, Span>,
}

impl Instance {
    pub fn new(id: impl Into<String>, tokens: Vec<String>, anchors: BTreeMap<AnchorRole, Span>) -> Result<Instance> {
        let id = id.into();
        for (role, span) in &anchors {
            if span.is_empty() || span.end > tokens.len() {
                return Err(Error::InvalidInstance(format!(
                    "{id}: {role} span {}..{} outside {} tokens",
                    span.start,
                    span.end,
                    tokens.len()
                )));
            }
        }
        let lower = tokens.iter().map(|t| t.to_lowercase()).collect();
        Ok(Instance { id, tokens, lower, anchors })
    }

    /// Builds an instance from raw text, locating anchors by role tokens:
    /// `SUBJ-*` runs become the subject, `OBJ-*` runs the object, `TERM` the term.
    pub fn from_text(id: impl Into<String>, text: &str) -> Result<Instance> {
        let tokens = tokenize(text);
        let anchors = infer_role_anchors(&tokens);
        Instance::new(id, tokens, anchors)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn lower(&self) -> &[String] {
        &self.lower
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn anchors(&self) -> &BTreeMap<AnchorRole, Span> {
        &self.anchors
    }

    pub fn anchor(&self, role: AnchorRole) -> Result<Span> {
        self.anchors.get(&role).copied().ok_or(Error::AnchorMissing(role))
    }
}

/// First contiguous run of role-marked tokens per role.
pub fn infer_role_anchors(tokens: &[String]) -> BTreeMap<AnchorRole, Span> {
    let mut out = BTreeMap::new();
    for role in AnchorRole::ALL {
        let is_role = |t: &str| {
            let t = t.to_ascii_uppercase();
            match role {
                AnchorRole::Subject => t == "SUBJ" || t.starts_with("SUBJ-"),
                AnchorRole::Object => t == "OBJ" || t.starts_with("OBJ-"),
                AnchorRole::Term => t == "TERM",
            }
        };
        if let Some(start) = tokens.iter().position(|t| is_role(t)) {
            let mut end = start + 1;
            while end < tokens.len() && is_role(&tokens[end]) {
                end += 1;
            }
            out.insert(role, Span::new(start, end));
        }
    }
    out
}

fn is_split_punct(c: char) -> bool {
    c.is_ascii_punctuation() && c != '-' && c != '\'' && c != '_'
}

/// Whitespace + punctuation tokenizer. Punctuation other than `-`, `_` and
/// word-internal apostrophes becomes its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut cur = String::new();
        let chars: Vec<char> = chunk.chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            let edge_quote = matches!(c, '\'' | '‘' | '’') && (i == 0 || i + 1 == chars.len());
            if is_split_punct(c) || edge_quote || matches!(c, '“' | '”') {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// Ordered class names with one distinguished "none" class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    labels: Vec<String>,
    none: usize,
}

impl LabelSet {
    pub fn new(labels: Vec<String>, none_label: &str) -> Result<LabelSet> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidLabels(format!("duplicate label {l}")));
            }
        }
        let none = labels
            .iter()
            .position(|l| l == none_label)
            .ok_or_else(|| Error::InvalidLabels(format!("none label {none_label} missing")))?;
        Ok(LabelSet { labels, none })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn none_index(&self) -> usize {
        self.none
    }

    pub fn none_label(&self) -> &str {
        &self.labels[self.none]
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_splits_punctuation() {
        assert_eq!(
            tokenize("Quality ingredients, and a very fair price for NYC."),
            vec!["Quality", "ingredients", ",", "and", "a", "very", "fair", "price", "for", "NYC", "."]
        );
        assert_eq!(tokenize("it's eye-pleasing"), vec!["it's", "eye-pleasing"]);
        assert_eq!(tokenize("'fair'"), vec!["'", "fair", "'"]);
    }

    #[test]
    fn anchors_from_role_tokens() {
        let x = Instance::from_text("1", "OBJ-ORGANIZATION coach SUBJ-PERSON SUBJ-PERSON insisted").unwrap();
        assert_eq!(x.anchor(AnchorRole::Object).unwrap(), Span::new(0, 1));
        assert_eq!(x.anchor(AnchorRole::Subject).unwrap(), Span::new(2, 4));
        assert!(matches!(x.anchor(AnchorRole::Term), Err(Error::AnchorMissing(AnchorRole::Term))));
    }

    #[test]
    fn rejects_bad_spans() {
        let toks = vec!["a".to_string(), "b".to_string()];
        let mut anchors = BTreeMap::new();
        anchors.insert(AnchorRole::Term, Span::new(1, 3));
        assert!(Instance::new("x", toks.clone(), anchors.clone()).is_err());
        anchors.insert(AnchorRole::Term, Span::new(1, 1));
        assert!(Instance::new("x", toks, anchors).is_err());
    }

    #[test]
    fn label_set_invariants() {
        let l = LabelSet::new(vec!["pos".into(), "neg".into(), "neutral".into()], "neutral").unwrap();
        assert_eq!(l.none_index(), 2);
        assert!(LabelSet::new(vec!["a".into(), "a".into()], "a").is_err());
        assert!(LabelSet::new(vec!["a".into()], "none").is_err());
    }
}
