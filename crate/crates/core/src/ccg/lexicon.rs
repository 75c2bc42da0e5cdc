use std::collections::{BTreeSet, HashMap};

use super::{Category, Prim, Term};
use crate::error::{Error, Result};

/// The lexicon shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    /// Lowercased surface tokens; more than one for multiword entries.
    pub surface: Vec<String>,
    pub category: Category,
    pub semantics: Term,
}

/// Word-to-(category, semantics) mapping.
///
/// File format: one `surface<TAB>category<TAB>semantics` entry per line;
/// blank lines and lines starting with `#` are ignored. Surfaces are split on
/// whitespace, so `to the left of` is a four-token entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    by_first: HashMap<String, Vec<usize>>,
    words: BTreeSet<String>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Lexicon {
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        let mut words = BTreeSet::new();
        for (i, e) in entries.iter().enumerate() {
            by_first.entry(e.surface[0].clone()).or_default().push(i);
            words.extend(e.surface.iter().cloned());
        }
        Lexicon { entries, by_first, words }
    }

    pub fn parse(src: &str) -> Result<Lexicon> {
        let mut entries = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let err = |msg: String| Error::Lexicon { line: i + 1, msg };
            let line = line.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 tab-separated columns, found {}", cols.len())));
            }
            let surface: Vec<String> = cols[0].split_whitespace().map(str::to_lowercase).collect();
            if surface.is_empty() {
                return Err(err("empty surface".into()));
            }
            let category: Category = cols[1].trim().parse().map_err(err)?;
            let semantics = Term::parse(cols[2].trim()).map_err(err)?;
            let want = if category.is_prim(Prim::Conj) { 2 } else { category.arity() };
            if semantics.binders() != want {
                return Err(err(format!(
                    "category {category} takes {want} argument(s) but semantics binds {}",
                    semantics.binders()
                )));
            }
            entries.push(LexiconEntry { surface, category, semantics });
        }
        if entries.is_empty() {
            return Err(Error::Lexicon { line: 0, msg: "lexicon has no entries".into() });
        }
        Ok(Lexicon::new(entries))
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether the word occurs in any entry's surface.
    pub fn knows(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Entries whose surface starts at `words[0]` and fits, as `(index, length)`.
    pub fn matches_at<'a>(&'a self, words: &'a [Option<&str>]) -> impl Iterator<Item = (usize, usize)> + 'a {
        let first = words.first().copied().flatten();
        first.and_then(|w| self.by_first.get(w)).into_iter().flatten().filter_map(move |&i| {
            let s = &self.entries[i].surface;
            let fits = s.len() <= words.len() && s.iter().zip(words).all(|(a, b)| b.is_some_and(|b| b == a));
            fits.then_some((i, s.len()))
        })
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::parse(DEFAULT_LEXICON).expect("shipped lexicon parses")
    }
}

/// A token of an explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExplToken {
    /// Lowercased unquoted word.
    Word(String),
    /// Text between quotes, kept verbatim.
    Quoted(String),
    Number(i64),
}

fn closing(open: char) -> Option<char> {
    match open {
        '\'' => Some('\''),
        '"' => Some('"'),
        '‘' => Some('’'),
        '“' => Some('”'),
        _ => None,
    }
}

/// Splits an explanation into words, quoted literals and numbers. A quote
/// opens a literal only at the start of a word and closes at the next
/// matching quote that ends a word. `;` is kept as a token; other
/// punctuation is dropped.
pub fn tokenize_explanation(text: &str) -> Vec<ExplToken> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let word_char = |c: char| c.is_alphanumeric() || c == '-' || c == '_';
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if let Some(close) = closing(c) {
            let end = (i + 1..cs.len()).find(|&j| cs[j] == close && cs.get(j + 1).is_none_or(|n| !n.is_alphanumeric()));
            if let Some(end) = end {
                let lit: String = cs[i + 1..end].iter().collect();
                if !lit.trim().is_empty() {
                    out.push(ExplToken::Quoted(lit.trim().to_string()));
                }
                i = end + 1;
                continue;
            }
            i += 1;
            continue;
        }
        if word_char(c) {
            let start = i;
            while i < cs.len()
                && (word_char(cs[i]) || (cs[i] == '\'' && cs.get(i + 1).is_some_and(|n| n.is_alphanumeric())))
            {
                i += 1;
            }
            let w: String = cs[start..i].iter().collect::<String>().to_lowercase();
            match w.parse::<i64>() {
                Ok(n) => out.push(ExplToken::Number(n)),
                Err(_) => out.push(ExplToken::Word(w)),
            }
            continue;
        }
        if c == ';' {
            out.push(ExplToken::Word(";".into()));
        }
        i += 1;
    }
    out
}
