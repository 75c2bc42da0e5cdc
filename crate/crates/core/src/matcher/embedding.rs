use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Frozen word vectors. Keys are lowercased; out-of-vocabulary words map to
/// the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> EmbeddingTable {
        EmbeddingTable { dim, index: HashMap::new(), words: Vec::new(), data: Vec::new() }
    }

    /// Adds or replaces a vector.
    pub fn insert(&mut self, word: &str, vec: &[f64]) -> Result<()> {
        if vec.len() != self.dim {
            return Err(Error::Config(format!(
                "embedding for {word:?} has {} components, table dimension is {}",
                vec.len(),
                self.dim
            )));
        }
        let key = word.to_lowercase();
        match self.index.get(&key) {
            Some(&i) => self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vec),
            None => {
                self.index.insert(key.clone(), self.words.len());
                self.words.push(key);
                self.data.extend_from_slice(vec);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        let i = *self.index.get(word).or_else(|| self.index.get(&word.to_lowercase()))?;
        Some(&self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.get(word).is_some()
    }

    /// Reads the common text format: one `word v1 ... v_dim` per line. A
    /// leading `count dim` header line is accepted and skipped.
    pub fn read_text(r: impl BufRead, path: &str) -> Result<EmbeddingTable> {
        let mut table: Option<EmbeddingTable> = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();
            if lineno == 0 && rest.len() == 1 && word.parse::<usize>().is_ok() && rest[0].parse::<usize>().is_ok() {
                continue;
            }
            let vec = rest
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Format { path: path.into(), line: lineno + 1, msg: e.to_string() })?;
            let t = table.get_or_insert_with(|| EmbeddingTable::new(vec.len()));
            t.insert(word, &vec).map_err(|e| Error::Format {
                path: path.into(),
                line: lineno + 1,
                msg: e.to_string(),
            })?;
        }
        table.ok_or_else(|| Error::Format { path: path.into(), line: 0, msg: "no vectors".into() })
    }

    /// Writes vectors in insertion order with round-trippable float formatting.
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        for (i, word) in self.words.iter().enumerate() {
            write!(w, "{word}")?;
            for x in &self.data[i * self.dim..(i + 1) * self.dim] {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let src = "2 3\nfair 0.5 -1 2\nPrice 0.1 0.2 0.30000000000000004\n";
        let t = EmbeddingTable::read_text(src.as_bytes(), "mem").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("price").unwrap()[2], 0.30000000000000004);
        assert_eq!(t.get("PRICE"), t.get("price"));
        let mut out = Vec::new();
        t.write_text(&mut out).unwrap();
        let back = EmbeddingTable::read_text(out.as_slice(), "mem").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = EmbeddingTable::read_text("a 1 2\nb 1\n".as_bytes(), "e.txt").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
    }
}
