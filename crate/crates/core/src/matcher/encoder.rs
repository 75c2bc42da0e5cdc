use std::fmt::Debug;

use super::EmbeddingTable;

/// Maps a window of lowercased tokens to a single vector of the embedding
/// dimension. Implementations must be deterministic.
pub trait ContextEncoder: Debug + Send + Sync {
    /// Stable identifier stored in checkpoints.
    fn id(&self) -> &'static str;
    fn encode(&self, emb: &EmbeddingTable, tokens: &[String]) -> Vec<f64>;
}

/// Average of member embeddings, with unknown words counted as zeros.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanEncoder;

impl ContextEncoder for MeanEncoder {
    fn id(&self) -> &'static str {
        "mean"
    }

    fn encode(&self, emb: &EmbeddingTable, tokens: &[String]) -> Vec<f64> {
        let mut out = vec![0.0; emb.dim()];
        if tokens.is_empty() {
            return out;
        }
        for t in tokens {
            if let Some(v) = emb.get(t) {
                out.iter_mut().zip(v).for_each(|(o, x)| *o += x);
            }
        }
        let n = tokens.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }
}

/// Number of window shapes up to `max_window`: every window of length
/// `1..=max_window` that contains the centre token.
pub fn num_windows(max_window: usize) -> usize {
    max_window * (max_window + 1) / 2
}

/// Token ranges of the windows around position `i`, in a fixed order:
/// by length, then from the window ending at `i` to the one starting at `i`.
/// For `max_window = 2` that is `[w_i]`, `[w_{i-1}; w_i]`, `[w_i; w_{i+1}]`.
/// Windows reaching past a sentence edge are truncated to it.
pub fn windows(n: usize, i: usize, max_window: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(num_windows(max_window));
    for w in 1..=max_window {
        for back in (0..w).rev() {
            let s = i as isize - back as isize;
            let e = s + w as isize;
            out.push((s.max(0) as usize, (e as usize).min(n)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_shapes() {
        assert_eq!(num_windows(2), 3);
        assert_eq!(num_windows(3), 6);
        assert_eq!(windows(5, 2, 2), vec![(2, 3), (1, 3), (2, 4)]);
        assert_eq!(windows(1, 0, 2), vec![(0, 1); 3]);
        assert_eq!(windows(4, 3, 3)[5], (3, 4));
    }

    #[test]
    fn mean_of_members() {
        let mut emb = EmbeddingTable::new(2);
        emb.insert("a", &[1.0, 0.0]).unwrap();
        emb.insert("b", &[0.0, 3.0]).unwrap();
        let toks = |s: &[&str]| s.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        assert_eq!(MeanEncoder.encode(&emb, &toks(&["a", "b"])), vec![0.5, 1.5]);
        assert_eq!(MeanEncoder.encode(&emb, &toks(&["b"])), vec![0.0, 3.0]);
        assert_eq!(MeanEncoder.encode(&emb, &toks(&["zzz"])), vec![0.0, 0.0]);
    }
}
