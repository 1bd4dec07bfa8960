//! Immutable store over an exported vector file, with cosine similarity and
//! exact nearest-neighbor queries (full scan; vocabularies at this scale
//! rank in milliseconds and evaluation wants exactness).

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorStore {
    vectors: HashMap<String, Vec<f64>>,
    /// First-seen order, for reproducible serialization.
    words: Vec<String>,
    dimension: usize,
}

/// u·v / (‖u‖‖v‖). Zero-norm input is an error; callers exclude such
/// vectors rather than scoring them.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cosine of {}-dim and {}-dim vectors",
            u.len(),
            v.len()
        )));
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

impl VectorStore {
    /// Builds a store from (word, vector) pairs. All vectors must share one
    /// dimension; a repeated word keeps its first position and the last
    /// vector.
    pub fn from_pairs(pairs: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut store = VectorStore {
            vectors: HashMap::new(),
            words: Vec::new(),
            dimension: 0,
        };
        for (word, vector) in pairs {
            store.insert(word, vector, 0)?;
        }
        if store.words.is_empty() {
            return Err(Error::EmptyVectorFile);
        }
        Ok(store)
    }

    fn insert(&mut self, word: String, vector: Vec<f64>, line: usize) -> Result<()> {
        if vector.is_empty() {
            return Err(Error::ParseLine {
                line,
                message: format!("word {word:?} has no vector components"),
            });
        }
        if self.words.is_empty() {
            self.dimension = vector.len();
        } else if vector.len() != self.dimension {
            return Err(Error::ParseLine {
                line,
                message: format!(
                    "word {word:?} has {} components, expected {}",
                    vector.len(),
                    self.dimension
                ),
            });
        }
        if self.vectors.insert(word.clone(), vector).is_some() {
            log::warn!("duplicate vector entry for {word:?}; keeping the last one");
        } else {
            self.words.push(word);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    /// Words in load order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Vector for a word, or an explicit miss. The raw form is tried first,
    /// then the lowercased form, so callers may pass unnormalized heads
    /// without clobbering case-bearing keys like suffixed tokens.
    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        if let Some(v) = self.vectors.get(word) {
            return Some(v);
        }
        self.vectors.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    fn resolve_key(&self, word: &str) -> Option<&str> {
        if let Some((key, _)) = self.vectors.get_key_value(word) {
            return Some(key);
        }
        self.vectors
            .get_key_value(&word.to_lowercase())
            .map(|(key, _)| key.as_str())
    }

    /// The `k` highest-cosine words for the query, descending, ties broken
    /// lexicographically; the query itself is excluded and `k` clips to the
    /// store size. Zero-norm entries are unrankable and skipped.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".to_string()));
        }
        let key = self
            .resolve_key(word)
            .ok_or_else(|| Error::WordNotFound(word.to_string()))?;
        let query = &self.vectors[key];
        let mut scored: Vec<(String, f64)> = Vec::new();
        for (other, vector) in &self.vectors {
            if other == key {
                continue;
            }
            match cosine(query, vector) {
                Ok(score) => scored.push((other.clone(), score)),
                Err(Error::ZeroVector) => continue,
                Err(e) => return Err(e),
            }
        }
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("cosine is finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        scored.truncate(k);
        Ok(scored)
    }

    /// Writes `word v_1 … v_d` lines at 6 decimal places in load order;
    /// loading a file and writing it back reproduces the bytes.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for word in &self.words {
            out.write_all(word.as_bytes())?;
            for value in &self.vectors[word] {
                write!(out, " {value:.6}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Parses an exported vector file.
pub fn load_vectors<R: BufRead>(reader: R) -> Result<VectorStore> {
    let mut store = VectorStore {
        vectors: HashMap::new(),
        words: Vec::new(),
        dimension: 0,
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-empty line has a first field");
        let mut vector = Vec::new();
        for field in fields {
            let value: f64 = field.parse().map_err(|_| Error::ParseLine {
                line: line_no,
                message: format!("bad vector component {field:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::ParseLine {
                    line: line_no,
                    message: format!("non-finite vector component {field:?}"),
                });
            }
            vector.push(value);
        }
        store.insert(word.to_string(), vector, line_no)?;
    }
    if store.words.is_empty() {
        return Err(Error::EmptyVectorFile);
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_store() -> VectorStore {
        VectorStore::from_pairs(vec![
            ("a".to_string(), vec![1.0, 0.0]),
            ("b".to_string(), vec![0.0, 1.0]),
            ("c".to_string(), vec![1.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn loads_consistent_file() {
        let mut text = String::new();
        for word in ["alpha", "beta", "gamma"] {
            text.push_str(word);
            for k in 0..100 {
                text.push_str(&format!(" {:.6}", (k as f64) / 100.0 + 0.25));
            }
            text.push('\n');
        }
        let store = load_vectors(text.as_bytes()).unwrap();
        assert_eq!(store.len(), 3);
        assert_eq!(store.dimension(), 100);
    }

    #[test]
    fn inconsistent_dimension_names_line() {
        let text = "a 1.0 2.0 3.0\nb 1.0 2.0\n";
        match load_vectors(text.as_bytes()) {
            Err(Error::ParseLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(
            load_vectors("".as_bytes()),
            Err(Error::EmptyVectorFile)
        ));
    }

    #[test]
    fn word_only_line_rejected() {
        assert!(load_vectors("a\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicate_word_keeps_last_vector() {
        let store = load_vectors("a 1.0 0.0\na 0.0 2.0\nb 1.0 1.0\n".as_bytes()).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.lookup("a").unwrap(), &[0.0, 2.0]);
    }

    #[test]
    fn load_write_round_trip() {
        let text = "a 0.500000 -0.250000\nb 1.000000 0.000000\n";
        let store = load_vectors(text.as_bytes()).unwrap();
        let mut buf = Vec::new();
        store.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn cosine_examples() {
        let v = vec![0.3, -1.2, 0.7];
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - 0.7071067811865475).abs() < 1e-12);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn cosine_symmetry_and_scale_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = rng.gen_range(0.1..10.0);
            let uv = cosine(&u, &v).unwrap();
            assert!((-1.0..=1.0).contains(&uv));
            assert!((uv - cosine(&v, &u).unwrap()).abs() < 1e-12);
            let scaled: Vec<f64> = u.iter().map(|x| x * c).collect();
            assert!((uv - cosine(&scaled, &v).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn neighbors_rank_descending_with_query_excluded() {
        let store = toy_store();
        let hits = store.nearest_neighbors("a", 5).unwrap();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "c");
        assert_eq!(hits[1].0, "b");
        assert!(hits[0].1 >= hits[1].1);
        assert!(!hits.iter().any(|(w, _)| w == "a"));
    }

    #[test]
    fn neighbor_ties_break_lexicographically() {
        let store = VectorStore::from_pairs(vec![
            ("query".to_string(), vec![1.0, 0.0]),
            ("zed".to_string(), vec![2.0, 0.0]),
            ("ape".to_string(), vec![3.0, 0.0]),
        ])
        .unwrap();
        let hits = store.nearest_neighbors("query", 2).unwrap();
        assert_eq!(hits[0].0, "ape");
        assert_eq!(hits[1].0, "zed");
        assert_eq!(hits[0].1, hits[1].1);
    }

    #[test]
    fn absent_word_and_bad_k_error() {
        let store = toy_store();
        assert!(matches!(
            store.nearest_neighbors("missing", 3),
            Err(Error::WordNotFound(_))
        ));
        assert!(store.nearest_neighbors("a", 0).is_err());
    }

    #[test]
    fn zero_norm_entries_are_skipped_in_ranking() {
        let store = VectorStore::from_pairs(vec![
            ("a".to_string(), vec![1.0, 0.0]),
            ("dead".to_string(), vec![0.0, 0.0]),
            ("b".to_string(), vec![1.0, 1.0]),
        ])
        .unwrap();
        let hits = store.nearest_neighbors("a", 5).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, "b");
    }

    #[test]
    fn lookup_normalizes_but_prefers_exact() {
        let store = VectorStore::from_pairs(vec![
            ("ministers".to_string(), vec![1.0, 0.0]),
            ("ministers_PP".to_string(), vec![0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(store.lookup("Ministers").unwrap(), &[1.0, 0.0]);
        assert_eq!(store.lookup("ministers_PP").unwrap(), &[0.0, 1.0]);
        assert!(store.lookup("senators").is_none());
        assert!(store.lookup("Ministers_PP").is_none());
    }

    #[test]
    fn neighbors_match_independent_selection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pairs: Vec<(String, Vec<f64>)> = (0..300)
            .map(|i| {
                let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (format!("w{i}"), v)
            })
            .collect();
        let store = VectorStore::from_pairs(pairs.clone()).unwrap();
        let query = "w17";
        let k = 10;
        let fast = store.nearest_neighbors(query, k).unwrap();

        // Selection-based oracle: repeatedly pull the best remaining word.
        let qv = pairs.iter().find(|(w, _)| w == query).unwrap().1.clone();
        let mut remaining: Vec<(String, f64)> = pairs
            .iter()
            .filter(|(w, _)| w != query)
            .map(|(w, v)| {
                let dot: f64 = qv.iter().zip(v).map(|(a, b)| a * b).sum();
                let n1: f64 = qv.iter().map(|a| a * a).sum::<f64>().sqrt();
                let n2: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                (w.clone(), dot / (n1 * n2))
            })
            .collect();
        let mut slow = Vec::new();
        for _ in 0..k {
            let best = remaining
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| {
                    a.1.partial_cmp(&b.1).unwrap().then_with(|| b.0.cmp(&a.0))
                })
                .map(|(idx, _)| idx)
                .unwrap();
            slow.push(remaining.swap_remove(best));
        }
        assert_eq!(fast.len(), slow.len());
        for (f, s) in fast.iter().zip(&slow) {
            assert_eq!(f.0, s.0);
            assert!((f.1 - s.1).abs() < 1e-12);
        }
    }
}
