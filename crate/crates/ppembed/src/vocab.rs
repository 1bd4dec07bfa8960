//! Frequency-filtered vocabulary over a token-line corpus.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Word inventory with dense ids assigned in descending frequency order
/// (ties by first occurrence in the corpus). Suffixed and unsuffixed forms
/// of the same noun are distinct entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    word_to_id: HashMap<String, u32>,
    id_to_word: Vec<String>,
    frequency: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    pub fn id(&self, word: &str) -> Option<u32> {
        self.word_to_id.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.id_to_word[id as usize]
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.frequency[id as usize]
    }

    pub fn len(&self) -> usize {
        self.id_to_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_word.is_empty()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Words in id order (descending frequency).
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.id_to_word.iter().map(String::as_str)
    }

    /// `word<TAB>count` lines, descending count.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for (word, count) in self.id_to_word.iter().zip(&self.frequency) {
            writeln!(out, "{word}\t{count}")?;
        }
        Ok(())
    }

    /// Reads a vocabulary file produced by [`write_tsv`]. Counts must be
    /// positive and non-increasing; words must be unique.
    ///
    /// [`write_tsv`]: Vocabulary::write_tsv
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Vocabulary> {
        let mut word_to_id = HashMap::new();
        let mut id_to_word = Vec::new();
        let mut frequency: Vec<u64> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let (word, count) = line.split_once('\t').ok_or_else(|| Error::ParseLine {
                line: line_no,
                message: "expected word<TAB>count".to_string(),
            })?;
            let count: u64 = count.parse().map_err(|_| Error::ParseLine {
                line: line_no,
                message: format!("non-numeric count {count:?}"),
            })?;
            if count == 0 {
                return Err(Error::ParseLine {
                    line: line_no,
                    message: "zero count".to_string(),
                });
            }
            if let Some(&prev) = frequency.last() {
                if count > prev {
                    return Err(Error::ParseLine {
                        line: line_no,
                        message: format!("counts must be non-increasing ({count} after {prev})"),
                    });
                }
            }
            let id = id_to_word.len() as u32;
            if word_to_id.insert(word.to_string(), id).is_some() {
                return Err(Error::ParseLine {
                    line: line_no,
                    message: format!("duplicate word {word:?}"),
                });
            }
            id_to_word.push(word.to_string());
            frequency.push(count);
        }
        if id_to_word.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Vocabulary {
            word_to_id,
            id_to_word,
            frequency,
            min_count: 1,
        })
    }
}

/// Counts tokens over the corpus and keeps words with frequency ≥
/// `min_count`. A corpus with no tokens at all is an error; a corpus where
/// every word falls below `min_count` yields an empty vocabulary.
pub fn build_vocabulary<I>(corpus: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = Result<Vec<String>>>,
{
    if min_count < 1 {
        return Err(Error::InvalidConfig(format!(
            "min_count must be >= 1, got {min_count}"
        )));
    }
    let mut counts: HashMap<String, (u64, usize)> = HashMap::new();
    let mut seen = 0usize;
    let mut total_tokens = 0u64;
    for line in corpus {
        for token in line? {
            total_tokens += 1;
            counts
                .entry(token)
                .and_modify(|e| e.0 += 1)
                .or_insert_with(|| {
                    seen += 1;
                    (1, seen)
                });
        }
    }
    if total_tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut entries: Vec<(String, u64, usize)> = counts
        .into_iter()
        .filter(|(_, (count, _))| *count >= min_count)
        .map(|(word, (count, first))| (word, count, first))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let mut word_to_id = HashMap::with_capacity(entries.len());
    let mut id_to_word = Vec::with_capacity(entries.len());
    let mut frequency = Vec::with_capacity(entries.len());
    for (id, (word, count, _)) in entries.into_iter().enumerate() {
        word_to_id.insert(word.clone(), id as u32);
        id_to_word.push(word);
        frequency.push(count);
    }
    Ok(Vocabulary {
        word_to_id,
        id_to_word,
        frequency,
        min_count,
    })
}
