//! Sparse co-occurrence counting over token-line corpora.
//!
//! Within a sentence, an ordered position pair (p, q) with 0 < q−p ≤ window
//! and both tokens in the vocabulary contributes weight 1/(q−p) to
//! X(id(t_p), id(t_q)); symmetric mode mirrors the contribution. Distances
//! are measured over the original token positions, so an out-of-vocabulary
//! token widens the gap between its neighbors rather than closing it.
//! Lines never cross-count: a sentence boundary is a hard context boundary,
//! which is what makes two-token pair lines contribute exactly weight 1 per
//! direction.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoocRecord {
    pub i: u32,
    pub j: u32,
    pub x: f64,
}

/// Sparse co-occurrence table. Records are unique by (i, j), sorted, with
/// strictly positive weights; `total_mass` is the sum of all weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceTable {
    records: Vec<CoocRecord>,
    total_mass: f64,
}

impl CooccurrenceTable {
    /// Builds a table from raw records, validating uniqueness and
    /// positivity. Records are sorted by (i, j).
    pub fn from_records(mut records: Vec<CoocRecord>) -> Result<Self> {
        records.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        for pair in records.windows(2) {
            if (pair[0].i, pair[0].j) == (pair[1].i, pair[1].j) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate co-occurrence key ({}, {})",
                    pair[0].i, pair[0].j
                )));
            }
        }
        for r in &records {
            if !(r.x > 0.0) {
                return Err(Error::NonPositiveCount(r.x));
            }
        }
        let total_mass = records.iter().map(|r| r.x).sum();
        Ok(CooccurrenceTable { records, total_mass })
    }

    pub fn records(&self) -> &[CoocRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Weight for (i, j), zero when absent.
    pub fn get(&self, i: u32, j: u32) -> f64 {
        self.records
            .binary_search_by(|r| (r.i, r.j).cmp(&(i, j)))
            .map(|idx| self.records[idx].x)
            .unwrap_or(0.0)
    }

    /// Largest word id mentioned, or `None` for an empty table.
    pub fn max_id(&self) -> Option<u32> {
        self.records.iter().map(|r| r.i.max(r.j)).max()
    }

    /// `i<TAB>j<TAB>x` lines. Weights use the shortest representation that
    /// round-trips, so write→read is lossless.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            writeln!(out, "{}\t{}\t{}", r.i, r.j, r.x)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let mut field = |name: &str| {
                cols.next().ok_or_else(|| Error::ParseLine {
                    line: line_no,
                    message: format!("missing {name} column"),
                })
            };
            let i = field("i")?;
            let j = field("j")?;
            let x = field("x")?;
            let parse_err = |what: &str, v: &str| Error::ParseLine {
                line: line_no,
                message: format!("bad {what} {v:?}"),
            };
            records.push(CoocRecord {
                i: i.parse().map_err(|_| parse_err("word id", i))?,
                j: j.parse().map_err(|_| parse_err("word id", j))?,
                x: x.parse().map_err(|_| parse_err("weight", x))?,
            });
        }
        CooccurrenceTable::from_records(records)
    }
}

fn accumulate(
    acc: &mut HashMap<(u32, u32), f64>,
    ids: &[Option<u32>],
    window: usize,
    symmetric: bool,
) {
    for p in 0..ids.len() {
        let Some(i) = ids[p] else { continue };
        for q in (p + 1)..ids.len().min(p + window + 1) {
            let Some(j) = ids[q] else { continue };
            let w = 1.0 / (q - p) as f64;
            *acc.entry((i, j)).or_insert(0.0) += w;
            if symmetric {
                *acc.entry((j, i)).or_insert(0.0) += w;
            }
        }
    }
}

fn into_table(acc: HashMap<(u32, u32), f64>) -> Result<CooccurrenceTable> {
    let records = acc
        .into_iter()
        .map(|((i, j), x)| CoocRecord { i, j, x })
        .collect();
    CooccurrenceTable::from_records(records)
}

/// Streams the corpus once and counts co-occurrences against `vocab`.
pub fn count_cooccurrences<I>(
    corpus: I,
    vocab: &Vocabulary,
    window: usize,
    symmetric: bool,
) -> Result<CooccurrenceTable>
where
    I: IntoIterator<Item = Result<Vec<String>>>,
{
    if window < 1 {
        return Err(Error::InvalidConfig("window must be >= 1".to_string()));
    }
    let mut acc = HashMap::new();
    for line in corpus {
        let ids: Vec<Option<u32>> = line?.iter().map(|t| vocab.id(t)).collect();
        accumulate(&mut acc, &ids, window, symmetric);
    }
    into_table(acc)
}

/// Counts over sentence shards in parallel and merges the partial tables by
/// key-wise addition. Equal to the streaming count up to floating-point
/// addition order.
pub fn count_cooccurrences_parallel(
    sentences: &[Vec<String>],
    vocab: &Vocabulary,
    window: usize,
    symmetric: bool,
    threads: usize,
) -> Result<CooccurrenceTable> {
    if window < 1 {
        return Err(Error::InvalidConfig("window must be >= 1".to_string()));
    }
    if threads < 1 {
        return Err(Error::InvalidConfig("threads must be >= 1".to_string()));
    }
    let chunk = sentences.len().div_ceil(threads).max(1);
    let partials: Vec<HashMap<(u32, u32), f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = sentences
            .chunks(chunk)
            .map(|shard| {
                scope.spawn(move || {
                    let mut acc = HashMap::new();
                    for sentence in shard {
                        let ids: Vec<Option<u32>> =
                            sentence.iter().map(|t| vocab.id(t)).collect();
                        accumulate(&mut acc, &ids, window, symmetric);
                    }
                    acc
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut merged: HashMap<(u32, u32), f64> = HashMap::new();
    for partial in partials {
        for (key, x) in partial {
            *merged.entry(key).or_insert(0.0) += x;
        }
    }
    into_table(merged)
}
