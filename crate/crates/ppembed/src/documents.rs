//! Bridging-document interchange: tokenized sentences plus markable
//! annotations (spans, heads, anaphor flags, gold antecedents, entity ids).
//!
//! The on-disk form is JSON, one document object per file (a stream holding
//! an array of documents is also accepted). Token indices are 0-based;
//! markable spans are inclusive on both ends.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::PosTag;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocToken {
    pub surface: String,
    pub upos: PosTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Markable {
    /// Document-unique id.
    pub id: String,
    /// First token of the span, 0-based.
    pub start: usize,
    /// Last token of the span, inclusive.
    pub end: usize,
    /// Head token index; lies within [start, end].
    pub head: usize,
    #[serde(default)]
    pub is_anaphor: bool,
    /// Gold antecedent markable ids; required non-empty for anaphors.
    #[serde(default)]
    pub gold_antecedents: Vec<String>,
    /// Coreference cluster id, when annotated.
    #[serde(default)]
    pub entity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocSentence {
    pub tokens: Vec<DocToken>,
    #[serde(default)]
    pub markables: Vec<Markable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgingDocument {
    pub doc_id: String,
    pub sentences: Vec<DocSentence>,
}

/// A markable together with its sentence index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkableAt<'a> {
    pub sentence: usize,
    pub markable: &'a Markable,
}

impl BridgingDocument {
    /// All markables in document order: by sentence, then span start, then
    /// span end, then annotation order.
    pub fn ordered_markables(&self) -> Vec<MarkableAt<'_>> {
        let mut all: Vec<(usize, usize, MarkableAt)> = Vec::new();
        for (s_idx, sentence) in self.sentences.iter().enumerate() {
            for (m_idx, markable) in sentence.markables.iter().enumerate() {
                all.push((
                    s_idx,
                    m_idx,
                    MarkableAt {
                        sentence: s_idx,
                        markable,
                    },
                ));
            }
        }
        all.sort_by_key(|(s, m, at)| (*s, at.markable.start, at.markable.end, *m));
        all.into_iter().map(|(_, _, at)| at).collect()
    }

    pub fn find(&self, id: &str) -> Option<MarkableAt<'_>> {
        for (s_idx, sentence) in self.sentences.iter().enumerate() {
            if let Some(markable) = sentence.markables.iter().find(|m| m.id == id) {
                return Some(MarkableAt {
                    sentence: s_idx,
                    markable,
                });
            }
        }
        None
    }

    /// Position of a markable in document order.
    pub fn rank(&self, id: &str) -> Option<usize> {
        self.ordered_markables()
            .iter()
            .position(|at| at.markable.id == id)
    }

    pub fn anaphors(&self) -> Vec<MarkableAt<'_>> {
        self.ordered_markables()
            .into_iter()
            .filter(|at| at.markable.is_anaphor)
            .collect()
    }

    /// Surface form of a markable's head token.
    pub fn head_surface(&self, at: MarkableAt<'_>) -> &str {
        &self.sentences[at.sentence].tokens[at.markable.head].surface
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::InvalidDocument {
            doc_id: self.doc_id.clone(),
            message,
        };
        let mut ids = std::collections::HashSet::new();
        for (s_idx, sentence) in self.sentences.iter().enumerate() {
            for m in &sentence.markables {
                if !ids.insert(m.id.as_str()) {
                    return Err(fail(format!("duplicate markable id {:?}", m.id)));
                }
                if m.start > m.end {
                    return Err(fail(format!("markable {:?} has start after end", m.id)));
                }
                if m.end >= sentence.tokens.len() {
                    return Err(fail(format!(
                        "markable {:?} extends past sentence {s_idx} ({} tokens)",
                        m.id,
                        sentence.tokens.len()
                    )));
                }
                if m.head < m.start || m.head > m.end {
                    return Err(fail(format!("markable {:?} head outside its span", m.id)));
                }
            }
        }
        let order: Vec<&str> = self
            .ordered_markables()
            .iter()
            .map(|at| at.markable.id.as_str())
            .collect();
        let rank_of = |id: &str| order.iter().position(|x| *x == id);
        for at in self.ordered_markables() {
            let m = at.markable;
            if !m.is_anaphor {
                continue;
            }
            if m.gold_antecedents.is_empty() {
                return Err(fail(format!("anaphor {:?} has no gold antecedents", m.id)));
            }
            let own_rank = rank_of(&m.id).expect("markable is in its own document");
            for gold in &m.gold_antecedents {
                let Some(gold_at) = self.find(gold) else {
                    return Err(fail(format!(
                        "anaphor {:?} references missing antecedent {gold:?}",
                        m.id
                    )));
                };
                let gold_rank = rank_of(gold).expect("found markable has a rank");
                if gold_rank >= own_rank && gold_at.sentence != 0 {
                    return Err(fail(format!(
                        "gold antecedent {gold:?} does not precede anaphor {:?}",
                        m.id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<BridgingDocument>),
    One(Box<BridgingDocument>),
}

/// Reads one document object or an array of them and validates each.
pub fn read_bridging_documents<R: Read>(reader: R, label: &str) -> Result<Vec<BridgingDocument>> {
    let parsed: OneOrMany = serde_json::from_reader(reader).map_err(|source| Error::Json {
        path: label.to_string(),
        source,
    })?;
    let docs = match parsed {
        OneOrMany::Many(docs) => docs,
        OneOrMany::One(doc) => vec![*doc],
    };
    for doc in &docs {
        doc.validate()?;
    }
    Ok(docs)
}

/// Loads every `*.json` file of a directory in file-name order. A directory
/// without document files yields an empty list.
pub fn read_bridging_documents_dir(dir: &Path) -> Result<Vec<BridgingDocument>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut docs = Vec::new();
    for path in paths {
        let file = BufReader::new(File::open(&path)?);
        docs.extend(read_bridging_documents(file, &path.display().to_string())?);
    }
    Ok(docs)
}
