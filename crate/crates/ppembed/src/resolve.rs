//! Bridging-anaphora resolution: candidate-list construction, relatedness
//! scoring against a vector store, antecedent selection, and evaluation.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::corpus::{normalize_token, PosTag};
use crate::documents::{BridgingDocument, MarkableAt};
use crate::error::{Error, Result};
use crate::extract::PP_SUFFIX;
use crate::store::{cosine, VectorStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolveMode {
    /// Score cosine(anaphor head + suffix, candidate head).
    HeadOnly,
    /// Score cosine of NP mean vectors (head plus pre-head common nouns).
    NpAverage,
}

/// Antecedent candidates for one anaphor, in document order.
#[derive(Debug, Clone)]
pub struct CandidateList<'a> {
    pub anaphor: MarkableAt<'a>,
    pub candidates: Vec<MarkableAt<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    pub anaphor: String,
    /// Winning markable id, or `None` when no candidate was scorable.
    pub antecedent: Option<String>,
    /// Cosine of the winning candidate; 0 when unresolved.
    pub score: f64,
    pub mode: ResolveMode,
}

/// Candidates for an anaphor: markables preceding it within its sentence,
/// all markables of the two sentences before that, and all markables of
/// sentence 0, deduplicated, in document order.
pub fn build_candidate_list<'a>(
    doc: &'a BridgingDocument,
    anaphor_id: &str,
) -> Result<CandidateList<'a>> {
    let anaphor = doc.find(anaphor_id).ok_or_else(|| Error::UnknownAnaphor {
        doc_id: doc.doc_id.clone(),
        anaphor: anaphor_id.to_string(),
    })?;
    if !anaphor.markable.is_anaphor {
        return Err(Error::InvalidDocument {
            doc_id: doc.doc_id.clone(),
            message: format!("markable {anaphor_id:?} is not an anaphor"),
        });
    }
    let ordered = doc.ordered_markables();
    let anaphor_rank = ordered
        .iter()
        .position(|at| at.markable.id == anaphor_id)
        .expect("anaphor was found in this document");
    let s = anaphor.sentence;
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for (rank, at) in ordered.iter().enumerate() {
        if at.markable.id == anaphor_id {
            continue;
        }
        let same_sentence_before = at.sentence == s && rank < anaphor_rank;
        let previous_two = at.sentence + 2 >= s && at.sentence < s;
        let first_sentence = at.sentence == 0;
        if (same_sentence_before || previous_two || first_sentence)
            && seen.insert(at.markable.id.as_str())
        {
            candidates.push(*at);
        }
    }
    Ok(CandidateList { anaphor, candidates })
}

/// The anaphor's store query in suffix mode: lowercased head plus the head
/// suffix.
pub fn anaphor_query_token(head: &str) -> String {
    let mut t = normalize_token(head);
    t.push_str(PP_SUFFIX);
    t
}

fn lookup_with_fallback<'s>(store: &'s VectorStore, word: &str, suffixed: bool) -> Option<&'s [f64]> {
    if suffixed {
        let mut key = word.to_string();
        key.push_str(PP_SUFFIX);
        if let Some(v) = store.lookup(&key) {
            return Some(v);
        }
    }
    store.lookup(word)
}

/// Mean vector over the NP's head and its pre-head common nouns (tokens in
/// the span strictly before the head with NOUN tag). With `as_anaphor` each
/// token queries its suffixed form first, falling back to the plain form.
/// Tokens absent from the store are skipped; `None` when nothing is found.
pub fn np_vector(
    doc: &BridgingDocument,
    at: MarkableAt<'_>,
    store: &VectorStore,
    as_anaphor: bool,
) -> Option<Vec<f64>> {
    let tokens = &doc.sentences[at.sentence].tokens;
    let m = at.markable;
    let mut members: Vec<usize> = (m.start..m.head)
        .filter(|&k| tokens[k].upos == PosTag::Noun)
        .collect();
    members.push(m.head);
    let mut sum: Option<Vec<f64>> = None;
    let mut found = 0usize;
    for k in members {
        let word = normalize_token(&tokens[k].surface);
        let Some(v) = lookup_with_fallback(store, &word, as_anaphor) else {
            continue;
        };
        found += 1;
        match &mut sum {
            None => sum = Some(v.to_vec()),
            Some(acc) => {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
            }
        }
    }
    sum.map(|mut acc| {
        for a in &mut acc {
            *a /= found as f64;
        }
        acc
    })
}

fn query_vector<'s>(
    doc: &BridgingDocument,
    cands: &CandidateList<'_>,
    store: &'s VectorStore,
    mode: ResolveMode,
    suffix_query: bool,
) -> Option<Vec<f64>> {
    match mode {
        ResolveMode::HeadOnly => {
            let head = normalize_token(doc.head_surface(cands.anaphor));
            lookup_with_fallback(store, &head, suffix_query).map(<[f64]>::to_vec)
        }
        ResolveMode::NpAverage => np_vector(doc, cands.anaphor, store, suffix_query),
    }
}

fn candidate_vector(
    doc: &BridgingDocument,
    at: MarkableAt<'_>,
    store: &VectorStore,
    mode: ResolveMode,
) -> Option<Vec<f64>> {
    match mode {
        ResolveMode::HeadOnly => {
            let head = normalize_token(doc.head_surface(at));
            store.lookup(&head).map(<[f64]>::to_vec)
        }
        ResolveMode::NpAverage => np_vector(doc, at, store, false),
    }
}

/// Picks the highest-cosine candidate. Ties go to the candidate closest to
/// the anaphor in document order; unscoreable candidates are excluded; an
/// anaphor with no scorable candidate is unresolved.
pub fn resolve_with_options(
    doc: &BridgingDocument,
    cands: &CandidateList<'_>,
    store: &VectorStore,
    mode: ResolveMode,
    suffix_query: bool,
) -> Prediction {
    let unresolved = Prediction {
        doc_id: doc.doc_id.clone(),
        anaphor: cands.anaphor.markable.id.clone(),
        antecedent: None,
        score: 0.0,
        mode,
    };
    let Some(query) = query_vector(doc, cands, store, mode, suffix_query) else {
        return unresolved;
    };
    let rank: HashMap<&str, usize> = doc
        .ordered_markables()
        .iter()
        .enumerate()
        .map(|(i, at)| (at.markable.id.as_str(), i))
        .collect();
    let anaphor_rank = rank[cands.anaphor.markable.id.as_str()];
    let mut best: Option<(&MarkableAt, f64, usize)> = None;
    for at in &cands.candidates {
        let Some(v) = candidate_vector(doc, *at, store, mode) else {
            continue;
        };
        let Ok(score) = cosine(&query, &v) else {
            continue;
        };
        let distance = anaphor_rank.abs_diff(rank[at.markable.id.as_str()]);
        let better = match best {
            None => true,
            Some((_, best_score, best_distance)) => {
                score > best_score || (score == best_score && distance < best_distance)
            }
        };
        if better {
            best = Some((at, score, distance));
        }
    }
    match best {
        None => unresolved,
        Some((at, score, _)) => Prediction {
            antecedent: Some(at.markable.id.clone()),
            score,
            ..unresolved
        },
    }
}

pub fn resolve(
    doc: &BridgingDocument,
    cands: &CandidateList<'_>,
    store: &VectorStore,
    mode: ResolveMode,
) -> Prediction {
    resolve_with_options(doc, cands, store, mode, true)
}

/// Resolves every anaphor of the document in document order.
pub fn resolve_document(
    doc: &BridgingDocument,
    store: &VectorStore,
    mode: ResolveMode,
    suffix_query: bool,
) -> Result<Vec<Prediction>> {
    let mut predictions = Vec::new();
    for anaphor in doc.anaphors() {
        let cands = build_candidate_list(doc, &anaphor.markable.id)?;
        predictions.push(resolve_with_options(doc, &cands, store, mode, suffix_query));
    }
    Ok(predictions)
}

/// Mean candidate-list size per anaphor, as raw markables and with
/// same-entity candidates collapsed.
pub fn candidate_statistics(docs: &[BridgingDocument]) -> Result<(f64, f64)> {
    let mut anaphors = 0usize;
    let mut markable_total = 0usize;
    let mut entity_total = 0usize;
    for doc in docs {
        for anaphor in doc.anaphors() {
            let cands = build_candidate_list(doc, &anaphor.markable.id)?;
            anaphors += 1;
            markable_total += cands.candidates.len();
            let mut entities = HashSet::new();
            for at in &cands.candidates {
                let key = match &at.markable.entity {
                    Some(e) => format!("e:{e}"),
                    None => format!("m:{}", at.markable.id),
                };
                entities.insert(key);
            }
            entity_total += entities.len();
        }
    }
    if anaphors == 0 {
        return Ok((0.0, 0.0));
    }
    Ok((
        markable_total as f64 / anaphors as f64,
        entity_total as f64 / anaphors as f64,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocAccuracy {
    pub doc_id: String,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub correct: usize,
    pub total: usize,
    pub per_document: Vec<DocAccuracy>,
    pub mean_candidates: f64,
    pub mean_entity_candidates: f64,
}

impl AccuracyReport {
    /// correct/total; 0 for an anaphor-free corpus.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    /// Aggregate line first, then candidate statistics, then one line per
    /// document.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "accuracy {:.4} ({:.2}%) correct {}/{}\n",
            self.accuracy(),
            self.accuracy() * 100.0,
            self.correct,
            self.total
        ));
        out.push_str(&format!(
            "candidates mean {:.2} entity-deduplicated {:.2}\n",
            self.mean_candidates, self.mean_entity_candidates
        ));
        for d in &self.per_document {
            let acc = if d.total == 0 {
                0.0
            } else {
                d.correct as f64 / d.total as f64
            };
            out.push_str(&format!(
                "doc {} accuracy {:.4} correct {}/{}\n",
                d.doc_id, acc, d.correct, d.total
            ));
        }
        out
    }
}

/// Scores predictions against gold annotation. A prediction is correct iff
/// its antecedent is a gold antecedent of the anaphor or shares an entity
/// cluster with one. The denominator is every anaphor in `docs`; anaphors
/// without a prediction (or unresolved) count as missed.
pub fn evaluate(predictions: &[Prediction], docs: &[BridgingDocument]) -> Result<AccuracyReport> {
    let by_id: HashMap<&str, &BridgingDocument> =
        docs.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let mut correct_for: HashMap<(String, String), bool> = HashMap::new();
    for p in predictions {
        let missing = || Error::UnknownAnaphor {
            doc_id: p.doc_id.clone(),
            anaphor: p.anaphor.clone(),
        };
        let doc = by_id.get(p.doc_id.as_str()).ok_or_else(missing)?;
        let anaphor = doc.find(&p.anaphor).ok_or_else(missing)?;
        if !anaphor.markable.is_anaphor {
            return Err(missing());
        }
        let key = (p.doc_id.clone(), p.anaphor.clone());
        if correct_for.contains_key(&key) {
            return Err(Error::InvalidDocument {
                doc_id: p.doc_id.clone(),
                message: format!("duplicate prediction for anaphor {:?}", p.anaphor),
            });
        }
        let is_correct = match &p.antecedent {
            None => false,
            Some(predicted_id) => {
                let predicted = doc.find(predicted_id).ok_or_else(|| Error::InvalidDocument {
                    doc_id: p.doc_id.clone(),
                    message: format!("prediction names unknown markable {predicted_id:?}"),
                })?;
                let gold = &anaphor.markable.gold_antecedents;
                gold.contains(predicted_id)
                    || gold.iter().any(|g| {
                        let g_at = doc.find(g).expect("document validated");
                        match (&predicted.markable.entity, &g_at.markable.entity) {
                            (Some(a), Some(b)) => a == b,
                            _ => false,
                        }
                    })
            }
        };
        correct_for.insert(key, is_correct);
    }
    let mut per_document = Vec::new();
    let mut correct = 0usize;
    let mut total = 0usize;
    for doc in docs {
        let doc_total = doc.anaphors().len();
        let doc_correct = doc
            .anaphors()
            .iter()
            .filter(|a| {
                correct_for
                    .get(&(doc.doc_id.clone(), a.markable.id.clone()))
                    .copied()
                    .unwrap_or(false)
            })
            .count();
        per_document.push(DocAccuracy {
            doc_id: doc.doc_id.clone(),
            correct: doc_correct,
            total: doc_total,
        });
        correct += doc_correct;
        total += doc_total;
    }
    let (mean_candidates, mean_entity_candidates) = candidate_statistics(docs)?;
    Ok(AccuracyReport {
        correct,
        total,
        per_document,
        mean_candidates,
        mean_entity_candidates,
    })
}

/// One line per prediction: doc id, anaphor id, antecedent id, score,
/// tab-separated. Unresolved predictions leave the last two fields empty.
pub fn export_links<W: Write>(predictions: &[Prediction], mut out: W) -> Result<()> {
    for p in predictions {
        match &p.antecedent {
            Some(a) => writeln!(out, "{}\t{}\t{}\t{:.6}", p.doc_id, p.anaphor, a, p.score)?,
            None => writeln!(out, "{}\t{}\t\t", p.doc_id, p.anaphor)?,
        }
    }
    Ok(())
}

/// Parses a links file. The format does not carry the scoring mode; parsed
/// predictions report `HeadOnly`.
pub fn read_links<R: BufRead>(reader: R) -> Result<Vec<Prediction>> {
    let mut predictions = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::ParseLine {
                line: line_no,
                message: format!("expected 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let antecedent = (!cols[2].is_empty()).then(|| cols[2].to_string());
        let score = if cols[3].is_empty() {
            if antecedent.is_some() {
                return Err(Error::ParseLine {
                    line: line_no,
                    message: "resolved prediction without a score".to_string(),
                });
            }
            0.0
        } else {
            cols[3].parse().map_err(|_| Error::ParseLine {
                line: line_no,
                message: format!("bad score {:?}", cols[3]),
            })?
        };
        predictions.push(Prediction {
            doc_id: cols[0].to_string(),
            anaphor: cols[1].to_string(),
            antecedent,
            score,
            mode: ResolveMode::HeadOnly,
        });
    }
    Ok(predictions)
}
