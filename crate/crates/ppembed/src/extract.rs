//! Noun-pair extraction from prepositional and possessive NP structures.
//!
//! A pair couples the syntactic head of the construction with its nominal
//! modifier: "door of the car" yields (door_PP, car), "the company's
//! chairman" yields (chairman_PP, company). The suffix marks head position,
//! so a noun can occur suffixed in one pair and unsuffixed in another.

use crate::corpus::{normalize_token, ParsedSentence, PosTag, Token};

/// Suffix appended to construction heads.
pub const PP_SUFFIX: &str = "_PP";

/// Dependency-relation templates the extractor matches against. Kept as
/// data so a different annotation scheme is a table change, not a code
/// change. `nominal_modifier` and `case_relation` match on the base
/// relation (subtypes after `:` ignored); `possessive_relation` matches
/// the full label.
#[derive(Debug, Clone)]
pub struct PatternTable {
    pub nominal_modifier: Vec<String>,
    pub possessive_relation: Vec<String>,
    pub case_relation: Vec<String>,
}

impl Default for PatternTable {
    fn default() -> Self {
        PatternTable {
            nominal_modifier: vec!["nmod".to_string()],
            possessive_relation: vec!["nmod:poss".to_string()],
            case_relation: vec!["case".to_string()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    Prepositional,
    Possessive,
}

/// An extracted (head, modifier) pair. In suffix mode `head` carries
/// [`PP_SUFFIX`]; the modifier never does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounPair {
    pub head: String,
    pub modifier: String,
    pub source: PairSource,
}

impl NounPair {
    /// Pairs-file line: head first, space separated.
    pub fn to_line(&self) -> String {
        format!("{} {}", self.head, self.modifier)
    }
}

fn base_deprel(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

fn matches_base(relations: &[String], deprel: &str) -> bool {
    let base = base_deprel(deprel);
    relations.iter().any(|r| r == base)
}

fn has_case_child(sentence: &ParsedSentence, modifier: &Token, table: &PatternTable, upos: PosTag) -> bool {
    sentence
        .children(modifier.index)
        .any(|c| c.upos == upos && matches_base(&table.case_relation, &c.deprel))
}

/// Surfaces containing whitespace or the literal suffix would make the
/// output ambiguous; such tokens never produce a pair.
fn usable_surface(raw: &str) -> bool {
    !raw.is_empty() && !raw.chars().any(char::is_whitespace) && !raw.contains(PP_SUFFIX)
}

fn classify(sentence: &ParsedSentence, modifier: &Token, table: &PatternTable) -> Option<PairSource> {
    if !modifier.upos.is_nominal() {
        return None;
    }
    let head = sentence.head_of(modifier)?;
    if !head.upos.is_nominal() {
        return None;
    }
    let nominal_mod = matches_base(&table.nominal_modifier, &modifier.deprel);
    if nominal_mod && has_case_child(sentence, modifier, table, PosTag::Adp) {
        return Some(PairSource::Prepositional);
    }
    if table.possessive_relation.iter().any(|r| r == &modifier.deprel)
        || (nominal_mod && has_case_child(sentence, modifier, table, PosTag::Part))
    {
        return Some(PairSource::Possessive);
    }
    None
}

/// Prepositional and possessive pairs of one sentence, in sentence order
/// (by modifier position). Nothing matching yields an empty list.
pub fn extract_noun_pairs_with(
    sentence: &ParsedSentence,
    table: &PatternTable,
    suffix_mode: bool,
) -> Vec<NounPair> {
    let mut pairs = Vec::new();
    for modifier in sentence.tokens() {
        let Some(source) = classify(sentence, modifier, table) else {
            continue;
        };
        let head = sentence.head_of(modifier).expect("classified pair has a head");
        if !usable_surface(&head.surface) || !usable_surface(&modifier.surface) {
            continue;
        }
        let mut head_word = normalize_token(&head.surface);
        if suffix_mode {
            head_word.push_str(PP_SUFFIX);
        }
        pairs.push(NounPair {
            head: head_word,
            modifier: normalize_token(&modifier.surface),
            source,
        });
    }
    pairs
}

/// Pairs of both kinds with the default pattern table.
pub fn extract_noun_pairs(sentence: &ParsedSentence, suffix_mode: bool) -> Vec<NounPair> {
    extract_noun_pairs_with(sentence, &PatternTable::default(), suffix_mode)
}

/// Adposition-mediated pairs only, suffixed heads.
pub fn extract_prepositional_pairs(sentence: &ParsedSentence) -> Vec<NounPair> {
    let mut pairs = extract_noun_pairs(sentence, true);
    pairs.retain(|p| p.source == PairSource::Prepositional);
    pairs
}

/// Possessive pairs only, suffixed heads.
pub fn extract_possessive_pairs(sentence: &ParsedSentence) -> Vec<NounPair> {
    let mut pairs = extract_noun_pairs(sentence, true);
    pairs.retain(|p| p.source == PairSource::Possessive);
    pairs
}
