//! Readers for dependency-parsed corpora and raw token-line corpora.
//!
//! The parsed-corpus format is columnar, CoNLL style: one token per line,
//! six tab-separated columns (index, surface, lemma, upos, head, deprel),
//! a blank line between sentences, `#` comment lines ignored. Token-line
//! corpora are plain text, one whitespace-separated sentence per line;
//! the pair corpus produced by extraction is a token-line corpus whose
//! sentences all have exactly two tokens.

use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Lowercases a surface form. Applied before any suffixing or vocabulary
/// counting; idempotent.
pub fn normalize_token(surface: &str) -> String {
    surface.to_lowercase()
}

/// Universal POS tag. Tags outside the closed set are carried verbatim in
/// `Other` so serialization is loss-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Propn,
    Adp,
    Pron,
    Verb,
    Adj,
    Det,
    Part,
    Other(String),
}

impl PosTag {
    pub fn parse(s: &str) -> PosTag {
        match s {
            "NOUN" => PosTag::Noun,
            "PROPN" => PosTag::Propn,
            "ADP" => PosTag::Adp,
            "PRON" => PosTag::Pron,
            "VERB" => PosTag::Verb,
            "ADJ" => PosTag::Adj,
            "DET" => PosTag::Det,
            "PART" => PosTag::Part,
            other => PosTag::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Propn => "PROPN",
            PosTag::Adp => "ADP",
            PosTag::Pron => "PRON",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Det => "DET",
            PosTag::Part => "PART",
            PosTag::Other(s) => s,
        }
    }

    /// True for the tags that may participate in noun pairs.
    pub fn is_nominal(&self) -> bool {
        matches!(self, PosTag::Noun | PosTag::Propn)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl serde::Serialize for PosTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for PosTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(PosTag::parse(&s))
    }
}

/// One token of a dependency-parsed sentence.
///
/// `index` is 1-based; `head` is 0 for the root token, otherwise the 1-based
/// index of the parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: PosTag,
    pub head: usize,
    pub deprel: String,
}

/// A validated dependency-parsed sentence.
///
/// Construction enforces the structural invariants: contiguous 1..n token
/// indices, exactly one root (head = 0), heads in range and never
/// self-referential.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    sentence_id: String,
    tokens: Vec<Token>,
}

impl ParsedSentence {
    pub fn new(sentence_id: impl Into<String>, tokens: Vec<Token>) -> Result<Self> {
        let sentence_id = sentence_id.into();
        let n = tokens.len();
        let invariant = |message: String| Error::SentenceInvariant {
            sentence_id: sentence_id.clone(),
            message,
        };
        for (pos, tok) in tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(invariant(format!(
                    "non-contiguous token indices: expected {}, found {}",
                    pos + 1,
                    tok.index
                )));
            }
            if tok.head > n {
                return Err(invariant(format!(
                    "token {} has head {} outside sentence of length {}",
                    tok.index, tok.head, n
                )));
            }
            if tok.head == tok.index {
                return Err(invariant(format!("token {} is its own head", tok.index)));
            }
        }
        let roots = tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(invariant(format!("expected exactly 1 root, found {roots}")));
        }
        Ok(ParsedSentence { sentence_id, tokens })
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    /// Parent of `token`, or `None` for the root.
    pub fn head_of(&self, token: &Token) -> Option<&Token> {
        if token.head == 0 {
            None
        } else {
            Some(self.token(token.head))
        }
    }

    /// Tokens whose head is the token at `index` (1-based), in sentence order.
    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Canonical columnar serialization: one token per line, trailing blank
    /// line. Concatenating serializations of a whole corpus round-trips the
    /// canonical input (comments excluded).
    pub fn to_conll(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                t.index, t.surface, t.lemma, t.upos, t.head, t.deprel
            ));
        }
        out.push('\n');
        out
    }
}

/// Streaming reader over a parsed corpus.
///
/// Yields one `Result` per sentence block, so callers choose the failure
/// policy: skip bad blocks (counting them) or abort on the first error.
/// After a malformed block the reader resumes at the next blank line.
pub struct ConllReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    ordinal: usize,
}

impl<R: BufRead> ConllReader<R> {
    pub fn new(reader: R) -> Self {
        ConllReader {
            lines: reader.lines(),
            line_no: 0,
            ordinal: 0,
        }
    }

    fn parse_block(&self, block: &[(usize, String)]) -> Result<ParsedSentence> {
        let mut tokens = Vec::with_capacity(block.len());
        for (line_no, line) in block {
            tokens.push(parse_token_line(*line_no, line)?);
        }
        ParsedSentence::new(format!("s{}", self.ordinal), tokens)
    }
}

fn parse_token_line(line_no: usize, line: &str) -> Result<Token> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 6 {
        return Err(Error::ParseLine {
            line: line_no,
            message: format!("expected 6 tab-separated columns, found {}", cols.len()),
        });
    }
    let index: usize = cols[0].parse().map_err(|_| Error::ParseLine {
        line: line_no,
        message: format!("non-numeric token index {:?}", cols[0]),
    })?;
    if index == 0 {
        return Err(Error::ParseLine {
            line: line_no,
            message: "token index must be >= 1".to_string(),
        });
    }
    let head: usize = cols[4].parse().map_err(|_| Error::ParseLine {
        line: line_no,
        message: format!("non-numeric head index {:?}", cols[4]),
    })?;
    Ok(Token {
        index,
        surface: cols[1].to_string(),
        lemma: cols[2].to_string(),
        upos: PosTag::parse(cols[3]),
        head,
        deprel: cols[5].to_string(),
    })
}

impl<R: BufRead> Iterator for ConllReader<R> {
    type Item = Result<ParsedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut block: Vec<(usize, String)> = Vec::new();
        loop {
            match self.lines.next() {
                Some(Err(e)) => return Some(Err(e.into())),
                Some(Ok(line)) => {
                    self.line_no += 1;
                    if line.trim().is_empty() {
                        if block.is_empty() {
                            continue;
                        }
                        break;
                    }
                    if line.starts_with('#') {
                        continue;
                    }
                    block.push((self.line_no, line));
                }
                None => {
                    if block.is_empty() {
                        return None;
                    }
                    break;
                }
            }
        }
        self.ordinal += 1;
        Some(self.parse_block(&block))
    }
}

/// Opens a streaming reader over a parsed corpus.
pub fn read_parsed_corpus<R: BufRead>(reader: R) -> ConllReader<R> {
    ConllReader::new(reader)
}

/// Streaming reader over a token-line corpus: one sentence per line, tokens
/// separated by whitespace. Blank lines are skipped.
pub fn token_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Vec<String>>> {
    reader.lines().filter_map(|line| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let toks: Vec<String> = l.split_whitespace().map(str::to_string).collect();
            if toks.is_empty() {
                None
            } else {
                Some(Ok(toks))
            }
        }
    })
}
