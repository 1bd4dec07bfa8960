use std::io;

use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// A malformed line in a columnar or record file (CoNLL corpus, vector
    /// file, vocabulary file, co-occurrence triples, links file).
    #[error("line {line}: {message}")]
    ParseLine { line: usize, message: String },

    /// A sentence block that parsed line-by-line but violates a structural
    /// invariant (root count, index contiguity, head range).
    #[error("sentence {sentence_id}: {message}")]
    SentenceInvariant { sentence_id: String, message: String },

    /// A bridging document that fails cross-reference validation.
    #[error("document {doc_id}: {message}")]
    InvalidDocument { doc_id: String, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty co-occurrence table")]
    EmptyTable,

    #[error("vector file has no entries")]
    EmptyVectorFile,

    #[error("co-occurrence weight must be positive, got {0}")]
    NonPositiveCount(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Training hit a non-finite residual; the model state is unusable.
    #[error("non-finite loss at iteration {iteration} on record ({i}, {j})")]
    NonFiniteLoss { iteration: usize, i: u32, j: u32 },

    #[error("word not found in vector store: {0:?}")]
    WordNotFound(String),

    #[error("cosine of a zero vector is undefined")]
    ZeroVector,

    #[error("prediction references unknown anaphor {anaphor:?} in document {doc_id:?}")]
    UnknownAnaphor { doc_id: String, anaphor: String },

    #[error("invalid document file {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
