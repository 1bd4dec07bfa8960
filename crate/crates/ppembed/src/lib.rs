//! Relatedness-tuned word embeddings from prepositional and possessive
//! noun-pair contexts, plus a bridging-anaphora resolver that selects
//! antecedents by embedding relatedness.
//!
//! Pipeline: parsed sentences → `(head_PP, modifier)` pairs ([`extract`]) →
//! vocabulary and co-occurrence counts ([`vocab`], [`cooccur`]) → trained
//! vectors ([`glove`]) → similarity queries ([`store`]) → antecedent
//! selection and scoring ([`resolve`]).

pub mod cooccur;
pub mod corpus;
pub mod documents;
pub mod error;
pub mod extract;
pub mod glove;
pub mod resolve;
pub mod store;
pub mod vocab;

pub use cooccur::{count_cooccurrences, count_cooccurrences_parallel, CoocRecord, CooccurrenceTable};
pub use corpus::{normalize_token, read_parsed_corpus, token_lines, ConllReader, ParsedSentence, PosTag, Token};
pub use documents::{read_bridging_documents, read_bridging_documents_dir, BridgingDocument, DocSentence, DocToken, Markable, MarkableAt};
pub use error::{Error, Result};
pub use extract::{extract_noun_pairs, extract_noun_pairs_with, extract_possessive_pairs, extract_prepositional_pairs, NounPair, PairSource, PatternTable, PP_SUFFIX};
pub use glove::{export_vectors, glove_gradient, glove_loss, train, weighting, EmbeddingModel, GloveGradient, TrainConfig};
pub use resolve::{anaphor_query_token, build_candidate_list, candidate_statistics, evaluate, export_links, np_vector, read_links, resolve, resolve_document, resolve_with_options, AccuracyReport, CandidateList, DocAccuracy, Prediction, ResolveMode};
pub use store::{cosine, load_vectors, VectorStore};
pub use vocab::{build_vocabulary, Vocabulary};
