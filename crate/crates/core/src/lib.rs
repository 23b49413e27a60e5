//! Subword-aware word embeddings and bigram co-occurrence similarity models
//! for low-resource corpora, with word-similarity evaluation.
//!
//! The pipeline is: [`corpus`] normalization and tokenization, [`vocab`]
//! construction, then either the subword skip-gram trainer in [`embed`] or
//! the co-occurrence table in [`cooc`]. Both model kinds are scored against
//! human similarity judgments in [`eval`].

pub mod cli;
pub mod cooc;
pub mod corpus;
pub mod embed;
mod error;
pub mod eval;
pub mod subword;
pub mod vocab;

pub use error::{Error, Result};
