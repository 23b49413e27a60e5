//! Character n-gram extraction and bucket hashing.

use serde::{Deserialize, Serialize};

use crate::vocab::Vocabulary;
use crate::{Error, Result};

pub const BOW: char = '<';
pub const EOW: char = '>';

const FNV_OFFSET_BASIS: u32 = 2_166_136_261;
const FNV_PRIME: u32 = 16_777_619;

/// Identifier of the n-gram hash function stored in model headers.
pub const HASH_FNV1A_32: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordConfig {
    pub min_n: usize,
    pub max_n: usize,
    pub bucket_count: usize,
    pub use_boundary_markers: bool,
}

impl Default for SubwordConfig {
    fn default() -> Self {
        SubwordConfig {
            min_n: 3,
            max_n: 6,
            bucket_count: 2_000_000,
            use_boundary_markers: true,
        }
    }
}

impl SubwordConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_n < 1 || self.min_n > self.max_n {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= minn <= maxn, got minn={} maxn={}",
                self.min_n, self.max_n
            )));
        }
        if self.bucket_count < 1 {
            return Err(Error::InvalidConfig("bucket count must be at least 1".into()));
        }
        if self.bucket_count > u32::MAX as usize {
            return Err(Error::InvalidConfig("bucket count exceeds u32 range".into()));
        }
        Ok(())
    }
}

/// All contiguous substrings of the word (wrapped in `<`/`>` when markers
/// are on) with a length in `[min_n, max_n]` characters, ordered by length
/// and then by position.
pub fn extract_ngrams(word: &str, cfg: &SubwordConfig) -> Vec<String> {
    let mut chars: Vec<char> = Vec::with_capacity(word.len() + 2);
    if cfg.use_boundary_markers {
        chars.push(BOW);
    }
    chars.extend(word.chars());
    if cfg.use_boundary_markers {
        chars.push(EOW);
    }

    let mut ngrams = Vec::new();
    for n in cfg.min_n..=cfg.max_n.min(chars.len()) {
        for window in chars.windows(n) {
            ngrams.push(window.iter().collect());
        }
    }
    ngrams
}

/// 32-bit FNV-1a over the UTF-8 bytes of the n-gram.
pub fn fnv1a_32(ngram: &str) -> u32 {
    ngram.bytes().fold(FNV_OFFSET_BASIS, |h, b| {
        (h ^ u32::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// Bucket of an n-gram in `[0, bucket_count)`.
pub fn hash_ngram(ngram: &str, bucket_count: usize) -> usize {
    assert!(bucket_count >= 1, "bucket_count must be at least 1");
    (fnv1a_32(ngram) as u64 % bucket_count as u64) as usize
}

/// The n-grams of a word and the embedding rows they map to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubwordIds {
    pub ngrams: Vec<String>,
    /// `vocab_len + bucket` for every n-gram.
    pub row_ids: Vec<usize>,
}

/// Rows making up a word: its vocabulary row, when it has one, and its
/// n-gram bucket rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordRows {
    pub vocab_id: Option<u32>,
    pub subwords: SubwordIds,
}

impl WordRows {
    /// Every input-matrix row, vocabulary row first.
    pub fn all_rows(&self) -> Vec<usize> {
        let mut rows = Vec::with_capacity(self.subwords.row_ids.len() + 1);
        rows.extend(self.vocab_id.map(|id| id as usize));
        rows.extend_from_slice(&self.subwords.row_ids);
        rows
    }
}

pub fn subword_ids(word: &str, vocab_len: usize, cfg: &SubwordConfig) -> SubwordIds {
    let ngrams = extract_ngrams(word, cfg);
    let row_ids = ngrams
        .iter()
        .map(|g| vocab_len + hash_ngram(g, cfg.bucket_count))
        .collect();
    SubwordIds { ngrams, row_ids }
}

pub fn word_row_ids(word: &str, vocab: &Vocabulary, cfg: &SubwordConfig) -> Result<WordRows> {
    let vocab_id = vocab.id(word);
    let subwords = subword_ids(word, vocab.len(), cfg);
    if vocab_id.is_none() && subwords.row_ids.is_empty() {
        return Err(Error::NoRepresentation(word.to_owned()));
    }
    Ok(WordRows { vocab_id, subwords })
}
