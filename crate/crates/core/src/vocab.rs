//! Vocabulary construction, frequent-word subsampling and the
//! negative-sampling distribution.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rand::Rng;

use crate::corpus::TokenStream;
use crate::{Error, Result};

pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_SUBSAMPLE_T: f64 = 1e-4;
pub const DEFAULT_NEGATIVE_ALPHA: f64 = 0.75;

/// Token to id mapping with corpus frequencies.
///
/// Ids are dense, 0-based and assigned by descending count with ties broken
/// lexicographically, so the same corpus always produces the same ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    total_tokens: u64,
    min_count: u64,
}

impl Vocabulary {
    /// Count every token of the stream and keep those seen at least
    /// `min_count` times.
    pub fn build(stream: &TokenStream, min_count: u64) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for token in stream.tokens() {
            *counts.entry(token).or_default() += 1;
        }
        let entries = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .map(|(t, c)| (t.to_owned(), c))
            .collect();
        Self::from_entries(entries, min_count)
    }

    /// Build from `(token, count)` entries in any order. Entries are
    /// sorted into canonical id order.
    pub fn from_entries(mut entries: Vec<(String, u64)>, min_count: u64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut tokens = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (token, count)) in entries.into_iter().enumerate() {
            if count < min_count {
                return Err(Error::InvalidConfig(format!(
                    "token `{}` has count {} below min_count {}",
                    token, count, min_count
                )));
            }
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(Error::InvalidConfig(format!("invalid token `{}`", token)));
            }
            if index.insert(token.clone(), id as u32).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate token `{}`", token)));
            }
            tokens.push(token);
            counts.push(count);
        }
        let total_tokens = counts.iter().sum();

        Ok(Vocabulary {
            tokens,
            counts,
            index,
            total_tokens,
            min_count,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn count(&self, id: u32) -> Option<u64> {
        self.counts.get(id as usize).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Occurrences of retained tokens.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Probability of skipping an occurrence of `id` during training:
    /// `1 - sqrt(t/f) - t/f` clipped to `[0, 1]`, with `f` the relative
    /// frequency of the token.
    pub fn discard_probability(&self, id: u32, t: f64) -> Result<f64> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "subsampling threshold must be positive, got {}",
                t
            )));
        }
        let count = self.count(id).ok_or(Error::UnknownId(id as usize))?;
        let f = count as f64 / self.total_tokens as f64;
        let ratio = t / f;
        Ok((1.0 - ratio.sqrt() - ratio).clamp(0.0, 1.0))
    }

    /// Discard probabilities for every id.
    pub fn discard_table(&self, t: f64) -> Result<Vec<f64>> {
        (0..self.len() as u32)
            .map(|id| self.discard_probability(id, t))
            .collect()
    }

    /// Write `token<TAB>count` lines in id order.
    pub fn write_dump<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for (token, count) in self.tokens.iter().zip(&self.counts) {
            writeln!(writer, "{}\t{}", token, count)?;
        }
        Ok(())
    }

    /// Read a dump written by [`Vocabulary::write_dump`].
    pub fn read_dump<R: BufRead>(reader: R, min_count: u64) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (token, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(i + 1, "expected token<TAB>count"))?;
            let count = count
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("invalid count `{}`", count)))?;
            entries.push((token.to_owned(), count));
        }
        Self::from_entries(entries, min_count)
    }
}

/// Sampler over vocabulary ids with `P(id) ∝ count(id)^alpha`.
#[derive(Clone, Debug)]
pub struct NegativeTable {
    // cumulative[i] = sum of weights of ids 0..=i
    cumulative: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl NegativeTable {
    pub fn new(vocab: &Vocabulary, alpha: f64) -> Self {
        let weights: Vec<f64> = vocab.counts().iter().map(|&c| (c as f64).powf(alpha)).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        NegativeTable {
            cumulative,
            weights,
            alpha,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Normalized sampling probabilities in id order.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total();
        self.weights.iter().map(|w| w / total).collect()
    }

    fn locate(&self, u: f64) -> u32 {
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.weights.len() - 1) as u32
    }

    /// Draw an id from the full distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.locate(rng.random::<f64>() * self.total())
    }

    /// Draw an id different from `exclude`, distributed proportionally to
    /// the weights of the remaining ids.
    ///
    /// Rejection sampling is tried ten times; after that the draw comes
    /// directly from the conditional distribution. Returns `None` when no
    /// other id exists.
    pub fn sample_negative<R: Rng + ?Sized>(&self, rng: &mut R, exclude: u32) -> Option<u32> {
        if self.weights.len() < 2 {
            return None;
        }
        for _ in 0..10 {
            let id = self.sample(rng);
            if id != exclude {
                return Some(id);
            }
        }

        let excluded = exclude as usize;
        let (start, weight) = match self.weights.get(excluded) {
            Some(&w) => (self.cumulative[excluded] - w, w),
            None => return Some(self.sample(rng)),
        };
        let mut u = rng.random::<f64>() * (self.total() - weight);
        if u >= start {
            u += weight;
        }
        let mut id = self.locate(u);
        // Rounding at the interval edge can land on the excluded id.
        if id == exclude {
            id = if excluded + 1 < self.weights.len() {
                id + 1
            } else {
                id - 1
            };
        }
        Some(id)
    }
}
