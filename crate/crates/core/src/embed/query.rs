use std::cmp::Ordering;

use super::{EmbeddingModel, WordVector};
use crate::{Error, Result};

/// Read access to word vectors, shared by trained models and vectors loaded
/// from `.vec` files.
pub trait Embeddings {
    fn dim(&self) -> usize;

    /// In-vocabulary tokens in id order.
    fn tokens(&self) -> &[String];

    fn token_id(&self, word: &str) -> Option<u32>;

    /// Vector of any representable word.
    fn word_vector(&self, word: &str) -> Result<WordVector>;

    /// Vector of an in-vocabulary token.
    fn vocab_vector(&self, id: u32) -> WordVector;
}

impl Embeddings for EmbeddingModel {
    fn dim(&self) -> usize {
        EmbeddingModel::dim(self)
    }

    fn tokens(&self) -> &[String] {
        self.vocab.tokens()
    }

    fn token_id(&self, word: &str) -> Option<u32> {
        self.vocab.id(word)
    }

    fn word_vector(&self, word: &str) -> Result<WordVector> {
        EmbeddingModel::word_vector(self, word)
    }

    fn vocab_vector(&self, id: u32) -> WordVector {
        let token = &self.vocab.tokens()[id as usize];
        EmbeddingModel::word_vector(self, token).expect("vocabulary words are representable")
    }
}

/// Cosine similarity of two non-zero vectors.
pub fn cosine(a: &WordVector, b: &WordVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::LengthMismatch(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(&x, &y)| x as f64 * y as f64).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Unit-normalized vectors of every vocabulary token, for repeated
/// neighbor queries.
pub struct NeighborIndex<'a> {
    tokens: &'a [String],
    dim: usize,
    // Zero vectors are stored as all zeros and never ranked.
    unit: Vec<f64>,
    nonzero: Vec<bool>,
}

impl<'a> NeighborIndex<'a> {
    pub fn new<E: Embeddings + ?Sized>(emb: &'a E) -> Self {
        let dim = emb.dim();
        let tokens = emb.tokens();
        let mut unit = Vec::with_capacity(tokens.len() * dim);
        let mut nonzero = Vec::with_capacity(tokens.len());
        for id in 0..tokens.len() as u32 {
            let v = emb.vocab_vector(id);
            let norm = v.norm();
            nonzero.push(norm > 0.0);
            let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
            unit.extend(v.0.iter().map(|&x| x as f64 * scale));
        }
        NeighborIndex {
            tokens,
            dim,
            unit,
            nonzero,
        }
    }

    /// Top-`k` tokens by cosine to `query`, skipping `exclude`. Ties are
    /// broken by ascending id.
    pub fn rank(&self, query: &WordVector, k: usize, exclude: &[u32]) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if query.dim() != self.dim {
            return Err(Error::LengthMismatch(query.dim(), self.dim));
        }
        let norm = query.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let q: Vec<f64> = query.0.iter().map(|&x| x as f64 / norm).collect();

        let mut scored: Vec<(u32, f64)> = (0..self.tokens.len())
            .filter(|&id| self.nonzero[id] && !exclude.contains(&(id as u32)))
            .map(|id| {
                let row = &self.unit[id * self.dim..(id + 1) * self.dim];
                let dot: f64 = row.iter().zip(&q).map(|(a, b)| a * b).sum();
                (id as u32, dot.clamp(-1.0, 1.0))
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(id, c)| (self.tokens[id as usize].clone(), c))
            .collect())
    }
}

/// The `k` in-vocabulary tokens closest to `word`, excluding the word
/// itself.
pub fn nearest_neighbors<E: Embeddings + ?Sized>(emb: &E, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let query = emb.word_vector(word)?;
    let exclude: Vec<u32> = emb.token_id(word).into_iter().collect();
    NeighborIndex::new(emb).rank(&query, k, &exclude)
}

/// The `k` tokens closest to `b - a + c`, excluding `a`, `b` and `c`
/// (`a` is to `b` as `c` is to the answer).
pub fn analogy<E: Embeddings + ?Sized>(emb: &E, a: &str, b: &str, c: &str, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let (va, vb, vc) = (emb.word_vector(a)?, emb.word_vector(b)?, emb.word_vector(c)?);
    let target = WordVector(
        va.0.iter()
            .zip(&vb.0)
            .zip(&vc.0)
            .map(|((&xa, &xb), &xc)| xb - xa + xc)
            .collect(),
    );
    let exclude: Vec<u32> = [a, b, c].iter().filter_map(|w| emb.token_id(w)).collect();
    NeighborIndex::new(emb).rank(&target, k, &exclude)
}
