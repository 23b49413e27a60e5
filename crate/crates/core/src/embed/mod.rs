//! Subword skip-gram embeddings trained with negative sampling.
//!
//! A word is represented by its vocabulary row (when it has one) plus one
//! bucket row per character n-gram. The hidden vector used in training and
//! the exported word vector are both compositions of those rows, so words
//! never seen in training still receive a vector from their n-grams.

mod io;
mod matrix;
mod model;
mod query;
pub mod sgd;
mod train;

use serde::{Deserialize, Serialize};

pub use self::io::{read_vec, write_vec, VecEmbeddings, MODEL_MAGIC};
pub use self::matrix::Matrix;
pub use self::model::EmbeddingModel;
pub use self::query::{analogy, cosine, nearest_neighbors, Embeddings, NeighborIndex};
pub use self::train::{train, TrainStats};

use crate::subword::SubwordConfig;
use crate::vocab::{DEFAULT_MIN_COUNT, DEFAULT_NEGATIVE_ALPHA, DEFAULT_SUBSAMPLE_T};
use crate::{Error, Result};

/// How a word's rows are combined into one vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compose {
    #[default]
    Mean,
    Sum,
}

impl Compose {
    pub(crate) fn code(self) -> u8 {
        match self {
            Compose::Mean => 0,
            Compose::Sum => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Compose::Mean),
            1 => Some(Compose::Sum),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub lr0: f64,
    pub window: usize,
    pub negatives: usize,
    pub min_count: u64,
    pub subsample_t: f64,
    pub neg_alpha: f64,
    pub subword: SubwordConfig,
    pub compose: Compose,
    pub threads: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            epochs: 5,
            lr0: 0.05,
            window: 5,
            negatives: 5,
            min_count: DEFAULT_MIN_COUNT,
            subsample_t: DEFAULT_SUBSAMPLE_T,
            neg_alpha: DEFAULT_NEGATIVE_ALPHA,
            subword: SubwordConfig::default(),
            compose: Compose::Mean,
            threads: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.dim < 1 {
            return fail("dim must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return fail("learning rate must be positive");
        }
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.negatives < 1 {
            return fail("negatives must be at least 1");
        }
        if self.min_count < 1 {
            return fail("min_count must be at least 1");
        }
        if self.subsample_t.is_nan() || self.subsample_t <= 0.0 {
            return fail("subsampling threshold must be positive");
        }
        if !(self.neg_alpha >= 0.0 && self.neg_alpha.is_finite()) {
            return fail("negative-sampling exponent must be non-negative");
        }
        if self.threads < 1 {
            return fail("threads must be at least 1");
        }
        self.subword.validate()
    }
}

/// A composed word vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVector(pub Vec<f32>);

impl WordVector {
    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_hyperparameters() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.dim, 100);
        assert_eq!(cfg.epochs, 5);
        assert_eq!(cfg.lr0, 0.05);
        assert_eq!((cfg.subword.min_n, cfg.subword.max_n), (3, 6));
        assert_eq!((cfg.window, cfg.negatives, cfg.min_count), (5, 5, 5));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { dim: 0, ..Default::default() },
            TrainConfig { lr0: 0.0, ..Default::default() },
            TrainConfig { window: 0, ..Default::default() },
            TrainConfig { negatives: 0, ..Default::default() },
            TrainConfig { threads: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
