use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgd;
use super::{Compose, Matrix, TrainConfig, WordVector};
use crate::subword::{word_row_ids, SubwordConfig, WordRows};
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// Input matrix (vocabulary rows followed by bucket rows) and output matrix
/// (one row per vocabulary word) of a subword skip-gram model.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub(crate) vocab: Vocabulary,
    pub(crate) config: TrainConfig,
    pub(crate) input: Matrix,
    pub(crate) output: Matrix,
}

impl EmbeddingModel {
    /// Input entries uniform in `[-1/dim, 1/dim]` from a generator seeded
    /// with `config.seed`; output entries zero.
    pub fn init(vocab: Vocabulary, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let dim = config.dim;
        let rows = vocab.len() + config.subword.bucket_count;
        let bound = 1.0 / dim as f32;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let data = (0..rows * dim)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();

        Ok(EmbeddingModel {
            input: Matrix::from_vec(rows, dim, data),
            output: Matrix::zeros(vocab.len(), dim),
            vocab,
            config,
        })
    }

    pub(crate) fn from_parts(vocab: Vocabulary, config: TrainConfig, input: Matrix, output: Matrix) -> Result<Self> {
        config.subword.validate()?;
        let dim = config.dim;
        let rows = vocab.len() + config.subword.bucket_count;
        if input.rows() != rows || input.cols() != dim || output.rows() != vocab.len() || output.cols() != dim {
            return Err(Error::InvalidModel("matrix shapes do not match header".into()));
        }
        Ok(EmbeddingModel {
            vocab,
            config,
            input,
            output,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn subword_config(&self) -> &SubwordConfig {
        &self.config.subword
    }

    pub fn compose(&self) -> Compose {
        self.config.compose
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn input_matrix(&self) -> &Matrix {
        &self.input
    }

    pub fn input_matrix_mut(&mut self) -> &mut Matrix {
        &mut self.input
    }

    pub fn output_matrix(&self) -> &Matrix {
        &self.output
    }

    pub fn output_matrix_mut(&mut self) -> &mut Matrix {
        &mut self.output
    }

    /// Vocabulary row and n-gram rows of a word.
    pub fn word_rows(&self, word: &str) -> Result<WordRows> {
        word_row_ids(word, &self.vocab, &self.config.subword)
    }

    /// Composition of the word's vocabulary row (if any) and n-gram rows.
    pub fn word_vector(&self, word: &str) -> Result<WordVector> {
        let rows = self.word_rows(word)?.all_rows();
        Ok(self.compose_rows(&rows))
    }

    pub(crate) fn compose_rows(&self, rows: &[usize]) -> WordVector {
        let mut hidden = vec![0.0f32; self.dim()];
        sgd::compose_rows(self.input.as_slice(), self.dim(), rows, self.compose(), &mut hidden);
        WordVector(hidden)
    }

    /// One logistic step of the center rows against the output row of
    /// `context_id`. Returns the loss before the update.
    pub fn train_pair(&mut self, center_rows: &[usize], context_id: u32, label: bool, lr: f32) -> Result<f32> {
        if lr.is_nan() || lr <= 0.0 {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if context_id as usize >= self.output.rows() {
            return Err(Error::UnknownId(context_id as usize));
        }
        if let Some(&bad) = center_rows.iter().find(|&&r| r >= self.input.rows()) {
            return Err(Error::UnknownId(bad));
        }
        let dim = self.dim();
        let compose = self.compose();
        let out_row = self.output.row_mut(context_id as usize);
        Ok(sgd::train_pair_slices(
            self.input.as_mut_slice(),
            out_row,
            dim,
            center_rows,
            label,
            lr,
            compose,
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.input.is_finite() && self.output.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subword::SubwordConfig;

    fn toy_vocab() -> Vocabulary {
        Vocabulary::from_entries(vec![("alpha".into(), 4), ("beta".into(), 3), ("gamma".into(), 2)], 1).unwrap()
    }

    fn toy_config(dim: usize) -> TrainConfig {
        TrainConfig {
            dim,
            subword: SubwordConfig {
                bucket_count: 1000,
                ..SubwordConfig::default()
            },
            seed: 42,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn init_bounds_zero_output_and_determinism() {
        let a = EmbeddingModel::init(toy_vocab(), toy_config(100)).unwrap();
        assert_eq!(a.input_matrix().rows(), 3 + 1000);
        assert!(a.input_matrix().as_slice().iter().all(|x| x.abs() <= 0.01));
        assert!(a.output_matrix().as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(a.output_matrix().rows(), 3);

        let b = EmbeddingModel::init(toy_vocab(), toy_config(100)).unwrap();
        assert_eq!(a, b);

        let mut other = toy_config(100);
        other.seed = 43;
        let c = EmbeddingModel::init(toy_vocab(), other).unwrap();
        assert_ne!(a.input_matrix(), c.input_matrix());
    }

    #[test]
    fn word_vector_is_mean_of_rows() {
        let model = EmbeddingModel::init(toy_vocab(), toy_config(8)).unwrap();
        let rows = model.word_rows("beta").unwrap().all_rows();
        assert_eq!(rows[0], 1);
        let v = model.word_vector("beta").unwrap();
        for d in 0..8 {
            let mean = rows.iter().map(|&r| model.input_matrix().row(r)[d]).sum::<f32>() / rows.len() as f32;
            assert!((v.values()[d] - mean).abs() < 1e-7);
        }
    }

    #[test]
    fn oov_word_uses_ngram_rows_only() {
        let model = EmbeddingModel::init(toy_vocab(), toy_config(8)).unwrap();
        let rows = model.word_rows("alphabet").unwrap();
        assert_eq!(rows.vocab_id, None);
        let v = model.word_vector("alphabet").unwrap();
        let ids = &rows.subwords.row_ids;
        let mean0 = ids.iter().map(|&r| model.input_matrix().row(r)[0]).sum::<f32>() / ids.len() as f32;
        assert!((v.values()[0] - mean0).abs() < 1e-7);
    }

    #[test]
    fn word_without_ngrams_equals_its_vocab_row() {
        let vocab = Vocabulary::from_entries(vec![("ab".into(), 2), ("cd".into(), 1)], 1).unwrap();
        let mut cfg = toy_config(6);
        cfg.subword.use_boundary_markers = false;
        let model = EmbeddingModel::init(vocab, cfg).unwrap();
        assert_eq!(model.word_vector("ab").unwrap().values(), model.input_matrix().row(0));
        assert!(matches!(model.word_vector("xy"), Err(Error::NoRepresentation(_))));
    }

    #[test]
    fn sum_composition() {
        let mut cfg = toy_config(4);
        cfg.compose = Compose::Sum;
        let model = EmbeddingModel::init(toy_vocab(), cfg).unwrap();
        let rows = model.word_rows("gamma").unwrap().all_rows();
        let v = model.word_vector("gamma").unwrap();
        let sum0: f32 = rows.iter().map(|&r| model.input_matrix().row(r)[0]).sum();
        assert!((v.values()[0] - sum0).abs() < 1e-6);
    }

    #[test]
    fn train_pair_on_zero_output_row() {
        let mut model = EmbeddingModel::init(toy_vocab(), toy_config(5)).unwrap();
        let rows = model.word_rows("alpha").unwrap().all_rows();
        let h = model.word_vector("alpha").unwrap();
        let lr = 0.05;
        let loss = model.train_pair(&rows, 2, true, lr).unwrap();
        assert!((loss - std::f32::consts::LN_2).abs() < 1e-6);
        for (o, x) in model.output_matrix().row(2).iter().zip(h.values()) {
            assert!((o - lr * 0.5 * x).abs() < 1e-9);
        }
        assert!(model.train_pair(&rows, 3, true, lr).is_err());
        assert!(model.train_pair(&rows, 0, true, 0.0).is_err());
    }
}
