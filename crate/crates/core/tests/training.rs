mod common;

use subvec::corpus::TokenStream;
use subvec::embed::{self, EmbeddingModel, Embeddings, TrainConfig};
use subvec::subword::{extract_ngrams, SubwordConfig};
use subvec::vocab::Vocabulary;
use subvec::Error;

use common::Topics;

// Default hyperparameters with a bucket table small enough for tests.
fn small_config() -> TrainConfig {
    TrainConfig {
        subword: SubwordConfig {
            bucket_count: 20_000,
            ..SubwordConfig::default()
        },
        ..TrainConfig::default()
    }
}

fn trained(stream: &TokenStream, cfg: TrainConfig) -> (EmbeddingModel, embed::TrainStats) {
    let vocab = Vocabulary::build(stream, cfg.min_count).unwrap();
    let mut model = EmbeddingModel::init(vocab, cfg).unwrap();
    let stats = embed::train(&mut model, stream).unwrap();
    (model, stats)
}

#[test]
fn loss_descends_over_default_epochs() {
    let stream = Topics::new(1).corpus(40, 2);
    assert!((900..=1300).contains(&stream.n_tokens()));
    let (_, stats) = trained(&stream, small_config());
    assert_eq!(stats.epoch_loss.len(), 5);
    let inversions: Vec<f64> = stats
        .epoch_loss
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[1] - w[0]) / w[0])
        .collect();
    assert!(
        inversions.len() <= 1 && inversions.iter().all(|&r| r < 0.01),
        "epoch losses {:?}",
        stats.epoch_loss
    );
}

#[test]
fn entries_stay_bounded() {
    for seed in 0..3 {
        let stream = Topics::new(seed).corpus(2000, seed + 100);
        let (model, _) = trained(&stream, small_config());
        assert!(model.is_finite());
        let max = model.input_matrix().max_abs().max(model.output_matrix().max_abs());
        assert!(max < 100.0, "max |entry| {}", max);
    }
}

#[test]
fn deterministic_mode_is_bit_reproducible() {
    let stream = Topics::new(3).corpus(500, 4);
    let cfg = TrainConfig {
        seed: 9,
        threads: 1,
        ..small_config()
    };
    let (a, sa) = trained(&stream, cfg.clone());
    let (b, sb) = trained(&stream, cfg);
    assert_eq!(sa.epoch_loss, sb.epoch_loss);
    let bits = |m: &EmbeddingModel| m.input_matrix().as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn multithreaded_training_stays_finite() {
    let topics = Topics::new(5);
    let stream = topics.corpus(4000, 6);
    let cfg = TrainConfig {
        dim: 25,
        threads: 4,
        ..small_config()
    };
    let (model, stats) = trained(&stream, cfg);
    assert!(model.is_finite());
    assert!(stats.pairs > 0);
    let sim = |a: &str, b: &str| embed::cosine(&model.word_vector(a).unwrap(), &model.word_vector(b).unwrap()).unwrap();
    assert!(sim(&topics.a[0], &topics.a[1]) > sim(&topics.a[0], &topics.b[0]));
}

#[test]
fn oov_word_with_seen_ngrams_is_finite() {
    let topics = Topics::new(7);
    let stream = topics.corpus(1000, 8);
    let (model, _) = trained(&stream, small_config());
    // A prefix of a trained word: every n-gram except the closing ones
    // appears in the parent.
    let parent = &topics.a[0];
    let word: String = parent.chars().take(4).collect();
    assert!(model.token_id(&word).is_none());
    let cfg = *model.subword_config();
    let parent_grams = extract_ngrams(parent, &cfg);
    let seen = extract_ngrams(&word, &cfg).iter().filter(|g| parent_grams.contains(g)).count();
    assert!(seen > 0);
    let v = model.word_vector(&word).unwrap();
    assert!(v.is_finite() && v.norm() > 0.0);
}

#[test]
fn corpus_without_vocabulary_tokens_is_rejected() {
    let stream = Topics::new(1).corpus(50, 2);
    let vocab = Vocabulary::build(&stream, 1).unwrap();
    let mut model = EmbeddingModel::init(vocab, small_config()).unwrap();
    let other = TokenStream::from_sentences([["unrelated", "tokens"]]);
    assert!(matches!(embed::train(&mut model, &other), Err(Error::EmptyCorpus)));
}

#[test]
fn zero_epochs_are_rejected() {
    let cfg = TrainConfig {
        epochs: 0,
        ..small_config()
    };
    assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
}
