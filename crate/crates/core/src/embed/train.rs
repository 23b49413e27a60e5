use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgd;
use super::{EmbeddingModel, TrainConfig};
use crate::corpus::TokenStream;
use crate::subword::subword_ids;
use crate::vocab::NegativeTable;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainStats {
    /// Mean logistic loss per (positive or negative) pair, one per epoch.
    pub epoch_loss: Vec<f64>,
    pub pairs: u64,
    pub retained_tokens: u64,
}

#[derive(Clone, Copy, Default)]
struct EpochAcc {
    loss: f64,
    pairs: u64,
    retained: u64,
}

/// Raw view of the model matrices shared by the training workers.
///
/// Workers read and write rows without synchronization (asynchronous SGD).
/// Torn or lost updates are tolerated by the algorithm; with one worker the
/// access pattern is sequential and the run is deterministic.
#[derive(Clone, Copy)]
struct SharedParams {
    input: *mut f32,
    input_len: usize,
    output: *mut f32,
    output_len: usize,
}

unsafe impl Send for SharedParams {}
unsafe impl Sync for SharedParams {}

struct Job<'a> {
    params: SharedParams,
    dim: usize,
    config: &'a TrainConfig,
    sentences: &'a [Vec<u32>],
    center_rows: &'a [Vec<usize>],
    discard: &'a [f64],
    negatives: &'a NegativeTable,
    progress: &'a AtomicU64,
    total_updates: f64,
}

impl Job<'_> {
    fn run(&self, worker: usize) -> Vec<EpochAcc> {
        // SAFETY: the pointers come from matrices that outlive the scoped
        // worker threads, and every index is bounded by the matrix shapes.
        let input = unsafe { std::slice::from_raw_parts_mut(self.params.input, self.params.input_len) };
        let output = unsafe { std::slice::from_raw_parts_mut(self.params.output, self.params.output_len) };

        let cfg = self.config;
        let dim = self.dim;
        let lr0 = cfg.lr0 as f32;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(worker as u64));
        let mut hidden = vec![0f32; dim];
        let mut grad = vec![0f32; dim];
        let mut kept: Vec<u32> = Vec::new();
        let mut stats = vec![EpochAcc::default(); cfg.epochs];

        for (epoch, acc) in stats.iter_mut().enumerate() {
            for sentence in self.sentences {
                kept.clear();
                kept.extend(
                    sentence
                        .iter()
                        .copied()
                        .filter(|&id| rng.random::<f64>() >= self.discard[id as usize]),
                );
                let done = self.progress.fetch_add(kept.len() as u64, Ordering::Relaxed);

                for (pos, &center) in kept.iter().enumerate() {
                    let progress = (done + pos as u64) as f64 / self.total_updates;
                    let lr = lr0 * (1.0 - progress as f32).max(0.0);
                    let rows = &self.center_rows[center as usize];
                    let span = rng.random_range(1..=cfg.window);
                    let lo = pos.saturating_sub(span);
                    let hi = (pos + span).min(kept.len() - 1);

                    for (ctx_pos, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                        if ctx_pos == pos {
                            continue;
                        }
                        sgd::compose_rows(input, dim, rows, cfg.compose, &mut hidden);
                        grad.iter_mut().for_each(|g| *g = 0.0);

                        let out = &mut output[context as usize * dim..(context as usize + 1) * dim];
                        acc.loss += sgd::pair_step(&hidden, out, &mut grad, true, lr) as f64;
                        acc.pairs += 1;
                        for _ in 0..cfg.negatives {
                            let Some(neg) = self.negatives.sample_negative(&mut rng, context) else {
                                break;
                            };
                            let out = &mut output[neg as usize * dim..(neg as usize + 1) * dim];
                            acc.loss += sgd::pair_step(&hidden, out, &mut grad, false, lr) as f64;
                            acc.pairs += 1;
                        }
                        sgd::apply_to_rows(input, dim, rows, &grad, cfg.compose);
                    }
                }
                acc.retained += kept.len() as u64;
            }
            if worker == 0 {
                let lr = lr0 as f64 * (1.0 - self.progress.load(Ordering::Relaxed) as f64 / self.total_updates).max(0.0);
                log::info!(
                    "epoch {}/{}  lr {:.6}  loss {:.6}",
                    epoch + 1,
                    cfg.epochs,
                    lr,
                    acc.loss / acc.pairs.max(1) as f64
                );
            }
        }
        stats
    }
}

/// Train the model on a token stream with the model's configuration.
///
/// Each epoch subsamples frequent tokens, then for every retained position
/// draws a window `b ~ U[1, window]` and performs one positive and
/// `negatives` negative logistic steps per context word. The learning rate
/// decays linearly to zero over the expected number of retained tokens of
/// all epochs. With `threads > 1` workers share the matrices without locks.
pub fn train(model: &mut EmbeddingModel, stream: &TokenStream) -> Result<TrainStats> {
    let cfg = model.config.clone();
    cfg.validate()?;
    let vocab = &model.vocab;

    let sentences: Vec<Vec<u32>> = stream
        .sentences()
        .iter()
        .map(|s| s.iter().filter_map(|t| vocab.id(t)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let discard = vocab.discard_table(cfg.subsample_t)?;
    let negatives = NegativeTable::new(vocab, cfg.neg_alpha);
    let center_rows: Vec<Vec<usize>> = vocab
        .tokens()
        .iter()
        .enumerate()
        .map(|(id, token)| {
            let mut rows = vec![id];
            rows.extend(subword_ids(token, vocab.len(), &cfg.subword).row_ids);
            rows
        })
        .collect();

    let expected_retained: f64 = sentences
        .iter()
        .flatten()
        .map(|&id| 1.0 - discard[id as usize])
        .sum();
    let total_updates = (expected_retained * cfg.epochs as f64).max(1.0);

    let dim = cfg.dim;
    let params = SharedParams {
        input: model.input.as_mut_slice().as_mut_ptr(),
        input_len: model.input.as_slice().len(),
        output: model.output.as_mut_slice().as_mut_ptr(),
        output_len: model.output.as_slice().len(),
    };
    let progress = AtomicU64::new(0);
    let job = Job {
        params,
        dim,
        config: &cfg,
        sentences: &sentences,
        center_rows: &center_rows,
        discard: &discard,
        negatives: &negatives,
        progress: &progress,
        total_updates,
    };

    let workers = cfg.threads.min(sentences.len());
    let per_worker = if workers == 1 {
        vec![job.run(0)]
    } else {
        let chunk = sentences.len().div_ceil(workers);
        thread::scope(|scope| {
            let handles: Vec<_> = sentences
                .chunks(chunk)
                .enumerate()
                .map(|(worker, part)| {
                    let job = Job {
                        sentences: part,
                        ..job
                    };
                    scope.spawn(move || job.run(worker))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training worker panicked"))
                .collect::<Vec<_>>()
        })
    };

    let mut stats = TrainStats::default();
    for epoch in 0..cfg.epochs {
        let (loss, pairs, retained) = per_worker.iter().fold((0.0, 0, 0), |(l, p, r), w| {
            (l + w[epoch].loss, p + w[epoch].pairs, r + w[epoch].retained)
        });
        stats.epoch_loss.push(if pairs > 0 { loss / pairs as f64 } else { 0.0 });
        stats.pairs += pairs;
        stats.retained_tokens += retained;
    }

    if !model.is_finite() {
        return Err(Error::Invariant("non-finite parameter after training".into()));
    }
    Ok(stats)
}
