#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subvec::corpus::TokenStream;

pub const TOPIC_SIZE: usize = 20;

/// Two disjoint topics of random lowercase words.
pub struct Topics {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl Topics {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut words: Vec<String> = Vec::new();
        while words.len() < 2 * TOPIC_SIZE {
            let len = rng.random_range(5..=8);
            let w: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
            if !words.contains(&w) {
                words.push(w);
            }
        }
        let b = words.split_off(TOPIC_SIZE);
        Topics { a: words, b }
    }

    /// Sentences of 20-30 words, each drawn from a single topic.
    pub fn corpus(&self, sentences: usize, seed: u64) -> TokenStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sents: Vec<Vec<String>> = (0..sentences)
            .map(|_| {
                let topic = if rng.random_bool(0.5) { &self.a } else { &self.b };
                let len = rng.random_range(20..=30);
                (0..len).map(|_| topic.choose(&mut rng).unwrap().clone()).collect()
            })
            .collect();
        TokenStream::from_sentences(sents)
    }

    pub fn corpus_text(&self, sentences: usize, seed: u64) -> String {
        let stream = self.corpus(sentences, seed);
        let mut out = Vec::new();
        stream.write_to(&mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    /// 25 within-topic pairs scored 10 and 25 cross-topic pairs scored 0.
    pub fn dataset_pairs(&self) -> Vec<(String, String, f64)> {
        let mut pairs = Vec::new();
        for i in 0..25 {
            let topic = if i % 2 == 0 { &self.a } else { &self.b };
            let j = i / 2;
            pairs.push((topic[j].clone(), topic[(j + 1 + i % 7) % TOPIC_SIZE].clone(), 10.0));
        }
        for i in 0..25 {
            pairs.push((self.a[i % TOPIC_SIZE].clone(), self.b[(i * 7 + 3 + i / TOPIC_SIZE) % TOPIC_SIZE].clone(), 0.0));
        }
        pairs
    }
}
