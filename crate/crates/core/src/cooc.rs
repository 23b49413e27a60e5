//! Windowed co-occurrence counts and neighbor-distribution similarity.
//!
//! Each word's row of co-occurrence counts is normalized into a probability
//! distribution over its neighbors; two words are compared by the cosine of
//! their distributions. Words without a row have no similarity, which is
//! how unseen evaluation words get excluded.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::corpus::TokenStream;
use crate::vocab::Vocabulary;
use crate::{Error, Result};

/// Sparse symmetric co-occurrence counts.
///
/// Table ids follow the lexicographic order of the tokens that have at
/// least one co-occurrence, so a saved and reloaded table is identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoocTable {
    window: usize,
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    // Full symmetric rows sorted by neighbor id; (i, i) appears once.
    rows: Vec<Vec<(u32, u64)>>,
    row_totals: Vec<u64>,
}

/// A word's neighbors with `count / row_total` probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborDistribution {
    pub word: u32,
    pub neighbors: Vec<(u32, f64)>,
}

impl NeighborDistribution {
    pub fn get(&self, id: u32) -> f64 {
        self.neighbors
            .binary_search_by_key(&id, |e| e.0)
            .map_or(0.0, |i| self.neighbors[i].1)
    }
}

impl CoocTable {
    /// Count, for every sentence position `p` and every `q` with
    /// `0 < q - p <= window`, one co-occurrence of the two tokens. Tokens
    /// missing from the vocabulary keep their position but pair with
    /// nothing.
    pub fn build(stream: &TokenStream, vocab: &Vocabulary, window: usize) -> Result<Self> {
        if window < 1 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        let mut any_token = false;
        let mut ids: Vec<Option<u32>> = Vec::new();
        for sentence in stream.sentences() {
            ids.clear();
            ids.extend(sentence.iter().map(|t| vocab.id(t)));
            any_token |= ids.iter().any(Option::is_some);
            for (p, &a) in ids.iter().enumerate() {
                let Some(a) = a else { continue };
                for &b in ids.iter().skip(p + 1).take(window).flatten() {
                    *counts.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
        if !any_token {
            return Err(Error::EmptyCorpus);
        }

        let entries = counts.into_iter().map(|((a, b), c)| {
            let ta = vocab.token(a).expect("id from vocabulary");
            let tb = vocab.token(b).expect("id from vocabulary");
            (ta.to_owned(), tb.to_owned(), c)
        });
        Ok(Self::from_pairs(window, entries))
    }

    fn from_pairs(window: usize, pairs: impl IntoIterator<Item = (String, String, u64)>) -> Self {
        let pairs: Vec<(String, String, u64)> = pairs.into_iter().filter(|p| p.2 > 0).collect();
        let mut tokens: Vec<String> = pairs.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
        tokens.sort_unstable();
        tokens.dedup();
        let index: HashMap<String, u32> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();

        let mut rows = vec![Vec::new(); tokens.len()];
        for (a, b, c) in pairs {
            let (i, j) = (index[&a], index[&b]);
            rows[i as usize].push((j, c));
            if i != j {
                rows[j as usize].push((i, c));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            // Merge duplicates from hand-built input.
            row.dedup_by(|next, prev| {
                if next.0 == prev.0 {
                    prev.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }
        let row_totals = rows.iter().map(|r| r.iter().map(|e| e.1).sum()).collect();

        CoocTable {
            window,
            tokens,
            index,
            rows,
            row_totals,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Tokens with at least one co-occurrence, in table id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn row_total(&self, id: u32) -> u64 {
        self.row_totals[id as usize]
    }

    pub fn row(&self, id: u32) -> &[(u32, u64)] {
        &self.rows[id as usize]
    }

    /// Number of stored unordered pairs.
    pub fn n_pairs(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|e| e.0 as usize >= i).count())
            .sum()
    }

    pub fn lookup(&self, i: u32, j: u32) -> u64 {
        self.rows
            .get(i as usize)
            .and_then(|row| row.binary_search_by_key(&j, |e| e.0).ok().map(|k| row[k].1))
            .unwrap_or(0)
    }

    pub fn lookup_words(&self, a: &str, b: &str) -> u64 {
        match (self.id(a), self.id(b)) {
            (Some(i), Some(j)) => self.lookup(i, j),
            _ => 0,
        }
    }

    pub fn neighbor_distribution(&self, word: &str) -> Result<NeighborDistribution> {
        let id = self.id(word).ok_or_else(|| Error::UnknownWord(word.to_owned()))?;
        let total = self.row_totals[id as usize] as f64;
        Ok(NeighborDistribution {
            word: id,
            neighbors: self.rows[id as usize]
                .iter()
                .map(|&(j, c)| (j, c as f64 / total))
                .collect(),
        })
    }

    /// Cosine between the neighbor distributions of two words, or `None`
    /// when either word has no row.
    pub fn bigram_similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        let p = self.neighbor_distribution(w1).ok()?;
        let q = self.neighbor_distribution(w2).ok()?;
        Some(distribution_cosine(&p, &q))
    }

    /// The `k` tokens most similar to `word` under [`Self::bigram_similarity`],
    /// excluding the word itself. Ties are broken by table id.
    pub fn most_similar(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        let p = self.neighbor_distribution(word)?;
        let mut scored: Vec<(u32, f64)> = (0..self.tokens.len() as u32)
            .filter(|&id| id != p.word)
            .map(|id| {
                let q = self.neighbor_distribution(&self.tokens[id as usize]).expect("table token has a row");
                (id, distribution_cosine(&p, &q))
            })
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(id, s)| (self.tokens[id as usize].clone(), s))
            .collect())
    }

    /// Header `#window<TAB>w`, then `token_i<TAB>token_j<TAB>count` for
    /// every pair with `i <= j`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<cooc stream>", e);
        writeln!(w, "#window\t{}", self.window).map_err(io)?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row.iter().filter(|e| e.0 as usize >= i) {
                writeln!(w, "{}\t{}\t{}", self.tokens[i], self.tokens[j as usize], c).map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty co-occurrence file"))?
            .map_err(|e| Error::parse(1, e.to_string()))?;
        let window = header
            .strip_prefix("#window\t")
            .and_then(|w| w.trim().parse::<usize>().ok())
            .filter(|&w| w >= 1)
            .ok_or_else(|| Error::parse(1, "expected header `#window<TAB>n`"))?;

        let mut pairs = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [a, b, c] = fields[..] else {
                return Err(Error::parse(lineno, "expected token<TAB>token<TAB>count"));
            };
            let count: u64 = c
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::parse(lineno, format!("invalid count `{}`", c)))?;
            pairs.push((a.to_owned(), b.to_owned(), count));
        }
        Ok(Self::from_pairs(window, pairs))
    }

    /// Multiply every count by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.iter_mut().for_each(|e| e.1 *= factor);
        }
        out.row_totals.iter_mut().for_each(|t| *t *= factor);
        out
    }
}

/// Cosine of two sparse distributions over the union of their supports.
fn distribution_cosine(p: &NeighborDistribution, q: &NeighborDistribution) -> f64 {
    let (a, b) = (&p.neighbors, &q.neighbors);
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let na: f64 = a.iter().map(|e| e.1 * e.1).sum();
    let nb: f64 = b.iter().map(|e| e.1 * e.1).sum();
    (dot / (na * nb).sqrt()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn stream(s: &[&[&str]]) -> TokenStream {
        TokenStream::from_sentences(s.iter().map(|s| s.iter().copied()))
    }

    fn table(s: &[&[&str]], window: usize) -> CoocTable {
        let st = stream(s);
        let vocab = Vocabulary::build(&st, 1).unwrap();
        CoocTable::build(&st, &vocab, window).unwrap()
    }

    #[test]
    fn adjacent_pairs_example() {
        let t = table(&[&["a", "b", "a", "b"]], 1);
        assert_eq!(t.lookup_words("a", "b"), 3);
        assert_eq!(t.lookup_words("b", "a"), 3);
        assert_eq!(t.lookup_words("a", "a"), 0);
        assert_eq!(t.window(), 1);
    }

    #[test]
    fn single_token_sentence_contributes_nothing() {
        let t = table(&[&["a"], &["b", "c"]], 2);
        assert_eq!(t.id("a"), None);
        assert_eq!(t.lookup_words("b", "c"), 1);
    }

    #[test]
    fn empty_corpus_and_bad_window() {
        let st = stream(&[&["a"]]);
        let vocab = Vocabulary::build(&st, 1).unwrap();
        assert!(CoocTable::build(&st, &vocab, 0).is_err());
        let other = stream(&[&["x", "y"]]);
        assert!(matches!(CoocTable::build(&other, &vocab, 1), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn oov_tokens_are_gaps() {
        let st = stream(&[&["a", "z", "b", "a", "b"]]);
        let vocab = Vocabulary::build(&st, 2).unwrap();
        let t = CoocTable::build(&st, &vocab, 1).unwrap();
        assert_eq!(t.lookup_words("a", "b"), 2);
        let t = CoocTable::build(&st, &vocab, 2).unwrap();
        assert_eq!(t.lookup_words("a", "b"), 3);
    }

    #[test]
    fn neighbor_distribution_normalizes_rows() {
        // a's row: b three times, c once.
        let t = table(&[&["a", "b"], &["a", "b"], &["b", "a"], &["c", "a"]], 1);
        let d = t.neighbor_distribution("a").unwrap();
        assert_eq!(d.get(t.id("b").unwrap()), 0.75);
        assert_eq!(d.get(t.id("c").unwrap()), 0.25);
        assert!((d.neighbors.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(matches!(t.neighbor_distribution("q"), Err(Error::UnknownWord(_))));
    }

    #[test]
    fn similarity_examples() {
        // a and b both only neighbor x; c only neighbors y.
        let t = table(&[&["a", "x"], &["b", "x"], &["c", "y"], &["d", "x"], &["d", "y"]], 1);
        assert!((t.bigram_similarity("a", "b").unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(t.bigram_similarity("a", "c").unwrap(), 0.0);
        // {x:1} vs {x:1, y:1}
        let s = t.bigram_similarity("a", "d").unwrap();
        assert!((s - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(t.bigram_similarity("a", "missing"), None);
    }

    #[test]
    fn text_round_trip() {
        let t = table(&[&["ایک", "دو", "ایک", "تین"], &["دو", "دو"]], 2);
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#window\t2\n"));
        let back = CoocTable::read_text(&buf[..]).unwrap();
        assert_eq!(back, t);
        let mut again = Vec::new();
        back.write_text(&mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn malformed_text_reports_line() {
        let err = CoocTable::read_text("#window\t1\na\tb\t2\na\tb\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(CoocTable::read_text("a\tb\t1\n".as_bytes()).is_err());
    }

    #[test]
    fn most_similar_excludes_self() {
        let t = table(&[&["a", "x"], &["b", "x"], &["c", "y"]], 1);
        let res = t.most_similar("a", 10).unwrap();
        assert_eq!(res[0], ("b".to_string(), 1.0));
        assert!(res.iter().all(|r| r.0 != "a"));
        assert_eq!(res.len(), t.tokens().len() - 1);
    }

    fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
        proptest::collection::vec(
            proptest::collection::vec((0u8..8).prop_map(|i| format!("w{}", i)), 1..12),
            1..10,
        )
    }

    proptest! {
        #[test]
        fn symmetry_self_similarity_and_scale(s in corpus_strategy(), window in 1usize..4, factor in 2u64..50) {
            let st = TokenStream::from_sentences(s);
            let vocab = Vocabulary::build(&st, 1).unwrap();
            let t = CoocTable::build(&st, &vocab, window).unwrap();
            let scaled = t.scaled(factor);
            for a in t.tokens() {
                prop_assert!((t.bigram_similarity(a, a).unwrap() - 1.0).abs() < 1e-12);
                let total: u64 = t.row(t.id(a).unwrap()).iter().map(|e| e.1).sum();
                prop_assert_eq!(total, t.row_total(t.id(a).unwrap()));
                for b in t.tokens() {
                    let (ia, ib) = (t.id(a).unwrap(), t.id(b).unwrap());
                    prop_assert_eq!(t.lookup(ia, ib), t.lookup(ib, ia));
                    let ab = t.bigram_similarity(a, b).unwrap();
                    prop_assert_eq!(ab, t.bigram_similarity(b, a).unwrap());
                    prop_assert!((ab - scaled.bigram_similarity(a, b).unwrap()).abs() < 1e-12);
                }
            }
        }
    }
}
