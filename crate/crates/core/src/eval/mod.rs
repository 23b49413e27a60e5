//! Word-similarity evaluation: datasets, Spearman correlation, model
//! comparison tables and 2D projections.

mod dataset;
mod project;
mod spearman;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use self::dataset::SimilarityDataset;
pub use self::project::{project_2d, Projection};
pub use self::spearman::{spearman, spearman_pearson_of_ranks, spearman_rank_difference, RankedSeries};

use crate::cooc::CoocTable;
use crate::embed::{cosine, EmbeddingModel, Embeddings, VecEmbeddings};
use crate::{Error, Result};

/// Similarity of two words under some model, or `None` when the model
/// cannot represent one of them.
///
/// The out-of-vocabulary policy belongs to the scorer: subword models
/// compose vectors for unseen words, co-occurrence tables and plain vector
/// files do not.
pub trait SimilarityScorer {
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64>;
}

impl<F> SimilarityScorer for F
where
    F: Fn(&str, &str) -> Option<f64>,
{
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        self(w1, w2)
    }
}

fn embedding_similarity<E: Embeddings + ?Sized>(emb: &E, w1: &str, w2: &str) -> Option<f64> {
    let a = emb.word_vector(w1).ok()?;
    let b = emb.word_vector(w2).ok()?;
    cosine(&a, &b).ok()
}

impl SimilarityScorer for EmbeddingModel {
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        embedding_similarity(self, w1, w2)
    }
}

impl SimilarityScorer for VecEmbeddings {
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        embedding_similarity(self, w1, w2)
    }
}

impl SimilarityScorer for CoocTable {
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        self.bigram_similarity(w1, w2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub dataset: String,
    pub model: String,
    pub rho: f64,
    pub n_scored: usize,
    pub n_total: usize,
    /// Pairs the model could not score, in dataset order.
    pub oov_pairs: Vec<(String, String)>,
}

/// Score every dataset pair and correlate the scores with the human
/// judgments over the pairs the model could score.
pub fn evaluate<S: SimilarityScorer + ?Sized>(
    scorer: &S,
    dataset: &SimilarityDataset,
    model_name: &str,
) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(Error::TooFewPairs(0));
    }
    let mut scored = Vec::with_capacity(dataset.len());
    let mut oov_pairs = Vec::new();
    for (a, b, human) in &dataset.pairs {
        match scorer.similarity(a, b) {
            Some(s) if s.is_finite() => scored.push((a.as_str(), b.as_str(), s, *human)),
            _ => oov_pairs.push((a.clone(), b.clone())),
        }
    }
    if scored.len() < 2 {
        return Err(Error::TooFewPairs(scored.len()));
    }

    // Canonical order so the result does not depend on row order.
    scored.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let model_scores: Vec<f64> = scored.iter().map(|s| s.2).collect();
    let human_scores: Vec<f64> = scored.iter().map(|s| s.3).collect();
    let rho = spearman(&model_scores, &human_scores)?;

    Ok(EvalReport {
        dataset: dataset.name.clone(),
        model: model_name.to_owned(),
        rho,
        n_scored: scored.len(),
        n_total: dataset.len(),
        oov_pairs,
    })
}

/// Models × datasets grid of correlations.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub models: Vec<String>,
    pub datasets: Vec<String>,
    cells: HashMap<(usize, usize), EvalReport>,
}

/// Arrange reports into a grid, rows and columns in first-seen order. A
/// later report for the same model and dataset replaces an earlier one.
pub fn compare(reports: &[EvalReport]) -> Comparison {
    let mut models: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    let mut cells = HashMap::new();
    for r in reports {
        let m = position_or_push(&mut models, &r.model);
        let d = position_or_push(&mut datasets, &r.dataset);
        cells.insert((m, d), r.clone());
    }
    Comparison {
        models,
        datasets,
        cells,
    }
}

fn position_or_push(list: &mut Vec<String>, item: &str) -> usize {
    list.iter().position(|x| x == item).unwrap_or_else(|| {
        list.push(item.to_owned());
        list.len() - 1
    })
}

impl Comparison {
    pub fn cell(&self, model: &str, dataset: &str) -> Option<&EvalReport> {
        let m = self.models.iter().position(|x| x == model)?;
        let d = self.datasets.iter().position(|x| x == dataset)?;
        self.cells.get(&(m, d))
    }

    fn cell_text(&self, m: usize, d: usize) -> String {
        match self.cells.get(&(m, d)) {
            Some(r) => format!("{:.3} ({}/{})", r.rho, r.n_scored, r.n_total),
            None => "-".to_owned(),
        }
    }

    /// Aligned text table: one row per model, one column per dataset, each
    /// cell `rho (scored/total)`.
    pub fn render_text(&self) -> String {
        let mut grid: Vec<Vec<String>> = Vec::with_capacity(self.models.len() + 1);
        grid.push(std::iter::once(String::new()).chain(self.datasets.iter().cloned()).collect());
        for (m, model) in self.models.iter().enumerate() {
            let mut row = vec![model.clone()];
            row.extend((0..self.datasets.len()).map(|d| self.cell_text(m, d)));
            grid.push(row);
        }
        let widths: Vec<usize> = (0..=self.datasets.len())
            .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();

        let mut out = String::new();
        for (i, row) in grid.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (text, &w))| {
                    let pad = w - text.chars().count();
                    if c == 0 {
                        format!("{}{}", text, " ".repeat(pad))
                    } else {
                        format!("{}{}", " ".repeat(pad), text)
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
                let _ = writeln!(out, "{}", "-".repeat(total));
            }
        }
        out
    }

    /// `model<TAB>dataset<TAB>rho<TAB>n_scored<TAB>n_total` rows after a
    /// header line, for every filled cell.
    pub fn render_tsv(&self) -> String {
        let mut out = String::from("model\tdataset\trho\tn_scored\tn_total\n");
        for m in 0..self.models.len() {
            for d in 0..self.datasets.len() {
                if let Some(r) = self.cells.get(&(m, d)) {
                    let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.model, r.dataset, r.rho, r.n_scored, r.n_total);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    fn dataset(pairs: &[(&str, &str, f64)]) -> SimilarityDataset {
        SimilarityDataset::new(
            "toy",
            pairs.iter().map(|&(a, b, s)| (a.to_owned(), b.to_owned(), s)).collect(),
        )
        .unwrap()
    }

    fn report(model: &str, ds: &str, rho: f64) -> EvalReport {
        EvalReport {
            dataset: ds.into(),
            model: model.into(),
            rho,
            n_scored: 9,
            n_total: 10,
            oov_pairs: vec![],
        }
    }

    #[test]
    fn perfect_scorer() {
        let ds = dataset(&[("a", "b", 1.0), ("c", "d", 3.0), ("e", "f", 2.0), ("g", "h", 2.0)]);
        let human: HashMap<(String, String), f64> =
            ds.pairs.iter().map(|(a, b, s)| ((a.clone(), b.clone()), *s)).collect();
        let scorer = |a: &str, b: &str| human.get(&(a.to_owned(), b.to_owned())).copied();
        let r = evaluate(&scorer, &ds, "oracle").unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!((r.n_scored, r.n_total), (4, 4));
    }

    #[test]
    fn constant_scorer_is_zero_variance() {
        let ds = dataset(&[("a", "b", 1.0), ("c", "d", 3.0), ("e", "f", 2.0)]);
        let err = evaluate(&|_: &str, _: &str| Some(0.5), &ds, "flat").unwrap_err();
        assert!(matches!(err, Error::ZeroVariance));
    }

    #[test]
    fn unscored_pairs_are_reported() {
        let ds = dataset(&[("a", "b", 1.0), ("c", "x", 3.0), ("e", "f", 2.0), ("g", "h", 0.5)]);
        let scorer = |a: &str, b: &str| {
            if a == "c" || b == "x" {
                None
            } else {
                Some(a.as_bytes()[0] as f64)
            }
        };
        let r = evaluate(&scorer, &ds, "m").unwrap();
        assert_eq!(r.oov_pairs, vec![("c".to_string(), "x".to_string())]);
        assert_eq!(r.n_scored + r.oov_pairs.len(), r.n_total);

        let none = |_: &str, _: &str| None;
        assert!(matches!(evaluate(&none, &ds, "m"), Err(Error::TooFewPairs(0))));
    }

    #[test]
    fn five_pair_hand_ranked() {
        // Human ranks 1..5 in row order; model ranks [2, 1, 3, 5, 4]:
        // Σd² = 1 + 1 + 0 + 1 + 1 = 4, rho = 1 - 24/120 = 0.8.
        let ds = dataset(&[("a", "1", 1.0), ("b", "2", 2.0), ("c", "3", 3.0), ("d", "4", 4.0), ("e", "5", 5.0)]);
        let model: HashMap<&str, f64> = [("a", 0.2), ("b", 0.1), ("c", 0.3), ("d", 0.9), ("e", 0.5)].into();
        let r = evaluate(&|a: &str, _: &str| model.get(a).copied(), &ds, "toy").unwrap();
        assert!((r.rho - 0.8).abs() < 1e-15);
    }

    #[test]
    fn evaluation_is_row_order_invariant() {
        let rows = [("a", "b", 1.0), ("c", "d", 3.0), ("e", "f", 2.0), ("g", "h", 2.0), ("i", "z", 9.0), ("k", "l", 4.0)];
        let scorer = |a: &str, b: &str| (b != "z").then(|| ((a.as_bytes()[0] as f64) * 0.7).sin());
        let base = evaluate(&scorer, &dataset(&rows), "m").unwrap();
        let mut reversed = rows;
        reversed.reverse();
        let other = evaluate(&scorer, &dataset(&reversed), "m").unwrap();
        assert_eq!(base.rho, other.rho);
        assert_eq!(base.oov_pairs, other.oov_pairs);
    }

    #[test]
    fn comparison_grid_shapes() {
        let c = compare(&[
            report("Fasttext", "WordSim-353", 0.462),
            report("Fasttext", "SimLex-999", 0.743),
            report("bigrams", "WordSim-353", 0.188),
            report("bigrams", "SimLex-999", 0.156),
        ]);
        assert_eq!(c.models, ["Fasttext", "bigrams"]);
        assert_eq!(c.datasets, ["WordSim-353", "SimLex-999"]);
        let text = c.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("Fasttext") && lines[2].contains("0.462 (9/10)") && lines[2].contains("0.743"));
        assert_eq!(c.render_tsv().lines().count(), 5);

        let single = compare(&[report("m", "d", 0.5)]);
        assert_eq!(single.render_text().lines().count(), 3);

        let sparse = compare(&[report("m1", "d1", 0.5), report("m2", "d2", 0.1)]);
        let text = sparse.render_text();
        assert!(text.lines().nth(2).unwrap().trim_end().ends_with('-'));
        assert!(sparse.cell("m1", "d2").is_none());
        assert_eq!(sparse.render_tsv().lines().count(), 3);
    }
}
