use std::cmp::Ordering;

use crate::{Error, Result};

/// Values with their average ranks (1-based; tied values share the mean of
/// the positions they span).
#[derive(Clone, Debug, PartialEq)]
pub struct RankedSeries {
    pub values: Vec<f64>,
    pub ranks: Vec<f64>,
    pub has_ties: bool,
}

impl RankedSeries {
    pub fn new(values: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));

        let mut ranks = vec![0.0; values.len()];
        let mut has_ties = false;
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && values[order[end]] == values[order[start]] {
                end += 1;
            }
            has_ties |= end - start > 1;
            // Positions start+1 ..= end, averaged.
            let rank = (start + 1 + end) as f64 / 2.0;
            for &i in &order[start..end] {
                ranks[i] = rank;
            }
            start = end;
        }

        RankedSeries {
            values: values.to_vec(),
            ranks,
            has_ties,
        }
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewPairs(x.len()));
    }
    Ok(())
}

/// `1 - 6 Σd² / (n(n² - 1))` over rank differences `d`. Exact only for
/// tie-free rankings.
pub fn spearman_rank_difference(x: &RankedSeries, y: &RankedSeries) -> Result<f64> {
    check(&x.ranks, &y.ranks)?;
    let n = x.ranks.len() as f64;
    let d2: f64 = x.ranks.iter().zip(&y.ranks).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
}

/// Pearson correlation of the average-rank series; valid with ties.
pub fn spearman_pearson_of_ranks(x: &RankedSeries, y: &RankedSeries) -> Result<f64> {
    check(&x.ranks, &y.ranks)?;
    pearson(&x.ranks, &y.ranks)
}

/// Spearman's rank correlation. Tie-free inputs use the rank-difference
/// formula; inputs with ties use the Pearson correlation of average ranks.
/// Constant inputs have no defined correlation.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("correlation inputs must be finite".into()));
    }
    let rx = RankedSeries::new(x);
    let ry = RankedSeries::new(y);
    if rx.has_ties || ry.has_ties {
        spearman_pearson_of_ranks(&rx, &ry)
    } else {
        spearman_rank_difference(&rx, &ry)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn average_ranks() {
        let r = RankedSeries::new(&[10.0, 20.0, 20.0, 5.0]);
        assert_eq!(r.ranks, vec![2.0, 3.5, 3.5, 1.0]);
        assert!(r.has_ties);
        assert!(!RankedSeries::new(&[3.0, 1.0, 2.0]).has_ties);
    }

    #[test]
    fn identical_and_reversed() {
        let x = [1.0, 4.0, 9.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.sqrt()).collect();
        assert_eq!(spearman(&x, &y).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn hand_computed_rank_difference() {
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((rho - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tied_six_element_case() {
        // x ranks [1, 2.5, 2.5, 4, 5.5, 5.5], y ranks [1, 3, 2, 4, 6, 5]:
        // Σdxdy = 16.5, Σdx² = 16.5, Σdy² = 17.5.
        let rho = spearman(&[1.0, 2.0, 2.0, 3.0, 4.0, 4.0], &[1.0, 3.0, 2.0, 4.0, 6.0, 5.0]).unwrap();
        assert!((rho - (33.0f64 / 35.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1))));
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(Error::TooFewPairs(1))));
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ZeroVariance)));
    }

    fn distinct(n: usize) -> impl Strategy<Value = Vec<f64>> {
        Just((0..n).map(|i| i as f64).collect::<Vec<f64>>())
            .prop_shuffle()
            .prop_map(|v| v.into_iter().map(|x| x * 0.37 - 3.0).collect())
    }

    proptest! {
        #[test]
        fn both_paths_agree_without_ties(x in distinct(20), y in distinct(20)) {
            let (rx, ry) = (RankedSeries::new(&x), RankedSeries::new(&y));
            let a = spearman_rank_difference(&rx, &ry).unwrap();
            let b = spearman_pearson_of_ranks(&rx, &ry).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn symmetric_and_monotone_invariant(
            x in proptest::collection::vec(-5i32..5, 8),
            y in proptest::collection::vec(-5i32..5, 8),
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            match spearman(&x, &y) {
                Ok(rho) => {
                    prop_assert!((-1.0..=1.0).contains(&rho));
                    prop_assert_eq!(rho, spearman(&y, &x).unwrap());
                    let tx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
                    let ty: Vec<f64> = y.iter().map(|v| v.exp()).collect();
                    prop_assert_eq!(rho, spearman(&tx, &ty).unwrap());
                }
                Err(e) => prop_assert!(matches!(e, Error::ZeroVariance)),
            }
        }
    }
}
