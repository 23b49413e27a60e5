use crate::embed::Embeddings;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub points: Vec<(String, f64, f64)>,
    /// Words without a representation, left out of the projection.
    pub skipped: Vec<String>,
    /// Sample variance along each of the two components.
    pub variances: [f64; 2],
}

impl Projection {
    /// `token<TAB>x<TAB>y` lines.
    pub fn to_tsv(&self) -> String {
        self.points
            .iter()
            .map(|(t, x, y)| format!("{}\t{}\t{}\n", t, x, y))
            .collect()
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and column eigenvectors (row-major `n × n`),
/// sorted by descending eigenvalue.
fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + col] = v[k * n + src];
        }
    }
    (values, vectors)
}

/// Project word vectors onto the top two principal components of their
/// sample covariance. Each component is oriented so its first non-zero
/// loading is positive.
pub fn project_2d<E: Embeddings + ?Sized, S: AsRef<str>>(emb: &E, words: &[S]) -> Result<Projection> {
    let dim = emb.dim();
    let mut tokens = Vec::new();
    let mut skipped = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    for w in words {
        let w = w.as_ref();
        match emb.word_vector(w) {
            Ok(v) => {
                tokens.push(w.to_owned());
                data.extend(v.values().iter().map(|&x| x as f64));
            }
            Err(Error::NoRepresentation(_)) => {
                log::warn!("skipping `{}`: no representation", w);
                skipped.push(w.to_owned());
            }
            Err(e) => return Err(e),
        }
    }
    let n = tokens.len();
    if n < 3 {
        return Err(Error::TooFewItems { needed: 3, got: n });
    }

    for d in 0..dim {
        let mean = (0..n).map(|i| data[i * dim + d]).sum::<f64>() / n as f64;
        (0..n).for_each(|i| data[i * dim + d] -= mean);
    }
    let denom = (n - 1) as f64;

    // Loadings of the two leading components, each of length `dim`.
    let mut loadings = [vec![0.0; dim], vec![0.0; dim]];
    let mut variances = [0.0; 2];
    if dim <= n {
        let mut cov = vec![0.0; dim * dim];
        for i in 0..n {
            let row = &data[i * dim..(i + 1) * dim];
            for a in 0..dim {
                for b in a..dim {
                    cov[a * dim + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..dim {
            for b in a..dim {
                cov[a * dim + b] /= denom;
                cov[b * dim + a] = cov[a * dim + b];
            }
        }
        let (values, vectors) = symmetric_eigen(cov, dim);
        for c in 0..2.min(dim) {
            variances[c] = values[c].max(0.0);
            loadings[c] = (0..dim).map(|k| vectors[k * dim + c]).collect();
        }
    } else {
        // Fewer points than dimensions: decompose the n × n Gram matrix and
        // map its eigenvectors back through the data.
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let dot: f64 = (0..dim).map(|k| data[i * dim + k] * data[j * dim + k]).sum();
                gram[i * n + j] = dot / denom;
                gram[j * n + i] = dot / denom;
            }
        }
        let (values, vectors) = symmetric_eigen(gram, n);
        for c in 0..2 {
            variances[c] = values[c].max(0.0);
            let mut load: Vec<f64> = (0..dim)
                .map(|k| (0..n).map(|i| data[i * dim + k] * vectors[i * n + c]).sum())
                .collect();
            let norm = load.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                load.iter_mut().for_each(|x| *x /= norm);
            } else {
                load.iter_mut().for_each(|x| *x = 0.0);
            }
            loadings[c] = load;
        }
    }

    for load in &mut loadings {
        if let Some(&first) = load.iter().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                load.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }

    let points = tokens
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let row = &data[i * dim..(i + 1) * dim];
            let x = row.iter().zip(&loadings[0]).map(|(a, b)| a * b).sum();
            let y = row.iter().zip(&loadings[1]).map(|(a, b)| a * b).sum();
            (t, x, y)
        })
        .collect();

    Ok(Projection {
        points,
        skipped,
        variances,
    })
}
