use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subvec::embed::VecEmbeddings;
use subvec::eval::project_2d;

#[test]
fn projection_variance_matches_reference_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let rows: Vec<(String, Vec<f32>)> = (0..10)
            .map(|i| (format!("w{}", i), (0..100).map(|_| rng.random_range(-1.0f32..1.0)).collect()))
            .collect();
        let data = DMatrix::from_fn(10, 100, |i, j| rows[i].1[j] as f64);
        let mean = data.row_mean();
        let centered = DMatrix::from_fn(10, 100, |i, j| data[(i, j)] - mean[j]);
        let cov = centered.transpose() * &centered / 9.0;
        let mut eig: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let words: Vec<String> = rows.iter().map(|r| r.0.clone()).collect();
        let p = project_2d(&VecEmbeddings::new(rows).unwrap(), &words).unwrap();
        for (c, &expected) in eig.iter().take(2).enumerate() {
            let coords: Vec<f64> = p.points.iter().map(|pt| if c == 0 { pt.1 } else { pt.2 }).collect();
            let m = coords.iter().sum::<f64>() / 10.0;
            let var = coords.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 9.0;
            assert!((var - expected).abs() < 1e-6, "component {}: {} vs {}", c, var, expected);
            assert!((p.variances[c] - expected).abs() < 1e-6);
        }
    }
}
