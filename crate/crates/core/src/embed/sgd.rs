//! Binary logistic (negative sampling) updates.
//!
//! The kernels are generic over the float type so the same update code can
//! be checked in double precision against finite differences.

use num_traits::Float;

use super::Compose;

pub fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus<F: Float>(z: F) -> F {
    z.max(F::zero()) + (-z.abs()).exp().ln_1p()
}

/// Logistic loss `-[y ln s + (1-y) ln(1-s)]` with `s = σ(score)`.
pub fn logistic_loss<F: Float>(score: F, label: bool) -> F {
    if label {
        softplus(-score)
    } else {
        softplus(score)
    }
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Compose the hidden vector from input rows of a row-major matrix.
pub fn compose_rows<F: Float>(input: &[F], dim: usize, rows: &[usize], compose: Compose, hidden: &mut [F]) {
    hidden.iter_mut().for_each(|h| *h = F::zero());
    for &r in rows {
        for (h, &x) in hidden.iter_mut().zip(&input[r * dim..(r + 1) * dim]) {
            *h = *h + x;
        }
    }
    if compose == Compose::Mean && !rows.is_empty() {
        let n = F::from(rows.len()).unwrap();
        hidden.iter_mut().for_each(|h| *h = *h / n);
    }
}

/// One logistic step against an output row.
///
/// Adds `lr·(label−s)·out` (with the pre-update output row) to `grad`, then
/// moves the output row by `lr·(label−s)·hidden`. Returns the loss before
/// the update.
pub fn pair_step<F: Float>(hidden: &[F], out_row: &mut [F], grad: &mut [F], label: bool, lr: F) -> F {
    let score = dot(hidden, out_row);
    let loss = logistic_loss(score, label);
    let target = if label { F::one() } else { F::zero() };
    let g = lr * (target - sigmoid(score));
    for ((gr, o), &h) in grad.iter_mut().zip(out_row.iter_mut()).zip(hidden) {
        *gr = *gr + g * *o;
        *o = *o + g * h;
    }
    loss
}

/// Add an accumulated hidden-vector gradient to every center row, divided
/// by the row count under mean composition.
pub fn apply_to_rows<F: Float>(input: &mut [F], dim: usize, rows: &[usize], grad: &[F], compose: Compose) {
    let scale = match compose {
        Compose::Mean if !rows.is_empty() => F::one() / F::from(rows.len()).unwrap(),
        _ => F::one(),
    };
    for &r in rows {
        for (x, &g) in input[r * dim..(r + 1) * dim].iter_mut().zip(grad) {
            *x = *x + scale * g;
        }
    }
}

/// A complete single-pair update on raw parameter slices: compose the
/// center rows, step against `out_row`, propagate back to the center rows.
/// Returns the pre-update loss.
pub fn train_pair_slices<F: Float>(
    input: &mut [F],
    out_row: &mut [F],
    dim: usize,
    center_rows: &[usize],
    label: bool,
    lr: F,
    compose: Compose,
) -> F {
    let mut hidden = vec![F::zero(); dim];
    let mut grad = vec![F::zero(); dim];
    compose_rows(input, dim, center_rows, compose, &mut hidden);
    let loss = pair_step(&hidden, out_row, &mut grad, label, lr);
    apply_to_rows(input, dim, center_rows, &grad, compose);
    loss
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!(sigmoid(1000.0f64) == 1.0);
        assert!(sigmoid(-1000.0f64) == 0.0);
        assert!(logistic_loss(-1000.0f64, true).is_finite());
        assert!((logistic_loss(0.0f64, true) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn zero_output_row_gives_half_step() {
        let dim = 3;
        let mut input = vec![0.2f64, -0.4, 0.6, 0.0, 0.2, 0.4];
        let mut out = vec![0.0f64; dim];
        let lr = 0.1;
        let loss = train_pair_slices(&mut input, &mut out, dim, &[0, 1], true, lr, Compose::Mean);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        let hidden = [0.1, -0.1, 0.5];
        for (o, h) in out.iter().zip(hidden) {
            assert!((o - lr * 0.5 * h).abs() < 1e-15);
        }
        // Output row was zero before the step, so inputs are unchanged.
        assert_eq!(input, vec![0.2, -0.4, 0.6, 0.0, 0.2, 0.4]);
    }

    #[test]
    fn saturated_positive_pair_barely_moves() {
        let dim = 2;
        let mut input = vec![10.0f64, 10.0];
        let mut out = vec![10.0f64, 10.0];
        let lr = 0.05;
        let before = (input.clone(), out.clone());
        let s = sigmoid(200.0f64);
        train_pair_slices(&mut input, &mut out, dim, &[0], true, lr, Compose::Mean);
        let bound = lr * (1.0 - s) * 10.0 + 1e-12;
        for (a, b) in input.iter().zip(&before.0).chain(out.iter().zip(&before.1)) {
            assert!((a - b).abs() <= bound);
        }
    }
}
