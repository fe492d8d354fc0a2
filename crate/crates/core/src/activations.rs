//! Sigmoid and sparsemax activations.

use crate::types::ProbVector;

/// Numerically stable logistic function for a single logit.
pub fn sigmoid_scalar(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(z: &[f64]) -> ProbVector {
    ProbVector::new_unchecked(z.iter().map(|&v| sigmoid_scalar(v)).collect())
}

/// Entrywise `δ(z)(1 − δ(z))`.
pub fn sigmoid_derivative(z: &[f64]) -> Vec<f64> {
    z.iter()
        .map(|&v| {
            // δ(z)·δ(−z) avoids the cancellation in 1 − δ(z) for large z.
            sigmoid_scalar(v) * sigmoid_scalar(-v)
        })
        .collect()
}

/// Probability assigned to the reference outcome: `ŷ` when the label is
/// present, `1 − ŷ` otherwise.
pub fn class_probability(y: u8, yhat: f64) -> f64 {
    if y == 1 {
        yhat
    } else {
        1.0 - yhat
    }
}

/// Euclidean projection of a logit vector onto the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsemaxResult {
    pub probs: ProbVector,
    /// Indices with strictly positive probability, ascending.
    pub support: Vec<usize>,
    pub tau: f64,
}

impl SparsemaxResult {
    pub fn in_support(&self, j: usize) -> bool {
        self.probs[j] > 0.0
    }
}

/// Sparsemax by sort-and-threshold.
///
/// Scores are sorted descending (ties keep index order); the support size is
/// the largest `k` with `1 + k·z_(k) > Σ_{j≤k} z_(j)` and the threshold is
/// `τ = (Σ_{j≤k} z_(j) − 1) / k`.
///
/// Panics if `z` is empty.
pub fn sparsemax(z: &[f64]) -> SparsemaxResult {
    assert!(!z.is_empty(), "sparsemax of an empty vector");
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]));

    let mut cumsum = 0.0;
    let mut support_size = 1;
    let mut support_sum = z[order[0]];
    for (k, &j) in order.iter().enumerate() {
        cumsum += z[j];
        let k = k + 1;
        if 1.0 + k as f64 * z[j] > cumsum {
            support_size = k;
            support_sum = cumsum;
        }
    }
    let tau = (support_sum - 1.0) / support_size as f64;

    let probs: Vec<f64> = z.iter().map(|&v| (v - tau).max(0.0)).collect();
    let support = (0..z.len()).filter(|&j| probs[j] > 0.0).collect();
    SparsemaxResult {
        probs: ProbVector::new_unchecked(probs),
        support,
        tau,
    }
}
