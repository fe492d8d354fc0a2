//! Hamming loss: the exact XOR form for evaluation and the expected-Hamming
//! surrogate used for training.

use crate::activations::sigmoid_scalar;
use crate::error::{Error, Result};
use crate::losses::{Activation, LossKind, MultiLabelLoss};
use crate::types::LabelVector;

/// Fraction of classes where `pred` and `y` disagree.
pub fn hal_value(pred: &LabelVector, y: &LabelVector) -> Result<f64> {
    if pred.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: pred.len(),
        });
    }
    if y.is_empty() {
        return Ok(0.0);
    }
    let wrong = pred.iter().zip(y.iter()).filter(|(p, r)| p != r).count();
    Ok(wrong as f64 / y.len() as f64)
}

/// Expected Hamming loss under independent Bernoulli predictions `ŷ = δ(z)`:
/// `(1/C) Σ_c [y_c(1 − ŷ_c) + (1 − y_c)ŷ_c]`.
///
/// Each term is the probability of the wrong outcome, `δ(−s·z)` with
/// `s = 2y − 1`.
pub fn hal_soft_value(z: &[f64], y: &LabelVector) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let sum: f64 = z
        .iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| sigmoid_scalar(-signed(yc) * zc))
        .sum();
    sum / z.len() as f64
}

pub fn hal_soft_gradient(z: &[f64], y: &LabelVector) -> Vec<f64> {
    let c = z.len() as f64;
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| {
            let s = signed(yc);
            -s * sigmoid_scalar(s * zc) * sigmoid_scalar(-s * zc) / c
        })
        .collect()
}

fn signed(y: u8) -> f64 {
    if y == 1 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SoftHamming;

impl MultiLabelLoss for SoftHamming {
    fn kind(&self) -> LossKind {
        LossKind::Hal
    }

    fn activation(&self) -> Activation {
        Activation::Sigmoid
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        hal_soft_value(z, y)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        hal_soft_gradient(z, y)
    }
}
