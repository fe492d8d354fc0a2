//! Modified Huber classification loss on raw logits with `{−1, +1}` labels:
//! quadratic hinge for margins `y·z ≥ −1`, linear `−4·y·z` below.

use crate::losses::{Activation, LossKind, MultiLabelLoss};
use crate::types::{LabelVector, SignedLabelVector};

fn term(margin: f64) -> f64 {
    if margin >= -1.0 {
        let h = (1.0 - margin).max(0.0);
        h * h
    } else {
        -4.0 * margin
    }
}

/// Derivative of [`term`] in the margin.
fn term_slope(margin: f64) -> f64 {
    if margin >= -1.0 {
        -2.0 * (1.0 - margin).max(0.0)
    } else {
        -4.0
    }
}

pub fn hl_value(z: &[f64], y: &SignedLabelVector) -> f64 {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| term(f64::from(yc) * zc))
        .sum()
}

pub fn hl_gradient(z: &[f64], y: &SignedLabelVector) -> Vec<f64> {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| {
            let s = f64::from(yc);
            s * term_slope(s * zc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ModifiedHuber;

impl MultiLabelLoss for ModifiedHuber {
    fn kind(&self) -> LossKind {
        LossKind::Hl
    }

    fn activation(&self) -> Activation {
        Activation::RawLogit
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        hl_value(z, &y.to_signed())
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        hl_gradient(z, &y.to_signed())
    }

    /// Distance to either branch boundary `y·z = ±1`.
    fn kink_distance(&self, z: &[f64], y: &LabelVector) -> f64 {
        let s = y.to_signed();
        z.iter()
            .zip(s.iter())
            .map(|(&zc, &yc)| {
                let m = f64::from(yc) * zc;
                (m + 1.0).abs().min((m - 1.0).abs())
            })
            .fold(f64::INFINITY, f64::min)
    }
}
