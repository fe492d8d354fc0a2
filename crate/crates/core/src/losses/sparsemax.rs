//! Sparsemax loss over the raw binary label vector:
//! `−yᵀz + ½ Σ_{j∈S} (z_j² − τ²) + ½‖y‖²`, with `S` and `τ` from
//! [`sparsemax`]. Its gradient is `sparsemax(z) − y`.

use crate::activations::sparsemax;
use crate::losses::{Activation, LossKind, MultiLabelLoss};
use crate::types::LabelVector;

pub fn sml_value(z: &[f64], y: &LabelVector) -> f64 {
    let r = sparsemax(z);
    let linear: f64 = z
        .iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| f64::from(yc) * zc)
        .sum();
    let tau_sq = r.tau * r.tau;
    let quadratic: f64 = r.support.iter().map(|&j| z[j] * z[j] - tau_sq).sum();
    let label_norm = y.positive_count() as f64;
    -linear + 0.5 * quadratic + 0.5 * label_norm
}

pub fn sml_gradient(z: &[f64], y: &LabelVector) -> Vec<f64> {
    let r = sparsemax(z);
    r.probs
        .iter()
        .zip(y.iter())
        .map(|(&p, &yc)| p - f64::from(yc))
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SparsemaxLoss;

impl MultiLabelLoss for SparsemaxLoss {
    fn kind(&self) -> LossKind {
        LossKind::Sml
    }

    fn activation(&self) -> Activation {
        Activation::Sparsemax
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        sml_value(z, y)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        sml_gradient(z, y)
    }

    /// Distance of the threshold to the nearest logit, i.e. to a change of
    /// the support set.
    fn kink_distance(&self, z: &[f64], _y: &LabelVector) -> f64 {
        let tau = sparsemax(z).tau;
        z.iter()
            .map(|&v| (v - tau).abs())
            .fold(f64::INFINITY, f64::min)
    }
}
