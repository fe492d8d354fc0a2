use crate::losses::{build_loss, BoxedLoss, LossKind, LossParams, MultiLabelLoss, WeightVector};
use crate::rng::Rng;
use crate::types::LabelVector;
use crate::Result;

/// Random labels with independent fair coin flips.
pub fn random_labels(rng: &mut Rng, c: usize) -> LabelVector {
    LabelVector::from_bools((0..c).map(|_| rng.bernoulli(0.5)).collect::<Vec<_>>())
}

pub fn random_logits(rng: &mut Rng, c: usize, scale: f64) -> Vec<f64> {
    (0..c).map(|_| rng.uniform_range(-scale, scale)).collect()
}

/// Loss instance for a probe with `c` classes. W-CEL gets random weights in
/// `[0.5, 2)` since probes have no training set to derive them from.
pub fn probe_loss(
    kind: LossKind,
    params: &LossParams,
    c: usize,
    rng: &mut Rng,
) -> Result<BoxedLoss> {
    if kind == LossKind::Wcel {
        let w = (0..c).map(|_| rng.uniform_range(0.5, 2.0)).collect();
        let params = LossParams {
            weights: Some(WeightVector::new(w)?),
            ..params.clone()
        };
        return build_loss(kind, &params);
    }
    build_loss(kind, params)
}

/// Draws `(z, y)` until `z` is at least `min_kink` away from any kink of
/// `loss`, giving up after a fixed number of attempts.
pub fn sample_smooth_point(
    loss: &dyn MultiLabelLoss,
    rng: &mut Rng,
    c: usize,
    scale: f64,
    min_kink: f64,
) -> Option<(Vec<f64>, LabelVector)> {
    for _ in 0..1000 {
        let y = random_labels(rng, c);
        let z = random_logits(rng, c, scale);
        if loss.kink_distance(&z, &y) >= min_kink {
            return Some((z, y));
        }
    }
    None
}
