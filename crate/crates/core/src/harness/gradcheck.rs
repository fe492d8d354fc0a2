//! Finite-difference verification of the analytic loss gradients.

use serde::Serialize;

use crate::harness::sampling::{probe_loss, sample_smooth_point};
use crate::losses::{LossKind, LossParams, DEFAULT_ALPHA, DEFAULT_GAMMA};
use crate::rng::Rng;
use crate::Result;

pub const DEFAULT_STEP: f64 = 1e-6;
pub const DEFAULT_TOLERANCE: f64 = 1e-5;
pub const KINK_MARGIN: f64 = 1e-4;

/// Central differences of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, or the absolute difference when both vectors
/// are below 1e−8 in norm.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut a.iter().zip(b).map(|(x, y)| x - y));
    let scale = norm(&mut a.iter().copied()).max(norm(&mut b.iter().copied()));
    if scale < 1e-8 {
        diff
    } else {
        diff / scale
    }
}

#[derive(Debug, Clone)]
pub struct GradCheckConfig {
    pub trials: usize,
    pub tolerance: f64,
    pub step: f64,
    pub min_classes: usize,
    pub max_classes: usize,
    /// Logits are drawn uniformly from `[−scale, scale]`.
    pub logit_scale: f64,
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            tolerance: DEFAULT_TOLERANCE,
            step: DEFAULT_STEP,
            min_classes: 2,
            max_classes: 12,
            logit_scale: 3.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub loss: LossKind,
    pub label: String,
    pub trials: usize,
    pub failures: usize,
    pub max_rel_error: f64,
    pub note: Option<String>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

/// Gradient check of one loss; a trial passes when the relative error is
/// strictly below the tolerance, so a zero tolerance always fails.
pub fn check_loss(
    kind: LossKind,
    params: &LossParams,
    cfg: &GradCheckConfig,
) -> Result<GradCheckReport> {
    let mut rng = Rng::new(cfg.seed).split(kind.as_str());
    let mut failures = 0;
    let mut max_err = 0.0f64;
    let mut trials = 0;
    for _ in 0..cfg.trials {
        let c = cfg.min_classes + rng.below(cfg.max_classes - cfg.min_classes + 1);
        let loss = probe_loss(kind, params, c, &mut rng)?;
        let Some((z, y)) =
            sample_smooth_point(loss.as_ref(), &mut rng, c, cfg.logit_scale, KINK_MARGIN)
        else {
            continue;
        };
        let analytic = loss.gradient(&z, &y);
        let numeric = central_difference(|v| loss.value(v, &y), &z, cfg.step);
        let err = relative_error(&analytic, &numeric);
        trials += 1;
        max_err = max_err.max(err);
        if err.is_nan() || err >= cfg.tolerance {
            failures += 1;
        }
    }
    let label = match kind {
        LossKind::Fl => format!("fl(gamma={})", params.gamma.unwrap_or(DEFAULT_GAMMA)),
        LossKind::Rl => format!("rl(alpha={})", params.alpha.unwrap_or(DEFAULT_ALPHA)),
        LossKind::Hal => "hal(soft)".to_string(),
        other => other.as_str().to_string(),
    };
    let note = (kind == LossKind::Hal)
        .then(|| "exact XOR form is not differentiable; surrogate checked instead".to_string());
    Ok(GradCheckReport {
        loss: kind,
        label,
        trials,
        failures,
        max_rel_error: max_err,
        note,
    })
}

pub fn cmd_gradcheck(
    losses: &[LossKind],
    params: &LossParams,
    cfg: &GradCheckConfig,
) -> Result<Vec<GradCheckReport>> {
    losses.iter().map(|&k| check_loss(k, params, cfg)).collect()
}
