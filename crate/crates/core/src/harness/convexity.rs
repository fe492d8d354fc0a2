//! Empirical midpoint-convexity probes in logit space.

use serde::Serialize;

use crate::harness::sampling::{probe_loss, random_labels, random_logits};
use crate::losses::{LossKind, LossParams};
use crate::rng::Rng;
use crate::Result;

/// Largest midpoint excess tolerated before a loss counts as non-convex.
pub const CONVEXITY_SLACK: f64 = 1e-10;

/// Logit range for the probes; kept inside the region where the
/// cross-entropy log-probability clamp is inactive.
pub const PROBE_LOGIT_SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convex,
    Violated,
    /// Measured but not asserted.
    Reported,
    Untested,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityProbeResult {
    pub loss: LossKind,
    pub segments: usize,
    pub max_violation: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Losses whose convexity in the logits is asserted; the others are probed
/// and reported only.
pub fn convexity_asserted(kind: LossKind) -> bool {
    matches!(
        kind,
        LossKind::Cel | LossKind::Wcel | LossKind::Hl | LossKind::Sml
    )
}

pub fn probe(
    kind: LossKind,
    params: &LossParams,
    segments: usize,
    seed: u64,
) -> Result<ConvexityProbeResult> {
    let mut rng = Rng::new(seed).split(kind.as_str());
    let mut worst = 0.0f64;
    for _ in 0..segments {
        let c = 2 + rng.below(11);
        let loss = probe_loss(kind, params, c, &mut rng)?;
        let y = random_labels(&mut rng, c);
        let a = random_logits(&mut rng, c, PROBE_LOGIT_SCALE);
        let b = random_logits(&mut rng, c, PROBE_LOGIT_SCALE);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let excess = loss.value(&mid, &y) - 0.5 * (loss.value(&a, &y) + loss.value(&b, &y));
        worst = worst.max(excess);
    }
    let verdict = if segments == 0 {
        Verdict::Untested
    } else if !convexity_asserted(kind) {
        Verdict::Reported
    } else if worst <= CONVEXITY_SLACK {
        Verdict::Convex
    } else {
        Verdict::Violated
    };
    let note = (kind == LossKind::Hal).then(|| {
        "exact XOR form is piecewise constant and not differentiable; soft surrogate probed"
            .to_string()
    });
    Ok(ConvexityProbeResult {
        loss: kind,
        segments,
        max_violation: worst,
        verdict,
        note,
    })
}

pub fn cmd_convexity(
    losses: &[LossKind],
    params: &LossParams,
    segments: usize,
    seed: u64,
) -> Result<Vec<ConvexityProbeResult>> {
    losses
        .iter()
        .map(|&k| probe(k, params, segments, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_segments_untested() {
        let r = probe(LossKind::Cel, &LossParams::default(), 0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Untested);
        assert_eq!(r.max_violation, 0.0);
    }

    #[test]
    fn focal_is_report_only() {
        let r = probe(LossKind::Fl, &LossParams::default(), 200, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Reported);
        assert!(r.max_violation >= 0.0);
    }

    #[test]
    fn cross_entropy_is_convex() {
        let r = probe(LossKind::Cel, &LossParams::default(), 300, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Convex);
    }
}
