//! Pairwise ranking hinge: every positive logit should beat every negative
//! logit by at least the margin `α`.

use crate::error::{Error, Result};
use crate::losses::{Activation, LossKind, MultiLabelLoss};
use crate::types::LabelVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankingConfig {
    alpha: f64,
}

impl RankingConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "ranking margin must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn partition(y: &LabelVector) -> (Vec<usize>, Vec<usize>) {
    (0..y.len()).partition(|&c| y.is_positive(c))
}

/// `Σ_{v∉y} Σ_{u∈y} max(0, α + z_v − z_u)`; zero when either set is empty.
pub fn rl_value(z: &[f64], y: &LabelVector, cfg: &RankingConfig) -> f64 {
    let (pos, neg) = partition(y);
    let mut total = 0.0;
    for &v in &neg {
        for &u in &pos {
            total += (cfg.alpha + z[v] - z[u]).max(0.0);
        }
    }
    total
}

/// Active pairs (strictly positive hinge) push `z_v` up by one and `z_u`
/// down by one; pairs exactly at the corner contribute nothing.
pub fn rl_gradient(z: &[f64], y: &LabelVector, cfg: &RankingConfig) -> Vec<f64> {
    let (pos, neg) = partition(y);
    let mut grad = vec![0.0; z.len()];
    for &v in &neg {
        for &u in &pos {
            if cfg.alpha + z[v] - z[u] > 0.0 {
                grad[v] += 1.0;
                grad[u] -= 1.0;
            }
        }
    }
    grad
}

#[derive(Debug, Clone, Copy)]
pub struct RankingLoss {
    pub config: RankingConfig,
}

impl RankingLoss {
    pub fn new(config: RankingConfig) -> Self {
        Self { config }
    }
}

impl MultiLabelLoss for RankingLoss {
    fn kind(&self) -> LossKind {
        LossKind::Rl
    }

    fn activation(&self) -> Activation {
        Activation::RawLogit
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        rl_value(z, y, &self.config)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        rl_gradient(z, y, &self.config)
    }

    fn kink_distance(&self, z: &[f64], y: &LabelVector) -> f64 {
        let (pos, neg) = partition(y);
        let mut d = f64::INFINITY;
        for &v in &neg {
            for &u in &pos {
                d = d.min((self.config.alpha + z[v] - z[u]).abs());
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(bits: &[u8]) -> LabelVector {
        LabelVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let cfg = RankingConfig::new(1.0).unwrap();
        assert_eq!(rl_value(&[3.0, 0.0, 0.0], &y(&[1, 0, 0]), &cfg), 0.0);
        assert_eq!(rl_value(&[0.5, 0.0, 1.0], &y(&[1, 0, 0]), &cfg), 2.0);
        assert_eq!(rl_value(&[0.5, -4.0], &y(&[1, 1]), &cfg), 0.0);
        assert_eq!(rl_value(&[0.5, -4.0], &y(&[0, 0]), &cfg), 0.0);
    }

    #[test]
    fn gradient_by_hand() {
        let cfg = RankingConfig::new(1.0).unwrap();
        let g = rl_gradient(&[0.5, 0.0, 1.0], &y(&[1, 0, 0]), &cfg);
        assert_eq!(g, vec![-2.0, 1.0, 1.0]);
        assert_eq!(rl_gradient(&[0.5, -4.0], &y(&[1, 1]), &cfg), vec![0.0, 0.0]);
        // hinge exactly at the corner
        assert_eq!(rl_gradient(&[1.0, 0.0], &y(&[1, 0]), &cfg), vec![0.0, 0.0]);
    }

    #[test]
    fn margin_validated() {
        assert!(RankingConfig::new(-1.0).is_err());
        assert!(RankingConfig::new(0.0).is_ok());
    }
}
