//! RMSprop: `v ← ρ·v + (1 − ρ)·g²`, `θ ← θ − η·g / (√v + ε)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 1e-4;
pub const DEFAULT_DECAY: f64 = 0.9;
pub const DEFAULT_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmspropConfig {
    pub learning_rate: f64,
    pub decay: f64,
    pub epsilon: f64,
}

impl Default for RmspropConfig {
    fn default() -> Self {
        Self {
            learning_rate: DEFAULT_LEARNING_RATE,
            decay: DEFAULT_DECAY,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl RmspropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(Error::InvalidConfig(format!(
                "decay {} outside [0, 1)",
                self.decay
            )));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon {} < 0",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RmspropState {
    pub config: RmspropConfig,
    /// Running mean of squared gradients, one entry per parameter.
    pub accumulator: Vec<f64>,
}

impl RmspropState {
    pub fn new(config: RmspropConfig, param_count: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            accumulator: vec![0.0; param_count],
        })
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), grads.len());
        assert_eq!(params.len(), self.accumulator.len());
        let RmspropConfig {
            learning_rate,
            decay,
            epsilon,
        } = self.config;
        for ((theta, &g), v) in params.iter_mut().zip(grads).zip(&mut self.accumulator) {
            *v = decay * *v + (1.0 - decay) * g * g;
            *theta -= learning_rate * g / (v.sqrt() + epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_keeps_params() {
        let mut s = RmspropState::new(RmspropConfig::default(), 3).unwrap();
        let mut p = vec![1.0, -2.0, 3.0];
        s.step(&mut p, &[0.0; 3]);
        assert_eq!(p, vec![1.0, -2.0, 3.0]);
    }

    #[test]
    fn first_step_formula() {
        let cfg = RmspropConfig::default();
        let mut s = RmspropState::new(cfg, 2).unwrap();
        let g = [0.5, -3.0];
        let mut p = vec![0.0, 0.0];
        s.step(&mut p, &g);
        for (pi, gi) in p.iter().zip(g) {
            let expected =
                -cfg.learning_rate * gi / ((1.0 - cfg.decay).sqrt() * gi.abs() + cfg.epsilon);
            assert!((pi - expected).abs() < 1e-18, "{pi} vs {expected}");
        }
    }

    #[test]
    fn repeated_steps_shrink() {
        let mut s = RmspropState::new(RmspropConfig::default(), 1).unwrap();
        let mut p = vec![0.0];
        s.step(&mut p, &[1.0]);
        let first = p[0].abs();
        let before = p[0];
        s.step(&mut p, &[1.0]);
        assert!((p[0] - before).abs() < first);
        assert!(s.accumulator[0] >= 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = RmspropConfig {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(RmspropState::new(bad, 1).is_err());
        let bad = RmspropConfig {
            decay: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
