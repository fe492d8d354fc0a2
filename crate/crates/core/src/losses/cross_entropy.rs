//! Cross-entropy family: plain (CEL), focal (FL) and class-weighted (W-CEL).
//!
//! All three are evaluated in logit form. For class `c` with signed label
//! `s = 2y − 1` the log-probability of the reference outcome is
//! `log p = −softplus(−s·z)`, clamped so that `p ≥ 1e−12`.

use crate::activations::{sigmoid_scalar, softplus};
use crate::error::{Error, Result};
use crate::losses::{Activation, LossKind, MultiLabelLoss};
use crate::types::{class_frequencies, Dataset, LabelVector};

/// `−ln(1e−12)`: the largest per-class negative log-probability.
pub const MAX_NEG_LOG_PROB: f64 = 27.631_021_115_928_547;

fn sign(y: u8) -> f64 {
    if y == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Clamped `−log p` at margin `u = s·z` and its derivative in `u`.
fn neg_log_prob(u: f64) -> (f64, f64) {
    let nll = softplus(-u);
    if nll < MAX_NEG_LOG_PROB {
        (nll, -sigmoid_scalar(-u))
    } else {
        (MAX_NEG_LOG_PROB, 0.0)
    }
}

fn clamp_distance(z: &[f64], y: &LabelVector) -> f64 {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| (softplus(-sign(yc) * zc) - MAX_NEG_LOG_PROB).abs())
        .fold(f64::INFINITY, f64::min)
}

pub fn cel_value(z: &[f64], y: &LabelVector) -> f64 {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| neg_log_prob(sign(yc) * zc).0)
        .sum()
}

pub fn cel_gradient(z: &[f64], y: &LabelVector) -> Vec<f64> {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| {
            let s = sign(yc);
            s * neg_log_prob(s * zc).1
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalConfig {
    gamma: f64,
}

impl FocalConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "focal gamma must be finite and >= 0, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `Σ_c (1 − p_c)^γ · (−log p_c)`.
pub fn fl_value(z: &[f64], y: &LabelVector, cfg: &FocalConfig) -> f64 {
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| {
            let u = sign(yc) * zc;
            let miss = sigmoid_scalar(-u);
            miss.powf(cfg.gamma) * neg_log_prob(u).0
        })
        .sum()
}

pub fn fl_gradient(z: &[f64], y: &LabelVector, cfg: &FocalConfig) -> Vec<f64> {
    let g = cfg.gamma;
    z.iter()
        .zip(y.iter())
        .map(|(&zc, &yc)| {
            let s = sign(yc);
            let u = s * zc;
            let (nll, dnll) = neg_log_prob(u);
            let miss = sigmoid_scalar(-u);
            let modulator = miss.powf(g);
            // d/du (1 − p)^γ = −γ·p·(1 − p)^γ
            let dmod = -g * sigmoid_scalar(u) * modulator;
            s * (dmod * nll + modulator * dnll)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "class weights must be finite and > 0, got {bad}"
            )));
        }
        Ok(Self(weights))
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w_c = M / (C · max(n_c, 1))`: inverse frequency, normalised so that a
    /// balanced label distribution gives unit weights.
    pub fn from_counts(counts: &[usize], sample_count: usize) -> Result<Self> {
        if sample_count == 0 || counts.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let scale = sample_count as f64 / counts.len() as f64;
        Self::new(counts.iter().map(|&n| scale / n.max(1) as f64).collect())
    }
}

/// Inverse-frequency weights from the positive counts of `d`.
pub fn wcel_weights(d: &Dataset) -> Result<WeightVector> {
    WeightVector::from_counts(&class_frequencies(d)?.counts, d.sample_count())
}

fn check_weight_len(z: &[f64], w: &WeightVector) -> Result<()> {
    if w.len() != z.len() {
        return Err(Error::LengthMismatch {
            expected: z.len(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// `Σ_c w_c · (−log p_c)`.
pub fn wcel_value(z: &[f64], y: &LabelVector, w: &WeightVector) -> Result<f64> {
    check_weight_len(z, w)?;
    Ok(weighted_value(z, y, w))
}

pub fn wcel_gradient(z: &[f64], y: &LabelVector, w: &WeightVector) -> Result<Vec<f64>> {
    check_weight_len(z, w)?;
    Ok(weighted_gradient(z, y, w))
}

fn weighted_value(z: &[f64], y: &LabelVector, w: &WeightVector) -> f64 {
    z.iter()
        .zip(y.iter())
        .zip(&w.0)
        .map(|((&zc, &yc), &wc)| wc * neg_log_prob(sign(yc) * zc).0)
        .sum()
}

fn weighted_gradient(z: &[f64], y: &LabelVector, w: &WeightVector) -> Vec<f64> {
    z.iter()
        .zip(y.iter())
        .zip(&w.0)
        .map(|((&zc, &yc), &wc)| {
            let s = sign(yc);
            wc * s * neg_log_prob(s * zc).1
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CrossEntropy;

impl MultiLabelLoss for CrossEntropy {
    fn kind(&self) -> LossKind {
        LossKind::Cel
    }

    fn activation(&self) -> Activation {
        Activation::Sigmoid
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        cel_value(z, y)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        cel_gradient(z, y)
    }

    fn kink_distance(&self, z: &[f64], y: &LabelVector) -> f64 {
        clamp_distance(z, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FocalLoss {
    pub config: FocalConfig,
}

impl FocalLoss {
    pub fn new(config: FocalConfig) -> Self {
        Self { config }
    }
}

impl MultiLabelLoss for FocalLoss {
    fn kind(&self) -> LossKind {
        LossKind::Fl
    }

    fn activation(&self) -> Activation {
        Activation::Sigmoid
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        fl_value(z, y, &self.config)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        fl_gradient(z, y, &self.config)
    }

    fn kink_distance(&self, z: &[f64], y: &LabelVector) -> f64 {
        clamp_distance(z, y)
    }
}

#[derive(Debug, Clone)]
pub struct WeightedCrossEntropy {
    pub weights: WeightVector,
}

impl WeightedCrossEntropy {
    pub fn new(weights: WeightVector) -> Self {
        Self { weights }
    }
}

impl MultiLabelLoss for WeightedCrossEntropy {
    fn kind(&self) -> LossKind {
        LossKind::Wcel
    }

    fn activation(&self) -> Activation {
        Activation::Sigmoid
    }

    fn value(&self, z: &[f64], y: &LabelVector) -> f64 {
        debug_assert_eq!(z.len(), self.weights.len());
        weighted_value(z, y, &self.weights)
    }

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.weights.len());
        weighted_gradient(z, y, &self.weights)
    }

    fn kink_distance(&self, z: &[f64], y: &LabelVector) -> f64 {
        clamp_distance(z, y)
    }

    fn check_classes(&self, class_count: usize) -> Result<()> {
        if class_count != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: class_count,
                actual: self.weights.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn y(bits: &[u8]) -> LabelVector {
        LabelVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn cel_examples() {
        assert!(cel_value(&[1000.0, -1000.0], &y(&[1, 0])) < 1e-9);
        assert!((cel_value(&[0.0], &y(&[1])) - LN2).abs() < 1e-15);
        assert!((cel_value(&[0.0, 0.0], &y(&[1, 0])) - 2.0 * LN2).abs() < 1e-15);
    }

    #[test]
    fn cel_clamps_log_probability() {
        let v = cel_value(&[-1000.0], &y(&[1]));
        assert_eq!(v, MAX_NEG_LOG_PROB);
        assert_eq!(cel_gradient(&[-1000.0], &y(&[1])), vec![0.0]);
        assert!((MAX_NEG_LOG_PROB + 1e-12f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn focal_examples() {
        let cfg = FocalConfig::new(2.0).unwrap();
        assert!((fl_value(&[0.0], &y(&[1]), &cfg) - 0.25 * LN2).abs() < 1e-15);
        assert!(fl_value(&[1000.0], &y(&[1]), &cfg) < 1e-9);
        assert!(FocalConfig::new(-0.1).is_err());
        assert!(FocalConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn focal_gamma_zero_is_cel() {
        let cfg = FocalConfig::new(0.0).unwrap();
        let z = [0.3, -2.0, 5.5, -0.01];
        let labels = y(&[1, 0, 0, 1]);
        assert_eq!(fl_value(&z, &labels, &cfg), cel_value(&z, &labels));
        assert_eq!(fl_gradient(&z, &labels, &cfg), cel_gradient(&z, &labels));
    }

    #[test]
    fn weighted_examples() {
        let w = WeightVector::new(vec![2.0, 1.0]).unwrap();
        let v = wcel_value(&[0.0, 0.0], &y(&[1, 0]), &w).unwrap();
        assert!((v - 3.0 * LN2).abs() < 1e-15);

        let ones = WeightVector::ones(3);
        let z = [0.7, -1.2, 3.0];
        let labels = y(&[0, 1, 1]);
        assert_eq!(
            wcel_value(&z, &labels, &ones).unwrap(),
            cel_value(&z, &labels)
        );

        assert!(wcel_value(&z, &labels, &w).is_err());
        assert!(wcel_gradient(&z, &labels, &w).is_err());
    }

    #[test]
    fn weights_from_counts() {
        let w = WeightVector::from_counts(&[2, 8], 10).unwrap();
        assert_eq!(w.as_slice(), &[2.5, 0.625]);
        let w = WeightVector::from_counts(&[5, 5, 5], 15).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 1.0, 1.0]);
        let w = WeightVector::from_counts(&[0, 4], 4).unwrap();
        assert_eq!(w.as_slice(), &[2.0, 0.5]);
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn weights_from_dataset() {
        let labels = vec![y(&[1, 0]), y(&[1, 1]), y(&[1, 0]), y(&[1, 0])];
        let d = Dataset::new(vec![0.0; 4], labels, 1, 2).unwrap();
        assert_eq!(wcel_weights(&d).unwrap().as_slice(), &[0.5, 2.0]);
    }
}
