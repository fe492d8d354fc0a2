//! Multi-label loss functions over per-sample logits.
//!
//! Every loss takes one sample's logits `z` and binary labels `y` and returns
//! a nonnegative scalar together with its gradient with respect to `z`.
//! Batches are reduced by the arithmetic mean over samples.

mod cross_entropy;
mod hamming;
mod huber;
mod ranking;
mod sparsemax;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::PredictionRule;
use crate::types::{Dataset, LabelVector};

pub use cross_entropy::{
    cel_gradient, cel_value, fl_gradient, fl_value, wcel_gradient, wcel_value, wcel_weights,
    CrossEntropy, FocalConfig, FocalLoss, WeightVector, WeightedCrossEntropy, MAX_NEG_LOG_PROB,
};
pub use hamming::{hal_soft_gradient, hal_soft_value, hal_value, SoftHamming};
pub use huber::{hl_gradient, hl_value, ModifiedHuber};
pub use ranking::{rl_gradient, rl_value, RankingConfig, RankingLoss};
pub use sparsemax::{sml_gradient, sml_value, SparsemaxLoss};

/// Which activation a loss reads its logits through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    RawLogit,
    Sparsemax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossValueAndGrad {
    pub value: f64,
    pub grad: Vec<f64>,
}

pub trait MultiLabelLoss: fmt::Debug + Send + Sync {
    fn kind(&self) -> LossKind;

    fn activation(&self) -> Activation;

    fn value(&self, z: &[f64], y: &LabelVector) -> f64;

    fn gradient(&self, z: &[f64], y: &LabelVector) -> Vec<f64>;

    fn value_and_grad(&self, z: &[f64], y: &LabelVector) -> LossValueAndGrad {
        LossValueAndGrad {
            value: self.value(z, y),
            grad: self.gradient(z, y),
        }
    }

    /// Distance from `z` to the nearest point where the loss is not twice
    /// differentiable along a coordinate (hinge corners, branch switches,
    /// support changes). Infinite for smooth losses.
    fn kink_distance(&self, _z: &[f64], _y: &LabelVector) -> f64 {
        f64::INFINITY
    }

    /// Rejects a class count the loss was not configured for.
    fn check_classes(&self, _class_count: usize) -> Result<()> {
        Ok(())
    }

    fn prediction_rule(&self) -> PredictionRule {
        match self.activation() {
            Activation::Sigmoid => PredictionRule::DEFAULT_SIGMOID,
            Activation::RawLogit => PredictionRule::LogitSign,
            Activation::Sparsemax => PredictionRule::SparsemaxSupport,
        }
    }

    fn name(&self) -> &'static str {
        self.kind().as_str()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Cel,
    Fl,
    Wcel,
    Hal,
    Hl,
    Rl,
    Sml,
}

impl LossKind {
    pub const ALL: [LossKind; 7] = [
        LossKind::Cel,
        LossKind::Fl,
        LossKind::Wcel,
        LossKind::Hal,
        LossKind::Hl,
        LossKind::Rl,
        LossKind::Sml,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Cel => "cel",
            LossKind::Fl => "fl",
            LossKind::Wcel => "wcel",
            LossKind::Hal => "hal",
            LossKind::Hl => "hl",
            LossKind::Rl => "rl",
            LossKind::Sml => "sml",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownLoss(s.to_string()))
    }
}

pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Optional per-loss parameters. Absent values fall back to the defaults,
/// except W-CEL weights, which must be supplied.
#[derive(Debug, Clone, Default)]
pub struct LossParams {
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub weights: Option<WeightVector>,
}

impl LossParams {
    /// Fills in W-CEL weights computed from `train`.
    pub fn with_weights_from(mut self, train: &Dataset) -> Result<Self> {
        self.weights = Some(wcel_weights(train)?);
        Ok(self)
    }
}

pub type BoxedLoss = Box<dyn MultiLabelLoss>;

pub fn loss_by_name(name: &str, params: &LossParams) -> Result<BoxedLoss> {
    build_loss(name.parse()?, params)
}

pub fn build_loss(kind: LossKind, params: &LossParams) -> Result<BoxedLoss> {
    Ok(match kind {
        LossKind::Cel => Box::new(CrossEntropy),
        LossKind::Fl => Box::new(FocalLoss::new(FocalConfig::new(
            params.gamma.unwrap_or(DEFAULT_GAMMA),
        )?)),
        LossKind::Wcel => {
            let w = params.weights.clone().ok_or(Error::MissingParam {
                loss: "wcel",
                param: "weights",
            })?;
            Box::new(WeightedCrossEntropy::new(w))
        }
        LossKind::Hal => Box::new(SoftHamming),
        LossKind::Hl => Box::new(ModifiedHuber),
        LossKind::Rl => Box::new(RankingLoss::new(RankingConfig::new(
            params.alpha.unwrap_or(DEFAULT_ALPHA),
        )?)),
        LossKind::Sml => Box::new(SparsemaxLoss),
    })
}

/// Mean loss and mean gradient over a batch of samples.
pub fn batch_value_and_grad(
    loss: &dyn MultiLabelLoss,
    logits: &[Vec<f64>],
    labels: &[&LabelVector],
) -> (f64, Vec<Vec<f64>>) {
    let n = logits.len() as f64;
    let mut total = 0.0;
    let grads = logits
        .iter()
        .zip(labels)
        .map(|(z, y)| {
            let LossValueAndGrad { value, mut grad } = loss.value_and_grad(z, y);
            total += value;
            grad.iter_mut().for_each(|g| *g /= n);
            grad
        })
        .collect();
    (total / n, grads)
}
