//! Mini-batch training with RMSprop and per-epoch validation metrics.

mod model;
mod rmsprop;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use model::{ForwardCache, Model, ModelKind, ModelSpec, DEFAULT_HIDDEN_UNITS};
pub use rmsprop::{
    RmspropConfig, RmspropState, DEFAULT_DECAY, DEFAULT_EPSILON, DEFAULT_LEARNING_RATE,
};

use crate::error::{Error, Result};
use crate::losses::{build_loss, LossKind, LossParams, MultiLabelLoss};
use crate::metrics::{confusion, precision_recall_f1, predict, Averaging};
use crate::rng::Rng;
use crate::types::{Dataset, LabelVector};

pub const DEFAULT_EPOCHS: usize = 80;
pub const DEFAULT_BATCH_SIZE: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: LossKind,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub optimizer: RmspropConfig,
    pub eval_every: usize,
    pub shuffle: bool,
    /// When false, `EpochRecord::seconds` is written as 0 so logs are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl TrainConfig {
    pub fn new(loss: LossKind) -> Self {
        Self {
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH_SIZE,
            seed: 42,
            loss,
            gamma: None,
            alpha: None,
            optimizer: RmspropConfig::default(),
            eval_every: 1,
            shuffle: true,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::InvalidConfig("eval_every must be >= 1".into()));
        }
        self.optimizer.validate()
    }

    /// Loss parameters, with W-CEL weights taken from `train`.
    pub fn loss_params(&self, train: &Dataset) -> Result<LossParams> {
        let params = LossParams {
            gamma: self.gamma,
            alpha: self.alpha,
            weights: None,
        };
        if self.loss == LossKind::Wcel {
            params.with_weights_from(train)
        } else {
            Ok(params)
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss_name: String,
    pub train_loss: f64,
    pub p_micro: f64,
    pub r_micro: f64,
    pub f1_micro: f64,
    pub p_macro: f64,
    pub r_macro: f64,
    pub f1_macro: f64,
    pub per_class_f1: Vec<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub records: Vec<EpochRecord>,
    pub model: Model,
    /// Sample indices of the first mini-batch of epoch 1.
    pub first_batch: Vec<usize>,
}

/// Validation scores of `model` under `loss`'s prediction rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub micro: crate::metrics::Scores,
    pub macro_: crate::metrics::Scores,
    pub per_class_f1: Vec<f64>,
}

pub fn evaluate(model: &Model, loss: &dyn MultiLabelLoss, data: &Dataset) -> Result<Evaluation> {
    let rule = loss.prediction_rule();
    let preds: Vec<LabelVector> = (0..data.sample_count())
        .map(|i| predict(&model.forward_cached(data.features(i)).0, rule))
        .collect();
    let counts = if data.is_empty() {
        crate::metrics::ConfusionCounts {
            per_class: vec![Default::default(); data.class_count()],
        }
    } else {
        confusion(&preds, data.all_labels())?
    };
    Ok(Evaluation {
        micro: precision_recall_f1(&counts, Averaging::Micro),
        macro_: precision_recall_f1(&counts, Averaging::Macro),
        per_class_f1: counts.per_class_f1(),
    })
}

/// Mean loss of `model` over `data`.
pub fn dataset_loss(model: &Model, loss: &dyn MultiLabelLoss, data: &Dataset) -> f64 {
    let total: f64 = (0..data.sample_count())
        .map(|i| loss.value(&model.forward_cached(data.features(i)).0, data.labels(i)))
        .sum();
    total / data.sample_count().max(1) as f64
}

pub fn train(
    spec: &ModelSpec,
    cfg: &TrainConfig,
    train_set: &Dataset,
    validation: &Dataset,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let loss = build_loss(cfg.loss, &cfg.loss_params(train_set)?)?;
    train_with_loss(spec, cfg, loss.as_ref(), train_set, validation)
}

/// Trains with an already constructed loss; `cfg.loss` is only used for
/// labelling the log.
pub fn train_with_loss(
    spec: &ModelSpec,
    cfg: &TrainConfig,
    loss: &dyn MultiLabelLoss,
    train_set: &Dataset,
    validation: &Dataset,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if spec.input_dim != train_set.dim() || spec.output_dim != train_set.class_count() {
        return Err(Error::InvalidConfig(format!(
            "model maps {} -> {} but the data has {} features and {} classes",
            spec.input_dim,
            spec.output_dim,
            train_set.dim(),
            train_set.class_count()
        )));
    }
    if validation.dim() != train_set.dim() || validation.class_count() != train_set.class_count() {
        return Err(Error::InvalidConfig(
            "train and validation splits have different shapes".into(),
        ));
    }
    loss.check_classes(train_set.class_count())?;

    let root = Rng::new(cfg.seed);
    let mut init_rng = root.split("init");
    let mut shuffle_rng = root.split("shuffle");
    let mut model = Model::init(spec.clone(), &mut init_rng)?;
    let mut optimizer = RmspropState::new(cfg.optimizer, model.params.len())?;

    let m = train_set.sample_count();
    let mut order: Vec<usize> = (0..m).collect();
    let mut grad = vec![0.0; model.params.len()];
    let mut records = Vec::with_capacity(cfg.epochs / cfg.eval_every + 1);
    let mut first_batch = Vec::new();

    for epoch in 1..=cfg.epochs {
        let started = Instant::now();
        if cfg.shuffle {
            shuffle_rng.shuffle(&mut order);
        }
        if epoch == 1 {
            first_batch = order[..cfg.batch_size.min(m)].to_vec();
        }

        let mut epoch_total = 0.0;
        for (batch_idx, batch) in order.chunks(cfg.batch_size).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let x = train_set.features(i);
                let (z, cache) = model.forward_cached(x);
                let out = loss.value_and_grad(&z, train_set.labels(i));
                if !out.value.is_finite() || out.grad.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFiniteLoss {
                        epoch,
                        batch: batch_idx,
                    });
                }
                epoch_total += out.value;
                let dz: Vec<f64> = out.grad.iter().map(|g| g * scale).collect();
                model.accumulate_backward(x, &cache, &dz, &mut grad);
            }
            optimizer.step(&mut model.params, &grad);
        }

        if epoch % cfg.eval_every == 0 || epoch == cfg.epochs {
            let eval = evaluate(&model, loss, validation)?;
            let seconds = if cfg.record_timing {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            };
            records.push(EpochRecord {
                epoch,
                loss_name: cfg.loss.as_str().to_string(),
                train_loss: epoch_total / m as f64,
                p_micro: eval.micro.precision,
                r_micro: eval.micro.recall,
                f1_micro: eval.micro.f1,
                p_macro: eval.macro_.precision,
                r_macro: eval.macro_.recall,
                f1_macro: eval.macro_.f1,
                per_class_f1: eval.per_class_f1,
                seconds,
            });
        }
    }

    Ok(TrainOutcome {
        records,
        model,
        first_batch,
    })
}
