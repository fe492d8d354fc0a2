//! Multi-loss comparison runs under one shared training protocol.

use serde::Serialize;

use crate::data::Splits;
use crate::losses::LossKind;
use crate::trainer::{train, EpochRecord, ModelSpec, TrainConfig, TrainOutcome};
use crate::types::class_frequencies;
use crate::Result;

pub const DEFAULT_TARGET_F1: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalMetrics {
    pub p_micro: f64,
    pub r_micro: f64,
    pub f1_micro: f64,
    pub p_macro: f64,
    pub r_macro: f64,
    pub f1_macro: f64,
}

/// Mean final F1 of the classes falling in one training-prevalence decile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecileF1 {
    /// 0 holds the rarest classes.
    pub decile: usize,
    pub classes: Vec<usize>,
    pub mean_prevalence: f64,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRun {
    pub metrics: FinalMetrics,
    pub records: Vec<EpochRecord>,
    pub deciles: Vec<DecileF1>,
    pub lowest_decile_f1: f64,
    /// First epoch with validation micro-F1 at or above the target.
    pub epochs_to_target: Option<usize>,
    pub first_batch: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunStatus {
    Ok(Box<LossRun>),
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRow {
    pub loss: LossKind,
    #[serde(flatten)]
    pub status: RunStatus,
}

impl LossRow {
    pub fn run(&self) -> Option<&LossRun> {
        match &self.status {
            RunStatus::Ok(run) => Some(run),
            RunStatus::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub epochs: usize,
    pub target_f1: f64,
    pub class_prevalence: Vec<f64>,
    pub rows: Vec<LossRow>,
}

impl ComparisonReport {
    /// True when every successful run saw the same first mini-batch.
    pub fn shared_batches(&self) -> bool {
        let mut batches = self
            .rows
            .iter()
            .filter_map(|r| r.run())
            .map(|r| &r.first_batch);
        match batches.next() {
            Some(first) => batches.all(|b| b == first),
            None => true,
        }
    }
}

/// Groups classes into prevalence deciles by ascending rank.
pub fn prevalence_deciles(prevalence: &[f64], per_class_f1: &[f64]) -> Vec<DecileF1> {
    let c = prevalence.len();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| prevalence[a].total_cmp(&prevalence[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 10];
    for (rank, &class) in order.iter().enumerate() {
        groups[rank * 10 / c].push(class);
    }
    groups
        .into_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(decile, classes)| {
            let n = classes.len() as f64;
            DecileF1 {
                decile,
                mean_prevalence: classes.iter().map(|&k| prevalence[k]).sum::<f64>() / n,
                mean_f1: classes.iter().map(|&k| per_class_f1[k]).sum::<f64>() / n,
                classes,
            }
        })
        .collect()
}

fn summarise(outcome: TrainOutcome, prevalence: &[f64], target_f1: f64) -> LossRun {
    let last = outcome
        .records
        .last()
        .expect("training always records the final epoch");
    let metrics = FinalMetrics {
        p_micro: last.p_micro,
        r_micro: last.r_micro,
        f1_micro: last.f1_micro,
        p_macro: last.p_macro,
        r_macro: last.r_macro,
        f1_macro: last.f1_macro,
    };
    let deciles = prevalence_deciles(prevalence, &last.per_class_f1);
    let lowest_decile_f1 = deciles.first().map_or(0.0, |d| d.mean_f1);
    let epochs_to_target = outcome
        .records
        .iter()
        .find(|r| r.f1_micro >= target_f1)
        .map(|r| r.epoch);
    LossRun {
        metrics,
        deciles,
        lowest_decile_f1,
        epochs_to_target,
        first_batch: outcome.first_batch,
        records: outcome.records,
    }
}

/// Trains one model per loss with identical splits, seed, model and
/// optimiser settings. Losses run on separate threads; a failing loss yields
/// a failed row and does not abort the others.
pub fn run_compare(
    splits: &Splits,
    losses: &[LossKind],
    model: &ModelSpec,
    base: &TrainConfig,
    target_f1: f64,
) -> Result<ComparisonReport> {
    base.validate()?;
    let prevalence = class_frequencies(&splits.train)?.relative;
    let mut cfg = base.clone();
    cfg.eval_every = 1;

    let outcomes: Vec<Result<TrainOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = losses
            .iter()
            .map(|&kind| {
                let cfg = TrainConfig {
                    loss: kind,
                    ..cfg.clone()
                };
                scope.spawn(move || train(model, &cfg, &splits.train, &splits.validation))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training thread panicked"))
            .collect()
    });

    let rows = losses
        .iter()
        .zip(outcomes)
        .map(|(&loss, outcome)| LossRow {
            loss,
            status: match outcome {
                Ok(o) => RunStatus::Ok(Box::new(summarise(o, &prevalence, target_f1))),
                Err(e) => RunStatus::Failed {
                    error: e.to_string(),
                },
            },
        })
        .collect();

    Ok(ComparisonReport {
        epochs: cfg.epochs,
        target_f1,
        class_prevalence: prevalence,
        rows,
    })
}
