//! Orchestration behind the command-line subcommands.

pub mod compare;
pub mod convexity;
pub mod gradcheck;
pub mod output;
mod sampling;

pub use compare::{
    prevalence_deciles, run_compare, ComparisonReport, DecileF1, FinalMetrics, LossRow, LossRun,
    RunStatus, DEFAULT_TARGET_F1,
};
pub use convexity::{cmd_convexity, ConvexityProbeResult, Verdict, CONVEXITY_SLACK};
pub use gradcheck::{cmd_gradcheck, GradCheckConfig, GradCheckReport};
pub use output::{write_compare_outputs, OutputFormat};

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::{load_csv, split, Splits};
use crate::error::{Error, Result};
use crate::fsio::write_atomic;
use crate::trainer::{train, Model, ModelSpec, TrainConfig, TrainOutcome};

/// Loads a CSV dataset and splits it into train/validation/test.
pub fn load_splits(path: &Path, train_frac: f64, val_frac: f64, seed: u64) -> Result<Splits> {
    let d = load_csv(path)?;
    split(&d, train_frac, val_frac, seed)
}

#[derive(Debug, Serialize)]
struct SavedModel<'a> {
    loss: &'a str,
    model: &'a Model,
}

#[derive(Debug)]
pub struct TrainArtifacts {
    pub outcome: TrainOutcome,
    pub log: PathBuf,
    pub model: PathBuf,
}

/// Trains one loss and writes its epoch log and final model into `out_dir`.
pub fn cmd_train(
    splits: &Splits,
    model: &ModelSpec,
    cfg: &TrainConfig,
    out_dir: &Path,
    log_format: OutputFormat,
) -> Result<TrainArtifacts> {
    let outcome = train(model, cfg, &splits.train, &splits.validation)?;
    let name = cfg.loss.as_str();
    let (log, body) = match log_format {
        OutputFormat::Csv => (
            out_dir.join(format!("{name}.csv")),
            output::epochs_csv(&outcome.records),
        ),
        OutputFormat::Jsonl => (
            out_dir.join(format!("{name}.jsonl")),
            output::epochs_jsonl(&outcome.records),
        ),
        OutputFormat::Svg => {
            return Err(Error::InvalidConfig(
                "train logs are written as csv or jsonl".into(),
            ))
        }
    };
    write_atomic(&log, body.as_bytes())?;
    let model_path = out_dir.join(format!("{name}.model.json"));
    let json = serde_json::to_vec_pretty(&SavedModel {
        loss: name,
        model: &outcome.model,
    })
    .map_err(|e| Error::Json {
        path: model_path.clone(),
        source: e,
    })?;
    write_atomic(&model_path, &json)?;
    Ok(TrainArtifacts {
        outcome,
        log,
        model: model_path,
    })
}
