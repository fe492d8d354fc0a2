//! Command-line front end: data generation, gradient and convexity checks,
//! single-loss training and multi-loss comparison.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mlc_loss::data::{
    generate, load_csv, read_sidecar, save_csv, split, DatasetMeta, GeneratorSpec, Splits,
};
use mlc_loss::harness::convexity::Verdict;
use mlc_loss::harness::gradcheck::{GradCheckConfig, DEFAULT_TOLERANCE};
use mlc_loss::harness::{
    cmd_convexity, cmd_gradcheck, cmd_train, run_compare, write_compare_outputs, OutputFormat,
    DEFAULT_TARGET_F1,
};
use mlc_loss::losses::{LossKind, LossParams};
use mlc_loss::trainer::{
    ModelSpec, RmspropConfig, TrainConfig, DEFAULT_BATCH_SIZE, DEFAULT_DECAY, DEFAULT_EPOCHS,
    DEFAULT_EPSILON, DEFAULT_HIDDEN_UNITS, DEFAULT_LEARNING_RATE,
};
use mlc_loss::{class_frequencies, Dataset, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "mlc-loss",
    version,
    about = "Multi-label loss functions: checks, training and comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic imbalanced multi-label dataset (CSV + JSON sidecar).
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Split a dataset into train, validation and test CSV files.
    Split {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        fractions: SplitArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare analytic loss gradients against central finite differences.
    Gradcheck {
        #[arg(long, value_delimiter = ',', value_parser = parse_loss)]
        loss: Vec<LossKind>,
        #[command(flatten)]
        params: LossArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Probe midpoint convexity of each loss in logit space.
    Convexity {
        #[arg(long, value_delimiter = ',', value_parser = parse_loss)]
        loss: Vec<LossKind>,
        #[command(flatten)]
        params: LossArgs,
        #[arg(long, default_value_t = 1000)]
        segments: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train one loss and write its epoch log and final model.
    Train {
        #[arg(long, value_parser = parse_loss)]
        loss: LossKind,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Log format: csv or jsonl.
        #[arg(long, default_value = "jsonl", value_parser = parse_format)]
        format: OutputFormat,
    },
    /// Train several losses under identical conditions and report side by side.
    Compare {
        #[arg(long, value_delimiter = ',', value_parser = parse_loss)]
        loss: Vec<LossKind>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Validation micro-F1 used for the epochs-to-target column.
        #[arg(long, default_value_t = DEFAULT_TARGET_F1)]
        target_f1: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Comma-separated list of csv, jsonl, svg.
        #[arg(long, value_delimiter = ',', default_value = "csv,jsonl,svg", value_parser = parse_format)]
        format: Vec<OutputFormat>,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 8)]
    classes: usize,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long, default_value_t = 2500)]
    samples: usize,
    #[arg(long, default_value_t = 1.5)]
    imbalance_exponent: f64,
    #[arg(long, default_value_t = 0.5)]
    max_prevalence: f64,
    #[arg(long, default_value_t = 0.0)]
    label_noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl GenArgs {
    fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            class_count: self.classes,
            feature_dim: self.dim,
            sample_count: self.samples,
            imbalance_exponent: self.imbalance_exponent,
            max_prevalence: self.max_prevalence,
            label_noise: self.label_noise,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, default_value_t = 0.2)]
    val_frac: f64,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Dataset CSV; a synthetic dataset is generated when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    fractions: SplitArgs,
}

impl DataArgs {
    fn splits(&self) -> Result<Splits> {
        let dataset = match &self.data {
            Some(path) => load_csv(path)?,
            None => generate(&self.gen.spec())?.dataset,
        };
        split(
            &dataset,
            self.fractions.train_frac,
            self.fractions.val_frac,
            self.gen.seed,
        )
    }
}

#[derive(Debug, Args)]
struct LossArgs {
    /// Focal-loss focusing parameter.
    #[arg(long)]
    gamma: Option<f64>,
    /// Ranking-loss margin.
    #[arg(long)]
    alpha: Option<f64>,
}

impl LossArgs {
    fn params(&self) -> LossParams {
        LossParams {
            gamma: self.gamma,
            alpha: self.alpha,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Linear,
    Mlp,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    params: LossArgs,
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    lr: f64,
    /// RMSprop decay of the squared-gradient average.
    #[arg(long, default_value_t = DEFAULT_DECAY)]
    decay: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    batch_size: usize,
    #[arg(long, value_enum, default_value = "linear")]
    model: ModelArg,
    #[arg(long, default_value_t = DEFAULT_HIDDEN_UNITS)]
    hidden: usize,
    /// Evaluate on the validation split every N epochs.
    #[arg(long, default_value_t = 1)]
    eval_every: usize,
    #[arg(long)]
    no_shuffle: bool,
    /// Write zero wall-clock seconds so logs are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

impl TrainArgs {
    fn config(&self, loss: LossKind, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            loss,
            gamma: self.params.gamma,
            alpha: self.params.alpha,
            optimizer: RmspropConfig {
                learning_rate: self.lr,
                decay: self.decay,
                epsilon: self.epsilon,
            },
            eval_every: self.eval_every,
            shuffle: !self.no_shuffle,
            record_timing: !self.no_timing,
        }
    }

    fn model(&self, train: &Dataset) -> ModelSpec {
        match self.model {
            ModelArg::Linear => ModelSpec::linear(train.dim(), train.class_count()),
            ModelArg::Mlp => ModelSpec::mlp(train.dim(), self.hidden, train.class_count()),
        }
    }
}

fn parse_loss(s: &str) -> Result<LossKind> {
    s.parse()
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    s.parse()
}

fn losses_or_all(losses: Vec<LossKind>) -> Vec<LossKind> {
    if losses.is_empty() {
        LossKind::ALL.to_vec()
    } else {
        losses
    }
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn write_split(d: &Dataset, path: &Path, source: Option<&DatasetMeta>, seed: u64) -> Result<()> {
    let target_prevalences = match source {
        Some(meta) => meta.target_prevalences.clone(),
        None if d.is_empty() => vec![0.0; d.class_count()],
        None => class_frequencies(d)?.relative,
    };
    let meta = DatasetMeta {
        schema_version: mlc_loss::data::SCHEMA_VERSION,
        seed: source.map_or(seed, |m| m.seed),
        class_count: d.class_count(),
        dim: d.dim(),
        sample_count: d.sample_count(),
        target_prevalences,
    };
    save_csv(d, path, &meta)?;
    println!("wrote {} ({} samples)", path.display(), d.sample_count());
    Ok(())
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Gen { gen, out_dir } => {
            let spec = gen.spec();
            let data = generate(&spec)?;
            let path = out_dir.join("dataset.csv");
            save_csv(&data.dataset, &path, &spec.meta())?;
            let freq = class_frequencies(&data.dataset)?;
            println!(
                "wrote {} ({} samples)",
                path.display(),
                data.dataset.sample_count()
            );
            for (c, (target, observed)) in data.prevalences.iter().zip(&freq.relative).enumerate() {
                println!("class {c}: target prevalence {target:.4}, observed {observed:.4}");
            }
            Ok(Status::Ok)
        }
        Command::Split {
            data,
            fractions,
            seed,
            out_dir,
        } => {
            let dataset = load_csv(&data)?;
            let source = read_sidecar(&data)?;
            let splits = split(&dataset, fractions.train_frac, fractions.val_frac, seed)?;
            for (name, d) in [
                ("train", &splits.train),
                ("validation", &splits.validation),
                ("test", &splits.test),
            ] {
                write_split(
                    d,
                    &out_dir.join(format!("{name}.csv")),
                    source.as_ref(),
                    seed,
                )?;
            }
            Ok(Status::Ok)
        }
        Command::Gradcheck {
            loss,
            params,
            trials,
            tolerance,
            seed,
        } => {
            let cfg = GradCheckConfig {
                trials,
                tolerance,
                seed,
                ..Default::default()
            };
            let reports = cmd_gradcheck(&losses_or_all(loss), &params.params(), &cfg)?;
            let mut ok = true;
            for r in &reports {
                ok &= r.passed();
                println!(
                    "{:<5} {:<18} {} trials={} failures={} max_rel_error={:.3e}{}",
                    r.loss.as_str(),
                    r.label,
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.trials,
                    r.failures,
                    r.max_rel_error,
                    r.note
                        .as_deref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default()
                );
            }
            Ok(if ok { Status::Ok } else { Status::CheckFailed })
        }
        Command::Convexity {
            loss,
            params,
            segments,
            seed,
        } => {
            let results = cmd_convexity(&losses_or_all(loss), &params.params(), segments, seed)?;
            let mut ok = true;
            for r in &results {
                ok &= r.verdict != Verdict::Violated;
                let verdict = match r.verdict {
                    Verdict::Convex => "convex",
                    Verdict::Violated => "VIOLATED",
                    Verdict::Reported => "reported",
                    Verdict::Untested => "untested",
                };
                println!(
                    "{:<5} segments={} max_violation={:.3e} {verdict}{}",
                    r.loss.as_str(),
                    r.segments,
                    r.max_violation,
                    r.note
                        .as_deref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default()
                );
            }
            Ok(if ok { Status::Ok } else { Status::CheckFailed })
        }
        Command::Train {
            loss,
            data,
            train,
            out_dir,
            format,
        } => {
            let splits = data.splits()?;
            let model = train.model(&splits.train);
            let cfg = train.config(loss, data.gen.seed);
            let artifacts = cmd_train(&splits, &model, &cfg, &out_dir, format)?;
            if let Some(last) = artifacts.outcome.records.last() {
                println!(
                    "{} epoch {}: train loss {:.6}, micro P/R/F1 {:.4}/{:.4}/{:.4}, macro F1 {:.4}",
                    loss,
                    last.epoch,
                    last.train_loss,
                    last.p_micro,
                    last.r_micro,
                    last.f1_micro,
                    last.f1_macro
                );
            }
            println!("wrote {}", artifacts.log.display());
            println!("wrote {}", artifacts.model.display());
            Ok(Status::Ok)
        }
        Command::Compare {
            loss,
            data,
            train,
            target_f1,
            out_dir,
            format,
        } => {
            if !(0.0..=1.0).contains(&target_f1) {
                return Err(Error::InvalidConfig(format!(
                    "target F1 {target_f1} outside [0, 1]"
                )));
            }
            let splits = data.splits()?;
            let model = train.model(&splits.train);
            let base = train.config(LossKind::Cel, data.gen.seed);
            let report = run_compare(&splits, &losses_or_all(loss), &model, &base, target_f1)?;
            let mut ok = true;
            println!("loss   P_micro R_micro F1_micro P_macro R_macro F1_macro low_decile_F1 epochs_to_target");
            for row in &report.rows {
                match row.run() {
                    Some(run) => {
                        let m = &run.metrics;
                        let reached = run
                            .epochs_to_target
                            .map_or_else(|| "NA".to_string(), |e| e.to_string());
                        println!(
                            "{:<6} {:.4}  {:.4}  {:.4}   {:.4}  {:.4}  {:.4}   {:.4}        {reached}",
                            row.loss.as_str(),
                            m.p_micro,
                            m.r_micro,
                            m.f1_micro,
                            m.p_macro,
                            m.r_macro,
                            m.f1_macro,
                            run.lowest_decile_f1
                        );
                    }
                    None => {
                        ok = false;
                        if let mlc_loss::harness::RunStatus::Failed { error } = &row.status {
                            println!("{:<6} failed: {error}", row.loss.as_str());
                        }
                    }
                }
            }
            for path in write_compare_outputs(&report, &out_dir, &format)? {
                println!("wrote {}", path.display());
            }
            Ok(if ok { Status::Ok } else { Status::CheckFailed })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
