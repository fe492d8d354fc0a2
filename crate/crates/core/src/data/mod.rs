//! Synthetic multi-label data with controllable class imbalance.
//!
//! Features are i.i.d. standard normal. Class `c` has a unit direction `w_c`
//! and bias `b_c = −Φ⁻¹(1 − π_c)`, so `P(w_c·x + b_c > 0) = π_c` exactly and
//! the labels are linearly separable per class before label noise.

mod io;
mod normal;

pub use io::{load_csv, read_sidecar, save_csv, sidecar_path, DatasetMeta, SCHEMA_VERSION};
pub use normal::inverse_normal_cdf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::types::{Dataset, LabelVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class_count: usize,
    pub feature_dim: usize,
    pub sample_count: usize,
    /// Power-law exponent `s` in `π_c = π_max · (c + 1)^{−s}`.
    pub imbalance_exponent: f64,
    pub max_prevalence: f64,
    /// Probability of flipping each label independently.
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            class_count: 8,
            feature_dim: 20,
            sample_count: 2500,
            imbalance_exponent: 1.5,
            max_prevalence: 0.5,
            label_noise: 0.0,
            seed: 42,
        }
    }
}

impl GeneratorSpec {
    pub fn target_prevalences(&self) -> Vec<f64> {
        (0..self.class_count)
            .map(|c| self.max_prevalence * ((c + 1) as f64).powf(-self.imbalance_exponent))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.class_count == 0 || self.feature_dim == 0 || self.sample_count == 0 {
            return bad("class count, feature dim and sample count must be positive".into());
        }
        if !(self.imbalance_exponent >= 0.0 && self.imbalance_exponent.is_finite()) {
            return bad(format!(
                "imbalance exponent must be finite and >= 0, got {}",
                self.imbalance_exponent
            ));
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return bad(format!("label noise {} outside [0, 0.5)", self.label_noise));
        }
        for (c, &p) in self.target_prevalences().iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("prevalence of class {c} is {p}, outside (0, 1)"));
            }
        }
        Ok(())
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            schema_version: SCHEMA_VERSION,
            seed: self.seed,
            class_count: self.class_count,
            dim: self.feature_dim,
            sample_count: self.sample_count,
            target_prevalences: self.target_prevalences(),
        }
    }
}

/// A generated dataset together with the planted per-class hyperplanes.
#[derive(Debug, Clone)]
pub struct GeneratedData {
    pub dataset: Dataset,
    /// Unit-norm direction per class, `class_count × feature_dim`.
    pub directions: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub prevalences: Vec<f64>,
}

impl GeneratedData {
    /// Noise-free label of row `i` under the planted hyperplanes.
    pub fn planted_labels(&self, x: &[f64]) -> LabelVector {
        LabelVector::from_bools(
            self.directions
                .iter()
                .zip(&self.biases)
                .map(|(w, b)| dot(w, x) + b > 0.0),
        )
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedData> {
    spec.validate()?;
    let root = Rng::new(spec.seed);
    let mut dir_rng = root.split("directions");
    let mut feat_rng = root.split("features");
    let mut noise_rng = root.split("label-noise");

    let d = spec.feature_dim;
    let prevalences = spec.target_prevalences();
    let directions: Vec<Vec<f64>> = (0..spec.class_count)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| dir_rng.normal()).collect();
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect();
    let biases: Vec<f64> = prevalences
        .iter()
        .map(|&p| -inverse_normal_cdf(1.0 - p))
        .collect();

    let mut features = Vec::with_capacity(spec.sample_count * d);
    let mut labels = Vec::with_capacity(spec.sample_count);
    for _ in 0..spec.sample_count {
        let x: Vec<f64> = (0..d).map(|_| feat_rng.normal()).collect();
        let y = directions.iter().zip(&biases).map(|(w, b)| {
            let clean = dot(w, &x) + b > 0.0;
            // Draw unconditionally so the noise stream stays aligned across rows.
            let flip = noise_rng.bernoulli(spec.label_noise);
            clean ^ flip
        });
        labels.push(LabelVector::from_bools(y.collect::<Vec<_>>()));
        features.extend(x);
    }

    Ok(GeneratedData {
        dataset: Dataset::new(features, labels, d, spec.class_count)?,
        directions,
        biases,
        prevalences,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Random (unstratified) partition of `0..sample_count`. The test split takes
/// whatever remains after the rounded train and validation sizes.
pub fn split_indices(
    sample_count: usize,
    train_frac: f64,
    val_frac: f64,
    seed: u64,
) -> Result<SplitIndices> {
    if !(train_frac > 0.0 && val_frac > 0.0 && train_frac + val_frac <= 1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "split fractions ({train_frac}, {val_frac}) must be positive and sum to at most 1"
        )));
    }
    let m = sample_count as f64;
    let n_train = ((train_frac * m).round() as usize).min(sample_count);
    let n_val = ((val_frac * m).round() as usize).min(sample_count - n_train);

    let mut order: Vec<usize> = (0..sample_count).collect();
    Rng::new(seed).split("split").shuffle(&mut order);
    let test = order.split_off(n_train + n_val);
    let validation = order.split_off(n_train);
    Ok(SplitIndices {
        train: order,
        validation,
        test,
    })
}

#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

pub fn split(d: &Dataset, train_frac: f64, val_frac: f64, seed: u64) -> Result<Splits> {
    let idx = split_indices(d.sample_count(), train_frac, val_frac, seed)?;
    Ok(Splits {
        train: d.subset(&idx.train),
        validation: d.subset(&idx.validation),
        test: d.subset(&idx.test),
    })
}
