//! Dense containers shared by every module: label, logit and probability
//! vectors, and the in-memory dataset.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary multi-label ground reference, one flag per class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidLabel(f64::from(bad)));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn is_positive(&self, c: usize) -> bool {
        self.0[c] == 1
    }

    pub fn positive_count(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn to_signed(&self) -> SignedLabelVector {
        SignedLabelVector(self.0.iter().map(|&b| 2 * b as i8 - 1).collect())
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|&b| 1 - b).collect())
    }
}

impl TryFrom<Vec<u8>> for LabelVector {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<LabelVector> for Vec<u8> {
    fn from(v: LabelVector) -> Self {
        v.0
    }
}

impl Deref for LabelVector {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

/// The `{-1, +1}` view of a [`LabelVector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedLabelVector(Vec<i8>);

impl SignedLabelVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidConfig(format!(
                "signed label {bad} is not -1 or +1"
            )));
        }
        Ok(Self(signs))
    }

    pub fn to_binary(&self) -> LabelVector {
        LabelVector(self.0.iter().map(|&s| ((s + 1) / 2) as u8).collect())
    }
}

impl Deref for SignedLabelVector {
    type Target = [i8];

    fn deref(&self) -> &[i8] {
        &self.0
    }
}

/// Raw class scores before any activation. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitVector(Vec<f64>);

impl LogitVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(scores))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LogitVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-class probabilities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidConfig(format!(
                "probability {bad} outside [0, 1]"
            )));
        }
        Ok(Self(probs))
    }

    pub(crate) fn new_unchecked(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Feature matrix (row-major, `sample_count × dim`) with one label vector per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<LabelVector>,
    dim: usize,
    class_count: usize,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        labels: Vec<LabelVector>,
        dim: usize,
        class_count: usize,
    ) -> Result<Self> {
        if features.len() != labels.len() * dim {
            return Err(Error::LengthMismatch {
                expected: labels.len() * dim,
                actual: features.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|l| l.len() != class_count) {
            return Err(Error::LengthMismatch {
                expected: class_count,
                actual: bad.len(),
            });
        }
        Ok(Self {
            features,
            labels,
            dim,
            class_count,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self, i: usize) -> &LabelVector {
        &self.labels[i]
    }

    pub fn all_labels(&self) -> &[LabelVector] {
        &self.labels
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.features(i));
            labels.push(self.labels[i].clone());
        }
        Dataset {
            features,
            labels,
            dim: self.dim,
            class_count: self.class_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassFrequencies {
    pub counts: Vec<usize>,
    pub relative: Vec<f64>,
}

/// Per-class positive counts `n_c` and relative frequencies `n_c / M`.
pub fn class_frequencies(d: &Dataset) -> Result<ClassFrequencies> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = vec![0usize; d.class_count()];
    for y in d.all_labels() {
        for (n, &b) in counts.iter_mut().zip(y.iter()) {
            *n += b as usize;
        }
    }
    let m = d.sample_count() as f64;
    let relative = counts.iter().map(|&n| n as f64 / m).collect();
    Ok(ClassFrequencies { counts, relative })
}
