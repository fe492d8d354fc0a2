//! Prediction rules and multi-label evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::activations::sparsemax;
use crate::error::{Error, Result};
use crate::losses::hal_value;
use crate::types::LabelVector;

/// How hard labels are read off a logit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionRule {
    /// `δ(z_c) ≥ threshold`, evaluated in logit space so that the default
    /// threshold 0.5 is exactly `z_c ≥ 0`.
    SigmoidThreshold { threshold: f64 },
    /// `z_c ≥ 0`.
    LogitSign,
    /// Class is in the sparsemax support.
    SparsemaxSupport,
}

impl PredictionRule {
    pub const DEFAULT_SIGMOID: Self = PredictionRule::SigmoidThreshold { threshold: 0.5 };

    pub fn sigmoid_threshold(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sigmoid threshold {threshold} outside (0, 1)"
            )));
        }
        Ok(PredictionRule::SigmoidThreshold { threshold })
    }
}

pub fn predict(z: &[f64], rule: PredictionRule) -> LabelVector {
    match rule {
        PredictionRule::SigmoidThreshold { threshold } => {
            let cut = (threshold / (1.0 - threshold)).ln();
            LabelVector::from_bools(z.iter().map(|&v| v >= cut))
        }
        PredictionRule::LogitSign => LabelVector::from_bools(z.iter().map(|&v| v >= 0.0)),
        PredictionRule::SparsemaxSupport => {
            let r = sparsemax(z);
            LabelVector::from_bools((0..z.len()).map(|j| r.in_support(j)))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn scores(&self) -> Scores {
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_);
        Scores {
            precision,
            recall,
            f1,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub per_class: Vec<Counts>,
}

impl ConfusionCounts {
    pub fn pooled(&self) -> Counts {
        self.per_class
            .iter()
            .fold(Counts::default(), |acc, c| Counts {
                tp: acc.tp + c.tp,
                fp: acc.fp + c.fp,
                fn_: acc.fn_ + c.fn_,
                tn: acc.tn + c.tn,
            })
    }

    pub fn per_class_f1(&self) -> Vec<f64> {
        self.per_class.iter().map(|c| c.scores().f1).collect()
    }
}

fn check_shapes(preds: &[LabelVector], refs: &[LabelVector]) -> Result<usize> {
    if preds.len() != refs.len() {
        return Err(Error::LengthMismatch {
            expected: refs.len(),
            actual: preds.len(),
        });
    }
    let c = refs.first().map_or(0, |r| r.len());
    for (p, r) in preds.iter().zip(refs) {
        if r.len() != c || p.len() != c {
            return Err(Error::LengthMismatch {
                expected: c,
                actual: if r.len() != c { r.len() } else { p.len() },
            });
        }
    }
    Ok(c)
}

pub fn confusion(preds: &[LabelVector], refs: &[LabelVector]) -> Result<ConfusionCounts> {
    let c = check_shapes(preds, refs)?;
    let mut per_class = vec![Counts::default(); c];
    for (p, r) in preds.iter().zip(refs) {
        for (k, counts) in per_class.iter_mut().enumerate() {
            match (p[k], r[k]) {
                (1, 1) => counts.tp += 1,
                (1, 0) => counts.fp += 1,
                (0, 1) => counts.fn_ += 1,
                _ => counts.tn += 1,
            }
        }
    }
    Ok(ConfusionCounts { per_class })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    Micro,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 with `0/0 := 0`.
///
/// Micro pools counts over classes; macro averages the per-class scores
/// (so macro F1 is the mean of per-class F1, not the harmonic mean of the
/// macro precision and recall).
pub fn precision_recall_f1(c: &ConfusionCounts, averaging: Averaging) -> Scores {
    match averaging {
        Averaging::Micro => c.pooled().scores(),
        Averaging::Macro => {
            let n = c.per_class.len();
            if n == 0 {
                return Scores {
                    precision: 0.0,
                    recall: 0.0,
                    f1: 0.0,
                };
            }
            let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
            for s in c.per_class.iter().map(Counts::scores) {
                p += s.precision;
                r += s.recall;
                f += s.f1;
            }
            let n = n as f64;
            Scores {
                precision: p / n,
                recall: r / n,
                f1: f / n,
            }
        }
    }
}

/// Mean per-sample Hamming loss.
pub fn hamming_metric(preds: &[LabelVector], refs: &[LabelVector]) -> Result<f64> {
    check_shapes(preds, refs)?;
    if refs.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (p, r) in preds.iter().zip(refs) {
        total += hal_value(p, r)?;
    }
    Ok(total / refs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(rows: &[&[u8]]) -> Vec<LabelVector> {
        rows.iter()
            .map(|r| LabelVector::new(r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn prediction_rules() {
        assert_eq!(
            &*predict(&[1.0, -1.0], PredictionRule::DEFAULT_SIGMOID),
            &[1, 0]
        );
        assert_eq!(
            &*predict(&[1.1, 0.3], PredictionRule::SparsemaxSupport),
            &[1, 1]
        );
        assert_eq!(&*predict(&[0.0, -0.1], PredictionRule::LogitSign), &[1, 0]);
        assert_eq!(
            &*predict(&[0.0, -1e-300], PredictionRule::DEFAULT_SIGMOID),
            &[1, 0]
        );
        assert_eq!(
            &*predict(&[10.0, 0.0], PredictionRule::SparsemaxSupport),
            &[1, 0]
        );
    }

    #[test]
    fn threshold_validated() {
        assert!(PredictionRule::sigmoid_threshold(0.0).is_err());
        assert!(PredictionRule::sigmoid_threshold(1.0).is_err());
        assert!(PredictionRule::sigmoid_threshold(0.3).is_ok());
    }

    #[test]
    fn hand_counted_confusion() {
        let refs = lv(&[&[1, 0, 1], &[0, 1, 0]]);
        let preds = lv(&[&[1, 1, 0], &[0, 1, 0]]);
        let c = confusion(&preds, &refs).unwrap();
        let pooled = c.pooled();
        assert_eq!((pooled.tp, pooled.fp, pooled.fn_, pooled.tn), (2, 1, 1, 2));
        assert_eq!(pooled.total(), 6);
        assert!(c.per_class.iter().all(|k| k.total() == 2));

        let s = precision_recall_f1(&c, Averaging::Micro);
        assert_eq!(s.precision, 2.0 / 3.0);
        assert_eq!(s.recall, 2.0 / 3.0);
        assert_eq!(s.f1, 2.0 / 3.0);
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let refs = lv(&[&[1, 0, 1], &[0, 1, 0], &[1, 1, 0]]);
        let c = confusion(&refs, &refs).unwrap();
        assert_eq!(c.pooled().fp, 0);
        assert_eq!(c.pooled().fn_, 0);
        for avg in [Averaging::Micro, Averaging::Macro] {
            let s = precision_recall_f1(&c, avg);
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        }

        let zeros = lv(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let c = confusion(&zeros, &refs).unwrap();
        assert_eq!(c.pooled().tp, 0);
        assert_eq!(c.pooled().fn_, 5);
        let s = precision_recall_f1(&c, Averaging::Micro);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn macro_averages_per_class() {
        let refs = lv(&[&[1, 0], &[1, 1]]);
        let preds = lv(&[&[1, 0], &[0, 1]]);
        let c = confusion(&preds, &refs).unwrap();
        let s = precision_recall_f1(&c, Averaging::Macro);
        // class 0: P=1 R=0.5 F1=2/3; class 1: P=R=F1=1
        assert!((s.precision - 1.0).abs() < 1e-15);
        assert!((s.recall - 0.75).abs() < 1e-15);
        assert!((s.f1 - (2.0 / 3.0 + 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch() {
        let refs = lv(&[&[1, 0, 1]]);
        assert!(confusion(&lv(&[&[1, 0]]), &refs).is_err());
        assert!(confusion(&[], &refs).is_err());
        assert!(hamming_metric(&lv(&[&[1, 0, 1], &[1, 0, 1]]), &refs).is_err());
    }

    #[test]
    fn hamming_cases() {
        let refs = lv(&[&[1, 0, 1], &[0, 1, 0]]);
        assert_eq!(hamming_metric(&refs, &refs).unwrap(), 0.0);
        let comp: Vec<_> = refs.iter().map(LabelVector::complement).collect();
        assert_eq!(hamming_metric(&comp, &refs).unwrap(), 1.0);
        let preds = lv(&[&[1, 1, 1], &[0, 1, 0]]);
        assert!((hamming_metric(&preds, &refs).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }
}
