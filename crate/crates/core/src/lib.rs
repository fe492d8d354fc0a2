//! Loss functions for multi-label classification with analytic gradients,
//! sigmoid and sparsemax activations, multi-label metrics, a synthetic
//! imbalanced data generator, a small RMSprop trainer and a comparison
//! harness.

pub mod activations;
pub mod data;
pub mod error;
mod fsio;
pub mod harness;
pub mod losses;
pub mod metrics;
pub mod rng;
pub mod trainer;
pub mod types;

pub use error::{Error, Result};
pub use fsio::write_atomic;
pub use rng::Rng;
pub use types::{
    class_frequencies, ClassFrequencies, Dataset, LabelVector, LogitVector, ProbVector,
    SignedLabelVector,
};
