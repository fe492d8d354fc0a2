//! Linear and one-hidden-layer models over a flat parameter vector.
//!
//! Parameter layout (all matrices row-major):
//! - linear: `W (C×d)`, `b (C)`
//! - mlp: `W₁ (H×d)`, `b₁ (H)`, `W₂ (C×H)`, `b₂ (C)`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::types::LogitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Mlp,
}

pub const DEFAULT_HIDDEN_UNITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Hidden width; ignored by linear models.
    pub hidden_units: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    /// Multiplier on the Glorot-uniform bound `sqrt(6 / (fan_in + fan_out))`.
    pub init_scale: f64,
}

impl ModelSpec {
    pub fn linear(input_dim: usize, output_dim: usize) -> Self {
        Self {
            kind: ModelKind::Linear,
            hidden_units: DEFAULT_HIDDEN_UNITS,
            input_dim,
            output_dim,
            init_scale: 1.0,
        }
    }

    pub fn mlp(input_dim: usize, hidden_units: usize, output_dim: usize) -> Self {
        Self {
            kind: ModelKind::Mlp,
            hidden_units,
            input_dim,
            output_dim,
            init_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::InvalidConfig(
                "model dimensions must be positive".into(),
            ));
        }
        if self.kind == ModelKind::Mlp && self.hidden_units == 0 {
            return Err(Error::InvalidConfig(
                "mlp needs at least one hidden unit".into(),
            ));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "init scale must be finite and >= 0, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        let (d, c, h) = (self.input_dim, self.output_dim, self.hidden_units);
        match self.kind {
            ModelKind::Linear => c * d + c,
            ModelKind::Mlp => h * d + h + c * h + c,
        }
    }
}

/// Intermediate values kept from the forward pass for backpropagation.
#[derive(Debug, Clone, Default)]
pub struct ForwardCache {
    hidden_pre: Vec<f64>,
    hidden: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub spec: ModelSpec,
    pub params: Vec<f64>,
}

fn affine(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let n_in = x.len();
    b.iter()
        .enumerate()
        .map(|(r, &bias)| {
            let row = &w[r * n_in..(r + 1) * n_in];
            bias + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
        })
        .collect()
}

/// Accumulates `dW += dz·xᵀ` and `db += dz`.
fn affine_backward(dz: &[f64], x: &[f64], dw: &mut [f64], db: &mut [f64]) {
    let n_in = x.len();
    for (r, &g) in dz.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        db[r] += g;
        for (acc, &v) in dw[r * n_in..(r + 1) * n_in].iter_mut().zip(x) {
            *acc += g * v;
        }
    }
}

impl Model {
    pub fn zeros(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let params = vec![0.0; spec.param_count()];
        Ok(Self { spec, params })
    }

    /// Glorot-uniform weights and zero biases.
    pub fn init(spec: ModelSpec, rng: &mut Rng) -> Result<Self> {
        let mut model = Self::zeros(spec)?;
        let (d, c, h) = (
            model.spec.input_dim,
            model.spec.output_dim,
            model.spec.hidden_units,
        );
        let scale = model.spec.init_scale;
        let mut fill = |slice: &mut [f64], fan_in: usize, fan_out: usize| {
            let a = scale * (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in slice {
                *w = rng.uniform_range(-a, a);
            }
        };
        match model.spec.kind {
            ModelKind::Linear => fill(&mut model.params[..c * d], d, c),
            ModelKind::Mlp => {
                fill(&mut model.params[..h * d], d, h);
                let w2 = h * d + h;
                fill(&mut model.params[w2..w2 + c * h], h, c);
            }
        }
        Ok(model)
    }

    pub fn from_params(spec: ModelSpec, params: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if params.len() != spec.param_count() {
            return Err(Error::LengthMismatch {
                expected: spec.param_count(),
                actual: params.len(),
            });
        }
        Ok(Self { spec, params })
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.input_dim {
            return Err(Error::LengthMismatch {
                expected: self.spec.input_dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<LogitVector> {
        self.check_input(x)?;
        LogitVector::new(self.forward_cached(x).0)
    }

    /// Forward pass without the dimension check; `x.len()` must equal the
    /// input dimension.
    pub fn forward_cached(&self, x: &[f64]) -> (Vec<f64>, ForwardCache) {
        let (d, c, h) = (
            self.spec.input_dim,
            self.spec.output_dim,
            self.spec.hidden_units,
        );
        let p = &self.params;
        match self.spec.kind {
            ModelKind::Linear => (affine(&p[..c * d], &p[c * d..], x), ForwardCache::default()),
            ModelKind::Mlp => {
                let (w1, rest) = p.split_at(h * d);
                let (b1, rest) = rest.split_at(h);
                let (w2, b2) = rest.split_at(c * h);
                let hidden_pre = affine(w1, b1, x);
                let hidden: Vec<f64> = hidden_pre.iter().map(|&v| v.max(0.0)).collect();
                let z = affine(w2, b2, &hidden);
                (z, ForwardCache { hidden_pre, hidden })
            }
        }
    }

    /// Adds `∂L/∂θ` for one sample into `grad`, given `∂L/∂z`.
    pub fn accumulate_backward(
        &self,
        x: &[f64],
        cache: &ForwardCache,
        dz: &[f64],
        grad: &mut [f64],
    ) {
        let (d, c, h) = (
            self.spec.input_dim,
            self.spec.output_dim,
            self.spec.hidden_units,
        );
        match self.spec.kind {
            ModelKind::Linear => {
                let (dw, db) = grad.split_at_mut(c * d);
                affine_backward(dz, x, dw, db);
            }
            ModelKind::Mlp => {
                let w2_start = h * d + h;
                let w2 = &self.params[w2_start..w2_start + c * h];
                let (g1, g2) = grad.split_at_mut(w2_start);
                let (dw2, db2) = g2.split_at_mut(c * h);
                affine_backward(dz, &cache.hidden, dw2, db2);

                // relu subgradient at 0 is 0
                let dh: Vec<f64> = (0..h)
                    .map(|k| {
                        if cache.hidden_pre[k] > 0.0 {
                            (0..c).map(|r| w2[r * h + k] * dz[r]).sum()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let (dw1, db1) = g1.split_at_mut(h * d);
                affine_backward(&dh, x, dw1, db1);
            }
        }
    }

    pub fn backward(&self, x: &[f64], cache: &ForwardCache, dz: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.params.len()];
        self.accumulate_backward(x, cache, dz, &mut grad);
        grad
    }
}
