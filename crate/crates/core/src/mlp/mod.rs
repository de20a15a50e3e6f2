//! `3 -> L -> 1` tanh network regressing `log10 g2` from `(p, q, n_c)`.
//!
//! Parameters are packed as `[w1 (L x 3, row-major), b1 (L), w2 (L), b2]`.

mod io;
mod train;

pub use io::{load, save, write_history_csv, SCHEMA_VERSION};
pub use train::{train_lm, StopReason, TrainHistory, TrainOptions, TrainRecord};

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::Dataset;

pub const DEFAULT_HIDDEN: usize = 50;
pub const N_INPUTS: usize = 3;

#[derive(Debug, Error)]
pub enum MlpError {
    #[error("hidden size must be >= 1")]
    HiddenSize,
    #[error("{0} set is empty")]
    EmptySet(&'static str),
    #[error("invalid training options: {0}")]
    Options(String),
    #[error("normal equations stayed singular up to lambda = {lambda:e}")]
    Singular { lambda: f64 },
    #[error("model file {path}: {message}")]
    Format { path: String, message: String },
    #[error("model schema version {found} is not supported (expected {expected})")]
    Schema { found: u32, expected: u32 },
    #[error("{0}")]
    Io(String),
}

/// Per-feature z-score statistics of the training inputs and target; the
/// input min/max bound the region the model was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub x_mean: [f64; N_INPUTS],
    pub x_std: [f64; N_INPUTS],
    pub x_min: [f64; N_INPUTS],
    pub x_max: [f64; N_INPUTS],
    pub y_mean: f64,
    pub y_std: f64,
}

impl Scaler {
    pub fn identity() -> Self {
        Self {
            x_mean: [0.0; N_INPUTS],
            x_std: [1.0; N_INPUTS],
            x_min: [f64::NEG_INFINITY; N_INPUTS],
            x_max: [f64::INFINITY; N_INPUTS],
            y_mean: 0.0,
            y_std: 1.0,
        }
    }

    /// Population statistics; a zero spread falls back to 1 so the
    /// standardization stays defined for constant columns.
    pub fn fit(inputs: &[[f64; N_INPUTS]], targets: &[f64]) -> Self {
        let m = inputs.len() as f64;
        let spread = |mean: f64, sum_sq: f64| {
            let s = (sum_sq / m).sqrt();
            if s > 1e-12 * mean.abs() && s > 0.0 {
                s
            } else {
                1.0
            }
        };
        let mut x_mean = [0.0; N_INPUTS];
        let mut x_std = [1.0; N_INPUTS];
        let mut x_min = [f64::INFINITY; N_INPUTS];
        let mut x_max = [f64::NEG_INFINITY; N_INPUTS];
        for i in 0..N_INPUTS {
            let mean = inputs.iter().map(|x| x[i]).sum::<f64>() / m;
            let sq = inputs
                .iter()
                .map(|x| (x[i] - mean) * (x[i] - mean))
                .sum::<f64>();
            x_mean[i] = mean;
            x_std[i] = spread(mean, sq);
            for x in inputs {
                x_min[i] = x_min[i].min(x[i]);
                x_max[i] = x_max[i].max(x[i]);
            }
        }
        let y_mean = targets.iter().sum::<f64>() / m;
        let sq = targets
            .iter()
            .map(|y| (y - y_mean) * (y - y_mean))
            .sum::<f64>();
        Self {
            x_mean,
            x_std,
            x_min,
            x_max,
            y_mean,
            y_std: spread(y_mean, sq),
        }
    }

    pub fn standardize(&self, x: &[f64; N_INPUTS]) -> [f64; N_INPUTS] {
        std::array::from_fn(|i| (x[i] - self.x_mean[i]) / self.x_std[i])
    }

    /// Features outside the training min/max, as `(index, value)`.
    pub fn out_of_range(&self, x: &[f64; N_INPUTS]) -> Vec<(usize, f64)> {
        (0..N_INPUTS)
            .filter(|&i| x[i] < self.x_min[i] || x[i] > self.x_max[i])
            .map(|i| (i, x[i]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MLPModel {
    pub hidden: usize,
    pub theta: Vec<f64>,
    pub scaler: Scaler,
    /// sha256 of the training set the scaler and weights were fit on.
    pub dataset_hash: Option<String>,
}

pub fn param_count(hidden: usize) -> usize {
    N_INPUTS * hidden + hidden + hidden + 1
}

impl MLPModel {
    /// Glorot-uniform weights, zero biases, identity scaler.
    pub fn init(hidden: usize, seed: u64) -> Result<Self, MlpError> {
        if hidden == 0 {
            return Err(MlpError::HiddenSize);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut theta = vec![0.0; param_count(hidden)];
        let lim1 = (6.0 / (N_INPUTS + hidden) as f64).sqrt();
        let lim2 = (6.0 / (hidden + 1) as f64).sqrt();
        for w in &mut theta[..N_INPUTS * hidden] {
            *w = lim1 * (2.0 * rng.random::<f64>() - 1.0);
        }
        let w2 = N_INPUTS * hidden + hidden;
        for w in &mut theta[w2..w2 + hidden] {
            *w = lim2 * (2.0 * rng.random::<f64>() - 1.0);
        }
        Ok(Self {
            hidden,
            theta,
            scaler: Scaler::identity(),
            dataset_hash: None,
        })
    }

    pub fn param_count(&self) -> usize {
        self.theta.len()
    }

    pub fn w1(&self, j: usize, i: usize) -> f64 {
        self.theta[j * N_INPUTS + i]
    }

    pub fn b1(&self) -> &[f64] {
        let o = N_INPUTS * self.hidden;
        &self.theta[o..o + self.hidden]
    }

    pub fn w2(&self) -> &[f64] {
        let o = N_INPUTS * self.hidden + self.hidden;
        &self.theta[o..o + self.hidden]
    }

    pub fn b2(&self) -> f64 {
        self.theta[self.theta.len() - 1]
    }

    /// Output in standardized target units for a standardized input.
    pub fn forward_standardized(&self, xs: &[f64; N_INPUTS]) -> f64 {
        let (b1, w2) = (self.b1(), self.w2());
        let mut z = self.b2();
        for j in 0..self.hidden {
            let a = self.w1(j, 0) * xs[0] + self.w1(j, 1) * xs[1] + self.w1(j, 2) * xs[2] + b1[j];
            z += w2[j] * a.tanh();
        }
        z
    }

    pub fn forward(&self, x: &[f64; N_INPUTS]) -> f64 {
        let z = self.forward_standardized(&self.scaler.standardize(x));
        self.scaler.y_mean + self.scaler.y_std * z
    }

    pub fn predict(&self, inputs: &[[f64; N_INPUTS]]) -> Vec<f64> {
        inputs.iter().map(|x| self.forward(x)).collect()
    }
}

/// `d z_k / d theta` for standardized inputs, one row per sample.
pub fn jacobian_standardized(model: &MLPModel, xs: &[[f64; N_INPUTS]]) -> Mat<f64> {
    let l = model.hidden;
    let (b1, w2) = (model.b1(), model.w2());
    let off_b1 = N_INPUTS * l;
    let off_w2 = off_b1 + l;
    let mut jac = Mat::<f64>::zeros(xs.len(), model.param_count());
    for (k, x) in xs.iter().enumerate() {
        for j in 0..l {
            let a = model.w1(j, 0) * x[0] + model.w1(j, 1) * x[1] + model.w1(j, 2) * x[2] + b1[j];
            let h = a.tanh();
            let back = w2[j] * (1.0 - h * h);
            for i in 0..N_INPUTS {
                jac[(k, j * N_INPUTS + i)] = back * x[i];
            }
            jac[(k, off_b1 + j)] = back;
            jac[(k, off_w2 + j)] = h;
        }
        jac[(k, off_w2 + l)] = 1.0;
    }
    jac
}

/// Jacobian of the standardized residuals `z(x_k) - y_k` for raw inputs.
pub fn jacobian(model: &MLPModel, inputs: &[[f64; N_INPUTS]]) -> Mat<f64> {
    let xs: Vec<[f64; N_INPUTS]> = inputs.iter().map(|x| model.scaler.standardize(x)).collect();
    jacobian_standardized(model, &xs)
}

/// Mean squared error in raw `log10 g2` units.
pub fn mse(model: &MLPModel, ds: &Dataset) -> Result<f64, MlpError> {
    if ds.is_empty() {
        return Err(MlpError::EmptySet("evaluation"));
    }
    let total: f64 = ds
        .samples
        .iter()
        .map(|s| {
            let e = model.forward(&s.x.to_array()) - s.y;
            e * e
        })
        .sum();
    Ok(total / ds.len() as f64)
}

/// sha256 over the little-endian bytes of every `(p, q, n_c, y)` in order.
pub fn dataset_hash(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    for s in &ds.samples {
        for v in [s.x.p, s.x.q, s.x.n_c, s.y] {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
