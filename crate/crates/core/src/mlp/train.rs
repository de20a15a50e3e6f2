use faer::prelude::*;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::{dataset_hash, jacobian_standardized, MLPModel, MlpError, Scaler, N_INPUTS};
use crate::dataset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    /// Damping beyond which a non-decreasing step ends training.
    pub lambda_max: f64,
    pub max_iters: usize,
    pub val_patience: usize,
    /// Stop when `‖J^T r‖_inf` (standardized units) falls below this.
    pub grad_tol: f64,
    /// Stop when the raw train MSE reaches this; `0` disables.
    pub mse_tol: f64,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            lambda0: 1e-3,
            lambda_up: 10.0,
            lambda_down: 0.1,
            lambda_max: 1e10,
            max_iters: 1000,
            val_patience: 6,
            grad_tol: 1e-7,
            mse_tol: 0.0,
            seed: 0,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<(), MlpError> {
        let ok = self.lambda0 > 0.0
            && self.lambda_up > 1.0
            && self.lambda_down > 0.0
            && self.lambda_down < 1.0
            && self.lambda_max >= self.lambda0
            && self.max_iters >= 1
            && self.grad_tol >= 0.0
            && self.mse_tol >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(MlpError::Options(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxIters,
    GradTol,
    MseTol,
    ValPatience,
    LambdaCap,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MaxIters => "max-iters",
            Self::GradTol => "grad-tol",
            Self::MseTol => "mse-tol",
            Self::ValPatience => "val-patience",
            Self::LambdaCap => "lambda-cap",
        })
    }
}

/// MSEs in raw `log10 g2` units after iteration `iteration` (0 = initial).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub iteration: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub val_mse: f64,
    /// Damping of the accepted step.
    pub lambda: f64,
    /// Steps rejected before the accepted one.
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<TrainRecord>,
    pub stop_reason: StopReason,
    /// Iteration whose weights were restored (lowest validation MSE).
    pub best_iteration: usize,
}

struct Standardized {
    xs: Vec<[f64; N_INPUTS]>,
    zs: Vec<f64>,
}

impl Standardized {
    fn new(ds: &Dataset, scaler: &Scaler) -> Self {
        Self {
            xs: ds
                .samples
                .iter()
                .map(|s| scaler.standardize(&s.x.to_array()))
                .collect(),
            zs: ds
                .samples
                .iter()
                .map(|s| (s.y - scaler.y_mean) / scaler.y_std)
                .collect(),
        }
    }

    fn mse(&self, model: &MLPModel) -> f64 {
        let sum: f64 = self
            .xs
            .iter()
            .zip(&self.zs)
            .map(|(x, z)| {
                let e = model.forward_standardized(x) - z;
                e * e
            })
            .sum();
        sum / self.xs.len() as f64
    }
}

/// Levenberg–Marquardt on the standardized squared error.
///
/// Each iteration raises the damping until a step lowers the train MSE, so
/// every recorded iteration is an accepted, strictly decreasing step. The
/// scaler is fit on `train` only and the weights with the lowest
/// validation MSE are returned.
pub fn train_lm(
    model: &MLPModel,
    train: &Dataset,
    val: &Dataset,
    test: &Dataset,
    opts: &TrainOptions,
) -> Result<(MLPModel, TrainHistory), MlpError> {
    opts.validate()?;
    for (name, ds) in [("train", train), ("validation", val), ("test", test)] {
        if ds.is_empty() {
            return Err(MlpError::EmptySet(name));
        }
    }
    let scaler = Scaler::fit(&train.inputs(), &train.targets());
    let raw = scaler.y_std * scaler.y_std;
    let mut model = MLPModel {
        scaler: scaler.clone(),
        dataset_hash: Some(dataset_hash(train)),
        ..model.clone()
    };
    let tr = Standardized::new(train, &scaler);
    let va = Standardized::new(val, &scaler);
    let te = Standardized::new(test, &scaler);
    let p = model.param_count();
    let m = tr.xs.len();

    let mut lambda = opts.lambda0;
    let mut train_mse = tr.mse(&model);
    let mut records = vec![TrainRecord {
        iteration: 0,
        train_mse: train_mse * raw,
        test_mse: te.mse(&model) * raw,
        val_mse: va.mse(&model) * raw,
        lambda,
        rejected: 0,
    }];
    let mut best = (records[0].val_mse, model.theta.clone(), 0usize);
    let mut stale = 0usize;
    let mut stop = StopReason::MaxIters;

    'outer: for iteration in 1..=opts.max_iters {
        if opts.mse_tol > 0.0 && train_mse * raw <= opts.mse_tol {
            stop = StopReason::MseTol;
            break;
        }
        let jac = jacobian_standardized(&model, &tr.xs);
        let resid = Mat::<f64>::from_fn(m, 1, |k, _| {
            model.forward_standardized(&tr.xs[k]) - tr.zs[k]
        });
        let grad = jac.transpose() * &resid;
        let grad_inf = (0..p).fold(0.0f64, |g, i| g.max(grad[(i, 0)].abs()));
        if grad_inf < opts.grad_tol {
            stop = StopReason::GradTol;
            break;
        }
        let normal = jac.transpose() * &jac;

        let mut rejected = 0usize;
        loop {
            let mut damped = normal.clone();
            for i in 0..p {
                damped[(i, i)] += lambda;
            }
            let step = match damped.llt(Side::Lower) {
                Ok(llt) => llt.solve(&grad),
                Err(_) => {
                    lambda *= opts.lambda_up;
                    if lambda > opts.lambda_max {
                        return Err(MlpError::Singular { lambda });
                    }
                    continue;
                }
            };
            let trial = MLPModel {
                theta: (0..p).map(|i| model.theta[i] - step[(i, 0)]).collect(),
                ..model.clone()
            };
            let trial_mse = tr.mse(&trial);
            if trial_mse < train_mse {
                let used = lambda;
                lambda *= opts.lambda_down;
                model = trial;
                train_mse = trial_mse;
                records.push(TrainRecord {
                    iteration,
                    train_mse: train_mse * raw,
                    test_mse: te.mse(&model) * raw,
                    val_mse: va.mse(&model) * raw,
                    lambda: used,
                    rejected,
                });
                break;
            }
            rejected += 1;
            lambda *= opts.lambda_up;
            if lambda > opts.lambda_max {
                stop = StopReason::LambdaCap;
                break 'outer;
            }
        }

        let last = records.last().expect("just pushed");
        if last.val_mse < best.0 {
            best = (last.val_mse, model.theta.clone(), iteration);
            stale = 0;
        } else {
            stale += 1;
            if opts.val_patience > 0 && stale >= opts.val_patience {
                stop = StopReason::ValPatience;
                break;
            }
        }
    }
    if stop == StopReason::MaxIters && opts.mse_tol > 0.0 && train_mse * raw <= opts.mse_tol {
        stop = StopReason::MseTol;
    }
    model.theta = best.1;
    Ok((
        model,
        TrainHistory {
            records,
            stop_reason: stop,
            best_iteration: best.2,
        },
    ))
}
