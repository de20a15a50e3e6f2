use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{param_count, MLPModel, MlpError, Scaler, TrainHistory, N_INPUTS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ScalerFile {
    x_mean: [f64; N_INPUTS],
    x_std: [f64; N_INPUTS],
    /// `null` for an unbounded side.
    x_min: [Option<f64>; N_INPUTS],
    x_max: [Option<f64>; N_INPUTS],
    y_mean: f64,
    y_std: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    hidden_size: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
    scaler: ScalerFile,
    dataset_provenance_hash: Option<String>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// JSON with every weight written at round-trip precision.
pub fn save(model: &MLPModel, path: &Path) -> Result<(), MlpError> {
    let l = model.hidden;
    let s = &model.scaler;
    let file = ModelFile {
        schema_version: SCHEMA_VERSION,
        hidden_size: l,
        w1: model.theta[..N_INPUTS * l].to_vec(),
        b1: model.b1().to_vec(),
        w2: model.w2().to_vec(),
        b2: model.b2(),
        scaler: ScalerFile {
            x_mean: s.x_mean,
            x_std: s.x_std,
            x_min: s.x_min.map(finite),
            x_max: s.x_max.map(finite),
            y_mean: s.y_mean,
            y_std: s.y_std,
        },
        dataset_provenance_hash: model.dataset_hash.clone(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| MlpError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| MlpError::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<MLPModel, MlpError> {
    let text =
        fs::read_to_string(path).map_err(|e| MlpError::Io(format!("{}: {e}", path.display())))?;
    let format = |message: String| MlpError::Format {
        path: path.display().to_string(),
        message,
    };
    let probe: VersionProbe = serde_json::from_str(&text).map_err(|e| format(e.to_string()))?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(MlpError::Schema {
            found: probe.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    let f: ModelFile = serde_json::from_str(&text).map_err(|e| format(e.to_string()))?;
    let l = f.hidden_size;
    if l == 0 {
        return Err(MlpError::HiddenSize);
    }
    for (name, len, want) in [
        ("w1", f.w1.len(), N_INPUTS * l),
        ("b1", f.b1.len(), l),
        ("w2", f.w2.len(), l),
    ] {
        if len != want {
            return Err(format(format!(
                "`{name}` has {len} entries, expected {want}"
            )));
        }
    }
    let s = &f.scaler;
    if s.x_std.iter().chain([&s.y_std]).any(|v| !(*v > 0.0)) {
        return Err(format("scaler standard deviations must be > 0".into()));
    }
    let mut theta = Vec::with_capacity(param_count(l));
    theta.extend(&f.w1);
    theta.extend(&f.b1);
    theta.extend(&f.w2);
    theta.push(f.b2);
    Ok(MLPModel {
        hidden: l,
        theta,
        scaler: Scaler {
            x_mean: s.x_mean,
            x_std: s.x_std,
            x_min: s.x_min.map(|v| v.unwrap_or(f64::NEG_INFINITY)),
            x_max: s.x_max.map(|v| v.unwrap_or(f64::INFINITY)),
            y_mean: s.y_mean,
            y_std: s.y_std,
        },
        dataset_hash: f.dataset_provenance_hash,
    })
}

/// One row per recorded iteration; MSEs in raw `log10 g2` units.
pub fn write_history_csv(history: &TrainHistory, path: &Path) -> Result<(), MlpError> {
    let io = |e: std::io::Error| MlpError::Io(format!("{}: {e}", path.display()));
    let mut w = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    writeln!(w, "iter,train_mse,test_mse,val_mse,lambda,rejected").map_err(io)?;
    for r in &history.records {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.iteration, r.train_mse, r.test_mse, r.val_mse, r.lambda, r.rejected
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
