use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Dataset, DatasetError, Features, Provenance, Sample};
use crate::c64;
use crate::quantum::{EffectiveParams, HilbertDims};

pub const CSV_HEADER: &str = "delta,J_re,J_im,eps_a,eps_b,gamma,n_th,n_cav,n_mech,p,q,n_c,log10_g2";

/// `data.csv` -> `data.provenance.json`.
pub fn provenance_path(csv: &Path) -> PathBuf {
    csv.with_extension("provenance.json")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::Io(format!("{}: {e}", path.display()))
}

/// Writes the CSV (17 significant digits) and, when the dataset carries
/// provenance, the JSON sidecar next to it.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<(), DatasetError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for s in &ds.samples {
            let p = &s.params;
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.delta_a,
                p.coupling.re,
                p.coupling.im,
                p.eps_a,
                p.eps_b,
                p.gamma,
                p.n_th,
                s.dims_used.n_cav,
                s.dims_used.n_mech,
                s.x.p,
                s.x.q,
                s.x.n_c,
                s.y
            )?;
        }
        w.flush()
    };
    emit().map_err(|e| io_err(path, e))?;
    if let Some(prov) = &ds.provenance {
        let side = provenance_path(path);
        let json = serde_json::to_string_pretty(prov).map_err(|e| io_err(&side, e))?;
        fs::write(&side, json + "\n").map_err(|e| io_err(&side, e))?;
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Dataset, DatasetError> {
    let malformed = |line: u64, message: String| DatasetError::Malformed {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let header = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    let got: Vec<&str> = header.iter().collect();
    let want: Vec<&str> = CSV_HEADER.split(',').collect();
    if got != want {
        return Err(malformed(
            1,
            format!("header `{}` differs from `{CSV_HEADER}`", got.join(",")),
        ));
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let real = |k: usize| -> Result<f64, DatasetError> {
            let raw = record[k].trim();
            let v: f64 = raw.parse().map_err(|_| {
                malformed(
                    line,
                    format!("column `{}`: `{raw}` is not a number", want[k]),
                )
            })?;
            if !v.is_finite() {
                return Err(malformed(
                    line,
                    format!("column `{}` is not finite", want[k]),
                ));
            }
            Ok(v)
        };
        let int = |k: usize| -> Result<usize, DatasetError> {
            let raw = record[k].trim();
            raw.parse().map_err(|_| {
                malformed(
                    line,
                    format!("column `{}`: `{raw}` is not an integer", want[k]),
                )
            })
        };
        let delta = real(0)?;
        let params = EffectiveParams {
            delta_a: delta,
            delta_b: delta,
            coupling: c64::new(real(1)?, real(2)?),
            eps_a: real(3)?,
            eps_b: real(4)?,
            kappa: 1.0,
            gamma: real(5)?,
            n_th: real(6)?,
        };
        params
            .validate()
            .map_err(|e| malformed(line, e.to_string()))?;
        let dims_used =
            HilbertDims::new(int(7)?, int(8)?).map_err(|e| malformed(line, e.to_string()))?;
        let x = Features {
            p: real(9)?,
            q: real(10)?,
            n_c: real(11)?,
        };
        if x.n_c < 0.0 {
            return Err(malformed(line, format!("n_c = {} is negative", x.n_c)));
        }
        samples.push(Sample {
            params,
            x,
            y: real(12)?,
            dims_used,
        });
    }
    let side = provenance_path(path);
    let provenance = if side.exists() {
        let text = fs::read_to_string(&side).map_err(|e| io_err(&side, e))?;
        Some(serde_json::from_str::<Provenance>(&text).map_err(|e| io_err(&side, e))?)
    } else {
        None
    };
    Ok(Dataset {
        samples,
        provenance,
        ..Dataset::default()
    })
}
