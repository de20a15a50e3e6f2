//! Laboratory parameters to effective-model parameters.
//!
//! The strong drive `Omega_L` displaces the cavity by the steady amplitude
//! `alpha = 2 Omega_L / (-2 Delta_c + i kappa)`; the quadratic coupling `g`
//! then yields `J = g alpha`, `Delta_a = Delta_c - delta_a` and
//! `Delta_b = omega_m + 2 g |alpha|^2 + g - omega_b`. The mechanical
//! displacement is taken as zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::c64;
use crate::quantum::EffectiveParams;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J / K.
pub const K_B: f64 = 1.380_649e-23;

const STRONG_DRIVE_MIN_RATIO: f64 = 10.0;
const WEAK_DRIVE_MAX_RATIO: f64 = 0.1;
const DETUNING_MAX_RATIO: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EffectiveError {
    #[error("{name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("bath temperature must be >= 0 (got {0} K)")]
    NegativeTemperature(f64),
    #[error("exactly one of P and Omega_L must be given")]
    DriveSpecification,
    #[error("lab config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("lab config: {0}")]
    Io(String),
}

/// Strong-drive specification: input power or the amplitude itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    /// Input power in W.
    Power(f64),
    /// Complex amplitude in rad/s.
    Amplitude(c64),
}

/// Laboratory-frame parameters in SI units (angular frequencies in rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabParams {
    pub omega_c: f64,
    pub omega_m: f64,
    pub omega_l: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub drive: Drive,
    pub eps_a: f64,
    pub eps_b: f64,
    pub t_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub strong_drive_ok: bool,
    /// `|Omega_L| / max(kappa, gamma)`
    pub strong_drive_margin: f64,
    pub weak_drive_ok: bool,
    /// `(eps_a / kappa, eps_b / kappa)`
    pub weak_drive_margins: (f64, f64),
    pub detuning_ok: bool,
    /// `(|Delta_a| / omega_m, |Delta_b| / omega_m)`
    pub detuning_margins: (f64, f64),
    pub warnings: Vec<String>,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.strong_drive_ok && self.weak_drive_ok && self.detuning_ok
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, EffectiveError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(EffectiveError::NonPositive { name, value })
    }
}

/// `|Omega_L| = sqrt(2 P kappa / omega_L)`. Zero power is allowed.
pub fn drive_amplitude(power: f64, kappa: f64, omega_l: f64) -> Result<f64, EffectiveError> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(EffectiveError::NonPositive {
            name: "P",
            value: power,
        });
    }
    positive("kappa", kappa)?;
    positive("omega_L", omega_l)?;
    Ok((2.0 * power * kappa / omega_l).sqrt())
}

/// Steady cavity amplitude `2 Omega_L / (-2 Delta_c + i kappa)`.
pub fn cavity_alpha(omega_l_amp: c64, delta_c: f64, kappa: f64) -> c64 {
    omega_l_amp * 2.0 / c64::new(-2.0 * delta_c, kappa)
}

/// Bose occupation `1 / (exp(hbar omega / k_B T) - 1)`; zero at `T = 0`.
pub fn thermal_occupancy(omega_m: f64, t_m: f64) -> Result<f64, EffectiveError> {
    if t_m < 0.0 || !t_m.is_finite() {
        return Err(EffectiveError::NegativeTemperature(t_m));
    }
    if t_m == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_m / (K_B * t_m);
    Ok(1.0 / x.exp_m1())
}

impl LabParams {
    pub fn validate(&self) -> Result<(), EffectiveError> {
        positive("omega_c", self.omega_c)?;
        positive("omega_m", self.omega_m)?;
        positive("omega_L", self.omega_l)?;
        positive("kappa", self.kappa)?;
        if !self.g.is_finite() {
            return Err(EffectiveError::NonPositive {
                name: "g",
                value: self.g,
            });
        }
        if self.t_m < 0.0 {
            return Err(EffectiveError::NegativeTemperature(self.t_m));
        }
        Ok(())
    }

    pub fn drive_amplitude(&self) -> Result<c64, EffectiveError> {
        match self.drive {
            Drive::Power(p) => Ok(c64::new(drive_amplitude(p, self.kappa, self.omega_l)?, 0.0)),
            Drive::Amplitude(a) => Ok(a),
        }
    }

    /// Reads flat `key = value` lines (SI units, `#` comments). Keys are the
    /// field names `omega_c omega_m omega_L omega_a omega_b g kappa gamma P
    /// Omega_L eps_a eps_b T_m`; `Omega_L` accepts a complex literal such as
    /// `3e9+1e8i`.
    pub fn from_config_str(text: &str) -> Result<Self, EffectiveError> {
        let mut values: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| EffectiveError::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), (line_no, value)).is_some() {
                return Err(EffectiveError::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        const KNOWN: [&str; 13] = [
            "omega_c", "omega_m", "omega_L", "omega_a", "omega_b", "g", "kappa", "gamma", "P",
            "Omega_L", "eps_a", "eps_b", "T_m",
        ];
        if let Some((key, (line, _))) = values.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(EffectiveError::Config {
                line: *line,
                message: format!("unknown key `{key}`"),
            });
        }
        let real = |key: &str| -> Result<f64, EffectiveError> {
            let (line, raw) = values.get(key).ok_or_else(|| EffectiveError::Config {
                line: 0,
                message: format!("missing key `{key}`"),
            })?;
            raw.parse::<f64>().map_err(|e| EffectiveError::Config {
                line: *line,
                message: format!("`{key}`: {e}"),
            })
        };
        let drive = match (values.get("P"), values.get("Omega_L")) {
            (Some(_), None) => Drive::Power(real("P")?),
            (None, Some((line, raw))) => {
                Drive::Amplitude(c64::from_str(raw).map_err(|e| EffectiveError::Config {
                    line: *line,
                    message: format!("`Omega_L`: {e:?}"),
                })?)
            }
            _ => return Err(EffectiveError::DriveSpecification),
        };
        let lab = Self {
            omega_c: real("omega_c")?,
            omega_m: real("omega_m")?,
            omega_l: real("omega_L")?,
            omega_a: real("omega_a")?,
            omega_b: real("omega_b")?,
            g: real("g")?,
            kappa: real("kappa")?,
            gamma: real("gamma")?,
            drive,
            eps_a: real("eps_a")?,
            eps_b: real("eps_b")?,
            t_m: real("T_m")?,
        };
        lab.validate()?;
        Ok(lab)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, EffectiveError> {
        let text = fs::read_to_string(path)
            .map_err(|e| EffectiveError::Io(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }
}

/// Maps lab parameters to `kappa`-normalized effective parameters and
/// checks the approximations behind the effective Hamiltonian.
pub fn effective_params(
    lab: &LabParams,
) -> Result<(EffectiveParams, ValidityReport), EffectiveError> {
    lab.validate()?;
    let omega_drive = lab.drive_amplitude()?;
    let delta_c = lab.omega_c - lab.omega_l;
    let detune_a = lab.omega_a - lab.omega_l;
    let alpha = cavity_alpha(omega_drive, delta_c, lab.kappa);
    let coupling = alpha * lab.g;
    let delta_a = delta_c - detune_a;
    let delta_b = lab.omega_m + 2.0 * lab.g * alpha.norm_sqr() + lab.g - lab.omega_b;
    let n_th = thermal_occupancy(lab.omega_m, lab.t_m)?;

    let k = lab.kappa;
    let params = EffectiveParams {
        delta_a: delta_a / k,
        delta_b: delta_b / k,
        coupling: coupling / k,
        eps_a: lab.eps_a / k,
        eps_b: lab.eps_b / k,
        kappa: 1.0,
        gamma: lab.gamma / k,
        n_th,
    };

    let strong_drive_margin = omega_drive.norm() / lab.kappa.max(lab.gamma);
    let weak_drive_margins = (lab.eps_a.abs() / k, lab.eps_b.abs() / k);
    let detuning_margins = (delta_a.abs() / lab.omega_m, delta_b.abs() / lab.omega_m);
    let strong_drive_ok = strong_drive_margin >= STRONG_DRIVE_MIN_RATIO;
    let weak_drive_ok = weak_drive_margins.0 <= WEAK_DRIVE_MAX_RATIO
        && weak_drive_margins.1 <= WEAK_DRIVE_MAX_RATIO;
    let detuning_ok =
        detuning_margins.0 <= DETUNING_MAX_RATIO && detuning_margins.1 <= DETUNING_MAX_RATIO;

    let mut warnings = Vec::new();
    if !strong_drive_ok {
        warnings.push(format!(
            "strong drive too weak: |Omega_L|/max(kappa, gamma) = {strong_drive_margin:.3e} < {STRONG_DRIVE_MIN_RATIO}"
        ));
    }
    if !weak_drive_ok {
        warnings.push(format!(
            "weak drives not weak: eps_a/kappa = {:.3e}, eps_b/kappa = {:.3e} (limit {WEAK_DRIVE_MAX_RATIO})",
            weak_drive_margins.0, weak_drive_margins.1
        ));
    }
    if !detuning_ok {
        warnings.push(format!(
            "detunings not small: |Delta_a|/omega_m = {:.3e}, |Delta_b|/omega_m = {:.3e} (limit {DETUNING_MAX_RATIO})",
            detuning_margins.0, detuning_margins.1
        ));
    }
    let report = ValidityReport {
        strong_drive_ok,
        strong_drive_margin,
        weak_drive_ok,
        weak_drive_margins,
        detuning_ok,
        detuning_margins,
        warnings,
    };
    Ok((params, report))
}
