use serde::{Deserialize, Serialize};

use super::{DensityMatrix, OperatorSet, QuantumError};
use crate::c64;

/// Below this mechanical occupation `g2` is not evaluated.
pub const VACUUM_THRESHOLD: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-10;

/// Steady-state expectation values: the optical detector inputs and the
/// mechanical correlation label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    /// `<a^dag a>`
    pub n_c: f64,
    /// `<(a + a^dag)/sqrt 2>`
    pub q: f64,
    /// `<(a - a^dag)/(sqrt 2 i)>`
    pub p: f64,
    /// `<b^dag b>`
    pub n_b: f64,
    /// `<b^dag b^dag b b> / <b^dag b>^2`
    pub g2b: f64,
}

impl Observables {
    pub fn log10_g2b(&self) -> f64 {
        self.g2b.log10()
    }
}

fn clamp_occupation(name: &'static str, value: f64) -> Result<f64, QuantumError> {
    if value < -CLAMP_TOL {
        return Err(QuantumError::NegativeOccupation { name, value });
    }
    Ok(value.max(0.0))
}

pub fn observables(rho: &DensityMatrix, ops: &OperatorSet) -> Result<Observables, QuantumError> {
    if rho.dims != ops.dims {
        return Err(QuantumError::DimensionMismatch {
            expected: ops.dim(),
            found: rho.dims.dim(),
        });
    }
    let a_mean = rho.expectation(&ops.a);
    let n_c = clamp_occupation("n_c", rho.expectation(&(&ops.a_dag * &ops.a)).re)?;
    let n_b = clamp_occupation("n_b", rho.expectation(&(&ops.b_dag * &ops.b)).re)?;

    // <(a + a^dag)/sqrt2> = sqrt2 Re<a>, <(a - a^dag)/(sqrt2 i)> = sqrt2 Im<a>
    let q = (a_mean + a_mean.conj()).re / 2f64.sqrt();
    let p = ((a_mean - a_mean.conj()) / c64::new(0.0, 2f64.sqrt())).re;

    if n_b < VACUUM_THRESHOLD {
        return Err(QuantumError::VacuumMechanicalMode { n_b });
    }
    let b_dag2 = &ops.b_dag * &ops.b_dag;
    let b2 = &ops.b * &ops.b;
    let pairs = rho.expectation(&(&b_dag2 * &b2)).re.max(0.0);
    Ok(Observables {
        n_c,
        q,
        p,
        n_b,
        g2b: pairs / (n_b * n_b),
    })
}
