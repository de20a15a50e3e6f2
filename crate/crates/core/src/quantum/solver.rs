use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::liouvillian::{unvectorize, vectorize};
use super::state::hermitian_part;
use super::{DensityMatrix, EffectiveParams, Liouvillian, QuantumError};
use crate::c64;

/// Steady-state residual bound: `‖L vec(rho)‖_inf <= factor * ‖L‖_max`.
pub const STEADY_RESIDUAL_FACTOR: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;
const TRACE_DRIFT_TOL: f64 = 1e-6;

/// Direct sparse LU solve of `L vec(rho) = 0` with the `rho_00` equation
/// replaced by `Tr rho = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, QuantumError> {
    let dims = l.dims();
    let d = dims.dim();
    let n = l.size();

    let mut triplets: Vec<Triplet<usize, usize, c64>> = l
        .triplets()
        .filter(|&(row, _, _)| row != 0)
        .map(|(row, col, v)| Triplet::new(row, col, v))
        .collect();
    triplets.extend((0..d).map(|i| Triplet::new(0, i + d * i, c64::new(1.0, 0.0))));
    let system = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| QuantumError::Linalg(format!("{e:?}")))?;

    let lu = system.sp_lu().map_err(|e| {
        QuantumError::DegenerateNullSpace(format!("LU factorization failed: {e:?}"))
    })?;
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let x = lu.solve(&rhs);

    let v: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QuantumError::DegenerateNullSpace(
            "non-finite solution".into(),
        ));
    }
    // Any unit-trace PSD matrix has |rho_ij| <= 1; larger entries mean the
    // bordered system was (numerically) singular.
    let worst = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if worst > 1.0 + 1e-6 {
        return Err(QuantumError::DegenerateNullSpace(format!(
            "solution entry of modulus {worst:e} exceeds 1"
        )));
    }

    let mut rho = hermitian_part(&unvectorize(&v, d));
    let tr: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    rho = Mat::from_fn(d, d, |i, j| rho[(i, j)] / tr.re);

    let residual = l
        .apply(&vectorize(&rho))
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let bound = STEADY_RESIDUAL_FACTOR * l.max_abs();
    if residual > bound {
        return Err(QuantumError::ResidualTooLarge { residual, bound });
    }

    let state = DensityMatrix::new(rho, dims)?;
    let min_eigenvalue = state.min_eigenvalue()?;
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(QuantumError::NotPositive { min_eigenvalue });
    }
    Ok(state)
}

/// Default RK4 step `0.01 / max(1, |Delta|, |J|, kappa)`.
pub fn default_time_step(params: &EffectiveParams) -> f64 {
    let scale = 1f64
        .max(params.delta_a.abs())
        .max(params.delta_b.abs())
        .max(params.coupling.norm())
        .max(params.kappa);
    0.01 / scale
}

/// Fixed-step classical RK4 integration of `d vec(rho)/dt = L vec(rho)`.
///
/// The step actually used is `t_final / ceil(t_final / dt)` so the run ends
/// exactly at `t_final`.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix, QuantumError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(QuantumError::InvalidTimeStep(format!(
            "dt = {dt} must be > 0"
        )));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(QuantumError::InvalidTimeStep(format!(
            "t_final = {t_final} must be >= 0"
        )));
    }
    if rho0.dims != l.dims() {
        return Err(QuantumError::DimensionMismatch {
            expected: l.dims().dim(),
            found: rho0.dims.dim(),
        });
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }

    let d = rho0.dims.dim();
    let n = l.size();
    let steps = (t_final / dt).ceil().max(1.0) as u64;
    let h = t_final / steps as f64;
    let tr0 = rho0.trace();

    let mut x = vectorize(&rho0.rho);
    let mut k1 = vec![c64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    let trace_of = |v: &[c64]| -> c64 { (0..d).map(|i| v[i + d * i]).sum() };

    for step in 1..=steps {
        l.apply_into(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + k1[i] * (0.5 * h);
        }
        l.apply_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + k2[i] * (0.5 * h);
        }
        l.apply_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + k3[i] * h;
        }
        l.apply_into(&tmp, &mut k4);
        for i in 0..n {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if step % 256 == 0 || step == steps {
            let drift = (trace_of(&x) - tr0).norm();
            if !(drift <= TRACE_DRIFT_TOL) {
                return Err(QuantumError::Unstable {
                    time: step as f64 * h,
                    drift,
                });
            }
        }
    }
    DensityMatrix::new(unvectorize(&x, d), rho0.dims)
}
