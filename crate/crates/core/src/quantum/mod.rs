//! Truncated two-mode open quantum system: cavity mode `a`, mechanical mode `b`.
//!
//! Basis ordering is `|m n>` with the cavity index `m` major, i.e. the joint
//! index is `m * n_mech + n`. Superoperators act on column-major `vec(rho)`,
//! where element `rho[(i, j)]` sits at `i + D * j`.

mod convergence;
mod error;
mod hamiltonian;
mod liouvillian;
mod observables;
mod operators;
mod params;
mod solver;
mod state;

pub use convergence::{converge_dims, ConvergenceOptions};
pub use error::QuantumError;
pub use hamiltonian::build_hamiltonian;
pub use liouvillian::{build_liouvillian, unvectorize, vectorize, Liouvillian};
pub use observables::{observables, Observables, VACUUM_THRESHOLD};
pub use operators::{build_operators, HilbertDims, OperatorSet};
pub use params::EffectiveParams;
pub use solver::{default_time_step, evolve, steady_state, STEADY_RESIDUAL_FACTOR};
pub use state::DensityMatrix;

use faer::Mat;

use crate::c64;

/// Solves one parameter point end to end: operators, Hamiltonian,
/// Liouvillian, steady state and observables.
pub fn solve_point(
    params: &EffectiveParams,
    dims: HilbertDims,
) -> Result<(DensityMatrix, Observables), QuantumError> {
    let ops = build_operators(dims)?;
    let h = build_hamiltonian(params, &ops)?;
    let l = build_liouvillian(&h, params, &ops)?;
    let rho = steady_state(&l)?;
    let obs = observables(&rho, &ops)?;
    Ok((rho, obs))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs(a: &Mat<c64>) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// `‖A − A†‖_max`.
pub fn hermiticity_deviation(a: &Mat<c64>) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}
