use thiserror::Error;

use super::HilbertDims;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("truncation too small: n_cav = {n_cav} (need >= 2), n_mech = {n_mech} (need >= 3)")]
    DimensionTooSmall { n_cav: usize, n_mech: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Hamiltonian is not Hermitian (max |H - H^dag| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("steady state is not unique: {0}")]
    DegenerateNullSpace(String),

    #[error("steady-state residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("steady state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid time stepping: {0}")]
    InvalidTimeStep(String),

    #[error("integration unstable at t = {time}: trace drift {drift:e}; retry with a smaller dt")]
    Unstable { time: f64, drift: f64 },

    #[error("vacuum mechanical mode: <b^dag b> = {n_b:e} is below 1e-12, g2 is undefined")]
    VacuumMechanicalMode { n_b: f64 },

    #[error("negative occupation {name} = {value:e}")]
    NegativeOccupation { name: &'static str, value: f64 },

    #[error("truncation did not converge up to {last}: last relative change in g2 {rel_change:e}")]
    NotConverged { last: HilbertDims, rel_change: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}
