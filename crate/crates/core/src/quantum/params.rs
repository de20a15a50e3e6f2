use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::c64;

/// Parameters of the effective Hamiltonian and the dissipators, all rates
/// and frequencies expressed in units of the cavity decay `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// Cavity detuning.
    pub delta_a: f64,
    /// Mechanical detuning.
    pub delta_b: f64,
    /// Effective nonlinear coupling `J` of the `a b^dag^2` term.
    pub coupling: c64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
}

impl EffectiveParams {
    pub const CANONICAL_GAMMA: f64 = 0.001515;
    pub const CANONICAL_N_TH: f64 = 1e-3;
    pub const CANONICAL_EPS_A: f64 = 0.002;

    /// The blockade working point used throughout the figures:
    /// `Delta = 0`, `J = 0.2`, `eps_a = eps_b = 0.002`, `gamma = 0.001515`,
    /// `n_th = 1e-3`.
    pub fn canonical() -> Self {
        Self {
            delta_a: 0.0,
            delta_b: 0.0,
            coupling: c64::new(0.2, 0.0),
            eps_a: Self::CANONICAL_EPS_A,
            eps_b: 0.002,
            kappa: 1.0,
            gamma: Self::CANONICAL_GAMMA,
            n_th: Self::CANONICAL_N_TH,
        }
    }

    /// Sweep point with a common detuning `Delta = Delta_a = Delta_b` and the
    /// canonical dissipation.
    pub fn sweep_point(delta: f64, coupling: f64, eps_a: f64, eps_b: f64) -> Self {
        Self {
            delta_a: delta,
            delta_b: delta,
            coupling: c64::new(coupling, 0.0),
            eps_a,
            eps_b,
            ..Self::canonical()
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta_a = delta;
        self.delta_b = delta;
        self
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let all = [
            self.delta_a,
            self.delta_b,
            self.coupling.re,
            self.coupling.im,
            self.eps_a,
            self.eps_b,
            self.kappa,
            self.gamma,
            self.n_th,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(QuantumError::InvalidParams("non-finite parameter".into()));
        }
        if self.kappa <= 0.0 {
            return Err(QuantumError::InvalidParams(format!(
                "kappa = {} must be > 0",
                self.kappa
            )));
        }
        if self.gamma <= 0.0 {
            return Err(QuantumError::InvalidParams(format!(
                "gamma = {} must be > 0",
                self.gamma
            )));
        }
        if self.n_th < 0.0 {
            return Err(QuantumError::InvalidParams(format!(
                "n_th = {} must be >= 0",
                self.n_th
            )));
        }
        Ok(())
    }

    /// Rescales every rate and frequency so that `kappa == 1`.
    pub fn normalized(&self) -> Self {
        let k = self.kappa;
        Self {
            delta_a: self.delta_a / k,
            delta_b: self.delta_b / k,
            coupling: self.coupling / k,
            eps_a: self.eps_a / k,
            eps_b: self.eps_b / k,
            kappa: 1.0,
            gamma: self.gamma / k,
            n_th: self.n_th,
        }
    }
}

impl Default for EffectiveParams {
    fn default() -> Self {
        Self::canonical()
    }
}
