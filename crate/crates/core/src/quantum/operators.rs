use std::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::QuantumError;
use crate::c64;

/// Fock truncation of the cavity (`n_cav` levels) and the mechanical mode
/// (`n_mech` levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertDims {
    pub n_cav: usize,
    pub n_mech: usize,
}

impl HilbertDims {
    /// The two-phonon state must fit, hence `n_mech >= 3`.
    pub fn new(n_cav: usize, n_mech: usize) -> Result<Self, QuantumError> {
        let dims = Self { n_cav, n_mech };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        if self.n_cav < 2 || self.n_mech < 3 {
            return Err(QuantumError::DimensionTooSmall {
                n_cav: self.n_cav,
                n_mech: self.n_mech,
            });
        }
        Ok(())
    }

    /// Joint Hilbert-space dimension `D`.
    pub fn dim(&self) -> usize {
        self.n_cav * self.n_mech
    }

    /// Liouville-space dimension `D^2`.
    pub fn liouville_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    /// Joint index of `|m n>`.
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.n_mech + n
    }
}

impl fmt::Display for HilbertDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n_cav, self.n_mech)
    }
}

/// Ladder operators embedded in the joint space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub dims: HilbertDims,
    pub a: Mat<c64>,
    pub a_dag: Mat<c64>,
    pub b: Mat<c64>,
    pub b_dag: Mat<c64>,
    pub id: Mat<c64>,
}

impl OperatorSet {
    pub fn dim(&self) -> usize {
        self.dims.dim()
    }
}

/// Truncated annihilation operator: `<m|a|m+1> = sqrt(m+1)`.
pub fn annihilation(levels: usize) -> Mat<c64> {
    Mat::from_fn(levels, levels, |i, j| {
        if j == i + 1 {
            c64::new((j as f64).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Kronecker product `x ⊗ y`.
pub fn kron(x: &Mat<c64>, y: &Mat<c64>) -> Mat<c64> {
    let (yr, yc) = (y.nrows(), y.ncols());
    Mat::from_fn(x.nrows() * yr, x.ncols() * yc, |r, c| {
        x[(r / yr, c / yc)] * y[(r % yr, c % yc)]
    })
}

pub fn adjoint(m: &Mat<c64>) -> Mat<c64> {
    m.adjoint().to_owned()
}

pub fn build_operators(dims: HilbertDims) -> Result<OperatorSet, QuantumError> {
    dims.validate()?;
    let id_cav = Mat::<c64>::identity(dims.n_cav, dims.n_cav);
    let id_mech = Mat::<c64>::identity(dims.n_mech, dims.n_mech);
    let a = kron(&annihilation(dims.n_cav), &id_mech);
    let b = kron(&id_cav, &annihilation(dims.n_mech));
    Ok(OperatorSet {
        dims,
        a_dag: adjoint(&a),
        b_dag: adjoint(&b),
        a,
        b,
        id: Mat::identity(dims.dim(), dims.dim()),
    })
}
