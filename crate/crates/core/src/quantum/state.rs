use faer::{Mat, Side};

use super::{hermiticity_deviation, HilbertDims, QuantumError};
use crate::c64;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub rho: Mat<c64>,
    pub dims: HilbertDims,
}

impl DensityMatrix {
    pub fn new(rho: Mat<c64>, dims: HilbertDims) -> Result<Self, QuantumError> {
        let d = dims.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        Ok(Self { rho, dims })
    }

    /// `|00><00|`.
    pub fn vacuum(dims: HilbertDims) -> Self {
        let d = dims.dim();
        let mut rho = Mat::<c64>::zeros(d, d);
        rho[(0, 0)] = c64::new(1.0, 0.0);
        Self { rho, dims }
    }

    /// Projector onto the basis state `|m n>`.
    pub fn basis_state(dims: HilbertDims, m: usize, n: usize) -> Self {
        let d = dims.dim();
        let mut rho = Mat::<c64>::zeros(d, d);
        let i = dims.index(m, n);
        rho[(i, i)] = c64::new(1.0, 0.0);
        Self { rho, dims }
    }

    pub fn trace(&self) -> c64 {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)]).sum()
    }

    /// `Tr(op rho)`.
    pub fn expectation(&self, op: &Mat<c64>) -> c64 {
        let d = self.rho.nrows();
        let mut acc = c64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                let o = op[(i, k)];
                if o.re != 0.0 || o.im != 0.0 {
                    acc += o * self.rho[(k, i)];
                }
            }
        }
        acc
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.rho)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64, QuantumError> {
        let herm = hermitian_part(&self.rho);
        let evals = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| QuantumError::Linalg(format!("{e:?}")))?;
        Ok(evals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Diagonal entry `<m n|rho|m n>`.
    pub fn population(&self, m: usize, n: usize) -> f64 {
        let i = self.dims.index(m, n);
        self.rho[(i, i)].re
    }
}

pub(crate) fn hermitian_part(m: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    })
}
