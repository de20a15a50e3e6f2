use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::{hermiticity_deviation, EffectiveParams, HilbertDims, OperatorSet, QuantumError};
use crate::c64;

const HERMITICITY_TOL: f64 = 1e-9;

/// Sparse Lindblad superoperator acting on column-major `vec(rho)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dims: HilbertDims,
    matrix: SparseColMat<usize, c64>,
    max_abs: f64,
}

fn nonzeros(m: &Mat<c64>) -> Vec<(usize, usize, c64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v.re != 0.0 || v.im != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Accumulates triplets of `coef * vec(A rho B) = coef * (B^T ⊗ A) vec(rho)`.
struct TermBuilder {
    d: usize,
    triplets: Vec<Triplet<usize, usize, c64>>,
}

impl TermBuilder {
    fn sandwich(&mut self, left: &[(usize, usize, c64)], right: &[(usize, usize, c64)], coef: c64) {
        for &(i, k, x) in left {
            for &(l, j, y) in right {
                self.triplets
                    .push(Triplet::new(i + self.d * j, k + self.d * l, coef * x * y));
            }
        }
    }
}

impl Liouvillian {
    /// General Lindblad form `-i[H, rho] + sum_k r_k (C_k rho C_k^dag - {C_k^dag C_k, rho}/2)`.
    pub fn from_lindblad(
        dims: HilbertDims,
        h: &Mat<c64>,
        jumps: &[(f64, &Mat<c64>)],
    ) -> Result<Self, QuantumError> {
        let d = dims.dim();
        if h.nrows() != d || h.ncols() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: h.nrows(),
            });
        }
        let deviation = hermiticity_deviation(h);
        if deviation > HERMITICITY_TOL {
            return Err(QuantumError::NonHermitian { deviation });
        }
        let id: Vec<_> = (0..d).map(|i| (i, i, c64::new(1.0, 0.0))).collect();
        let mut tb = TermBuilder {
            d,
            triplets: Vec::new(),
        };

        let h_nz = nonzeros(h);
        tb.sandwich(&h_nz, &id, c64::new(0.0, -1.0));
        tb.sandwich(&id, &h_nz, c64::new(0.0, 1.0));

        for &(rate, c) in jumps {
            if rate == 0.0 {
                continue;
            }
            if c.nrows() != d || c.ncols() != d {
                return Err(QuantumError::DimensionMismatch {
                    expected: d,
                    found: c.nrows(),
                });
            }
            let c_dag = c.adjoint().to_owned();
            let cdc = &c_dag * c;
            let (c_nz, cd_nz, cdc_nz) = (nonzeros(c), nonzeros(&c_dag), nonzeros(&cdc));
            tb.sandwich(&c_nz, &cd_nz, c64::new(rate, 0.0));
            tb.sandwich(&cdc_nz, &id, c64::new(-0.5 * rate, 0.0));
            tb.sandwich(&id, &cdc_nz, c64::new(-0.5 * rate, 0.0));
        }

        let n = dims.liouville_dim();
        let matrix = SparseColMat::try_new_from_triplets(n, n, &tb.triplets)
            .map_err(|e| QuantumError::Linalg(format!("{e:?}")))?;
        let max_abs = matrix
            .val()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.norm()));
        Ok(Self {
            dims,
            matrix,
            max_abs,
        })
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    /// Liouville-space dimension `D^2`.
    pub fn size(&self) -> usize {
        self.dims.liouville_dim()
    }

    pub fn matrix(&self) -> &SparseColMat<usize, c64> {
        &self.matrix
    }

    /// `‖L‖_max`, the largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn nnz(&self) -> usize {
        self.matrix.val().len()
    }

    /// `out = L x`.
    pub fn apply_into(&self, x: &[c64], out: &mut [c64]) {
        let n = self.size();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        out.iter_mut().for_each(|v| *v = c64::new(0.0, 0.0));
        let sym = self.matrix.symbolic();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        let val = self.matrix.val();
        for col in 0..n {
            let xc = x[col];
            if xc.re == 0.0 && xc.im == 0.0 {
                continue;
            }
            for p in col_ptr[col]..col_ptr[col + 1] {
                out[row_idx[p]] += val[p] * xc;
            }
        }
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let mut out = vec![c64::new(0.0, 0.0); self.size()];
        self.apply_into(x, &mut out);
        out
    }

    /// `unvec(L vec(rho))`.
    pub fn apply_to_matrix(&self, rho: &Mat<c64>) -> Mat<c64> {
        let d = self.dims.dim();
        let out = self.apply(&vectorize(rho));
        unvectorize(&out, d)
    }

    pub fn to_dense(&self) -> Mat<c64> {
        self.matrix.to_dense()
    }

    /// Column-wise triplets, used to assemble derived systems.
    pub(crate) fn triplets(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        let sym = self.matrix.symbolic();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        let val = self.matrix.val();
        (0..self.size()).flat_map(move |col| {
            (col_ptr[col]..col_ptr[col + 1]).map(move |p| (row_idx[p], col, val[p]))
        })
    }
}

/// Column-major vectorization.
pub fn vectorize(rho: &Mat<c64>) -> Vec<c64> {
    let d = rho.nrows();
    let mut v = Vec::with_capacity(d * rho.ncols());
    for j in 0..rho.ncols() {
        for i in 0..d {
            v.push(rho[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[c64], d: usize) -> Mat<c64> {
    assert_eq!(v.len(), d * d);
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}

/// Lindblad superoperator with the cavity decay at rate `kappa`, mechanical
/// damping at `gamma (n_th + 1)` and thermal pumping at `gamma n_th`.
pub fn build_liouvillian(
    h: &Mat<c64>,
    params: &EffectiveParams,
    ops: &OperatorSet,
) -> Result<Liouvillian, QuantumError> {
    params.validate()?;
    Liouvillian::from_lindblad(
        ops.dims,
        h,
        &[
            (params.kappa, &ops.a),
            (params.gamma * (params.n_th + 1.0), &ops.b),
            (params.gamma * params.n_th, &ops.b_dag),
        ],
    )
}
