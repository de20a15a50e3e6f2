//! Slow reference implementations for cross-checking the fast paths.
//!
//! Nothing here reuses the operator, Hamiltonian or steady-state code from
//! [`crate::quantum`]; shared inputs are parameters and the assembled
//! Liouvillian only.

use faer::Mat;

use crate::c64;
use crate::quantum::{DensityMatrix, EffectiveParams, HilbertDims, Liouvillian, QuantumError};

/// Relative window for the null eigenvalue: `|lambda| <= tol * ‖L‖_max`.
pub const EIG_NULL_TOL: f64 = 1e-8;
/// Few-level estimates assume `eps <= 0.01 kappa`.
pub const FEW_LEVEL_MAX_DRIVE: f64 = 0.01;

/// Steady state from the dense eigendecomposition of `L`.
pub fn eig_steady_state(l: &Liouvillian) -> Result<DensityMatrix, QuantumError> {
    let dims = l.dims();
    let d = dims.dim();
    let dense = l.to_dense();
    let scale = l.max_abs();
    let evd = dense
        .eigen()
        .map_err(|e| QuantumError::Linalg(format!("{e:?}")))?;
    let values = evd.S().column_vector();
    let mut order: Vec<usize> = (0..values.nrows()).collect();
    order.sort_by(|&i, &j| values[i].norm().total_cmp(&values[j].norm()));
    let bound = EIG_NULL_TOL * scale.max(f64::MIN_POSITIVE);
    let nearest = values[order[0]].norm();
    if nearest > bound {
        return Err(QuantumError::DegenerateNullSpace(format!(
            "smallest |eigenvalue| {nearest:e} exceeds {bound:e}"
        )));
    }
    if order.len() > 1 && values[order[1]].norm() <= bound {
        return Err(QuantumError::DegenerateNullSpace(format!(
            "two eigenvalues within {bound:e} of zero"
        )));
    }
    let u = evd.U();
    let k = order[0];
    let mut rho = Mat::<c64>::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] = u[(i + d * j, k)];
        }
    }
    // The eigenvector phase is arbitrary; rotating by the trace phase first
    // keeps the Hermitian part from cancelling.
    let tr: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    if tr.norm() == 0.0 {
        return Err(QuantumError::DegenerateNullSpace(
            "null vector has zero trace".into(),
        ));
    }
    let phase = tr.conj() / tr.norm();
    let mut herm = Mat::<c64>::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            herm[(i, j)] = (rho[(i, j)] * phase + (rho[(j, i)] * phase).conj()) * 0.5;
        }
    }
    let tr: f64 = (0..d).map(|i| herm[(i, i)].re).sum();
    for j in 0..d {
        for i in 0..d {
            herm[(i, j)] /= tr;
        }
    }
    DensityMatrix::new(herm, dims)
}

/// Steady amplitudes on `{|00>, |10>, |01>, |02>}` with `c00 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FewLevelAmplitudes {
    pub c00: c64,
    pub c10: c64,
    pub c01: c64,
    pub c02: c64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FewLevelEstimate {
    pub amplitudes: FewLevelAmplitudes,
    /// `2 |c02|^2 / |c01|^4`
    pub g2: f64,
    pub regime_warning: Option<String>,
}

/// Lowest-order amplitudes under the non-Hermitian effective Hamiltonian.
///
/// `c01` comes from the direct mechanical drive; `c10` and `c02` are coupled
/// through `J` and solved together.
pub fn few_level_amplitudes(p: &EffectiveParams) -> FewLevelAmplitudes {
    let s2 = std::f64::consts::SQRT_2;
    let e10 = c64::new(p.delta_a, -p.kappa / 2.0);
    let e01 = c64::new(p.delta_b, -p.gamma / 2.0);
    let e02 = c64::new(2.0 * p.delta_b, -p.gamma);
    let j = p.coupling;

    // 0 = e01 c01 + eps_b
    let c01 = -c64::new(p.eps_b, 0.0) / e01;
    // 0 = e10 c10 + sqrt2 J* c02 + eps_a
    // 0 = e02 c02 + sqrt2 J c10 + sqrt2 eps_b c01
    let a11 = e10;
    let a12 = j.conj() * s2;
    let a21 = j * s2;
    let a22 = e02;
    let r1 = -c64::new(p.eps_a, 0.0);
    let r2 = -(c01 * p.eps_b * s2);
    let det = a11 * a22 - a12 * a21;
    let c10 = (r1 * a22 - a12 * r2) / det;
    let c02 = (a11 * r2 - a21 * r1) / det;
    FewLevelAmplitudes {
        c00: c64::new(1.0, 0.0),
        c10,
        c01,
        c02,
    }
}

pub fn few_level_g2(p: &EffectiveParams) -> FewLevelEstimate {
    let amplitudes = few_level_amplitudes(p);
    let n1 = amplitudes.c01.norm_sqr();
    let g2 = if n1 > 0.0 {
        2.0 * amplitudes.c02.norm_sqr() / (n1 * n1)
    } else {
        f64::NAN
    };
    let limit = FEW_LEVEL_MAX_DRIVE * p.kappa;
    let regime_warning = if p.eps_a.abs() > limit || p.eps_b.abs() > limit {
        Some(format!(
            "weak-drive estimate outside its regime: eps_a = {}, eps_b = {} (limit {limit})",
            p.eps_a, p.eps_b
        ))
    } else {
        None
    };
    FewLevelEstimate {
        amplitudes,
        g2,
        regime_warning,
    }
}

/// Central differences `(f(theta + h e_i) - f(theta - h e_i)) / 2h`.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut work = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            work[k] = theta[k] + h;
            let up = f(&work);
            work[k] = theta[k] - h;
            let down = f(&work);
            work[k] = theta[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dense_ops(dims: HilbertDims) -> (Mat<c64>, Mat<c64>) {
    let d = dims.dim();
    let mut a = Mat::<c64>::zeros(d, d);
    let mut b = Mat::<c64>::zeros(d, d);
    for m in 0..dims.n_cav {
        for n in 0..dims.n_mech {
            let col = m * dims.n_mech + n;
            if m > 0 {
                a[((m - 1) * dims.n_mech + n, col)] = c64::new((m as f64).sqrt(), 0.0);
            }
            if n > 0 {
                b[(m * dims.n_mech + n - 1, col)] = c64::new((n as f64).sqrt(), 0.0);
            }
        }
    }
    (a, b)
}

fn dag(x: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(x.ncols(), x.nrows(), |i, j| x[(j, i)].conj())
}

fn mul(x: &Mat<c64>, y: &Mat<c64>) -> Mat<c64> {
    let n = x.nrows();
    let k = x.ncols();
    let m = y.ncols();
    Mat::from_fn(n, m, |i, j| (0..k).map(|l| x[(i, l)] * y[(l, j)]).sum())
}

/// Direct evaluation of the master-equation right-hand side on a dense `rho`.
pub fn dense_lindblad_rhs(p: &EffectiveParams, dims: HilbertDims, rho: &Mat<c64>) -> Mat<c64> {
    let d = dims.dim();
    let (a, b) = dense_ops(dims);
    let ad = dag(&a);
    let bd = dag(&b);
    let b2 = mul(&b, &b);
    let bd2 = mul(&bd, &bd);
    let na = mul(&ad, &a);
    let nb = mul(&bd, &b);
    let term1 = mul(&a, &bd2);
    let term2 = mul(&ad, &b2);
    let h = Mat::from_fn(d, d, |i, j| {
        na[(i, j)] * p.delta_a
            + nb[(i, j)] * p.delta_b
            + term1[(i, j)] * p.coupling
            + term2[(i, j)] * p.coupling.conj()
            + (ad[(i, j)] + a[(i, j)]) * p.eps_a
            + (bd[(i, j)] + b[(i, j)]) * p.eps_b
    });
    let i_unit = c64::new(0.0, 1.0);
    let hr = mul(&h, rho);
    let rh = mul(rho, &h);
    let mut out = Mat::from_fn(d, d, |r, c| -i_unit * (hr[(r, c)] - rh[(r, c)]));
    let jumps = [
        (p.kappa, a.clone()),
        (p.gamma * (p.n_th + 1.0), b.clone()),
        (p.gamma * p.n_th, bd.clone()),
    ];
    for (rate, op) in jumps.iter() {
        if *rate == 0.0 {
            continue;
        }
        let opd = dag(op);
        let sandwich = mul(&mul(op, rho), &opd);
        let n_op = mul(&opd, op);
        let left = mul(&n_op, rho);
        let right = mul(rho, &n_op);
        for c in 0..d {
            for r in 0..d {
                out[(r, c)] += (sandwich[(r, c)] - (left[(r, c)] + right[(r, c)]) * 0.5) * *rate;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        build_hamiltonian, build_liouvillian, build_operators, max_abs_diff, solve_point,
        steady_state,
    };

    fn liouvillian(p: &EffectiveParams, dims: HilbertDims) -> Liouvillian {
        let ops = build_operators(dims).unwrap();
        let h = build_hamiltonian(p, &ops).unwrap();
        build_liouvillian(&h, p, &ops).unwrap()
    }

    #[test]
    fn fd_exact_on_polynomials() {
        let lin = |t: &[f64]| 3.0 * t[0] - 2.0 * t[1] + 0.5 * t[2];
        for h in [1e-3, 0.5, 2.0] {
            let g = fd_gradient(lin, &[1.0, -4.0, 7.0], h);
            assert!(
                (g[0] - 3.0).abs() < 1e-12
                    && (g[1] + 2.0).abs() < 1e-12
                    && (g[2] - 0.5).abs() < 1e-12
            );
        }
        let quad = |t: &[f64]| t[0] * t[0] + 3.0 * t[0] * t[1] - t[1] * t[1];
        for h in [1e-2, 1.0, 3.0] {
            let g = fd_gradient(quad, &[2.0, 1.0], h);
            assert!((g[0] - 7.0).abs() < 1e-10, "{g:?}");
            assert!((g[1] - 4.0).abs() < 1e-10, "{g:?}");
        }
    }

    #[test]
    #[should_panic]
    fn fd_rejects_zero_step() {
        fd_gradient(|t| t[0], &[1.0], 0.0);
    }

    #[test]
    fn eig_thermal_populations() {
        let dims = HilbertDims::new(2, 8).unwrap();
        let p = EffectiveParams {
            delta_a: 0.0,
            delta_b: 0.0,
            coupling: c64::new(0.0, 0.0),
            eps_a: 0.0,
            eps_b: 0.0,
            kappa: 1.0,
            gamma: 0.01,
            n_th: 0.2,
        };
        let rho = eig_steady_state(&liouvillian(&p, dims)).unwrap();
        // Truncated geometric distribution with ratio n/(n+1).
        let r = p.n_th / (p.n_th + 1.0);
        let z: f64 = (0..8).map(|k| r.powi(k)).sum();
        for k in 0..8 {
            let expect = r.powi(k as i32) / z;
            assert!((rho.population(0, k) - expect).abs() < 1e-9, "n={k}");
            assert!(rho.population(1, k).abs() < 1e-9);
        }
    }

    #[test]
    fn eig_matches_direct_solver() {
        let dims = HilbertDims::new(3, 5).unwrap();
        let p = EffectiveParams::sweep_point(0.0, 0.2, 0.002, 0.002);
        let l = liouvillian(&p, dims);
        let a = eig_steady_state(&l).unwrap();
        let b = steady_state(&l).unwrap();
        assert!(
            max_abs_diff(&a.rho, &b.rho) < 1e-8,
            "{}",
            max_abs_diff(&a.rho, &b.rho)
        );
    }

    #[test]
    fn eig_rejects_zero_liouvillian() {
        let dims = HilbertDims::new(2, 3).unwrap();
        let d = dims.dim();
        let h = Mat::<c64>::zeros(d, d);
        let l = Liouvillian::from_lindblad(dims, &h, &[]).unwrap();
        assert!(matches!(
            eig_steady_state(&l),
            Err(QuantumError::DegenerateNullSpace(_))
        ));
    }

    #[test]
    fn few_level_coherent_limit() {
        let mut p = EffectiveParams::sweep_point(0.03, 0.0, 0.002, 0.002);
        p.n_th = 0.0;
        let est = few_level_g2(&p);
        assert!((est.g2 - 1.0).abs() < 1e-12, "{}", est.g2);
        assert!(est.regime_warning.is_none());
    }

    #[test]
    fn few_level_ladder_only_without_optical_drive() {
        let p = EffectiveParams::sweep_point(0.01, 0.2, 0.0, 0.002);
        let amp = few_level_amplitudes(&p);
        // c10 is fed only through |02> when eps_a = 0.
        let s2 = std::f64::consts::SQRT_2;
        let e10 = c64::new(p.delta_a, -0.5);
        assert!((amp.c10 + amp.c02 * p.coupling.conj() * s2 / e10).norm() < 1e-15);
        assert!(amp.c00.norm() == 1.0 && amp.c01.norm() > amp.c02.norm());
    }

    #[test]
    fn few_level_regime_warning() {
        let p = EffectiveParams::sweep_point(0.0, 0.2, 0.05, 0.002);
        assert!(few_level_g2(&p).regime_warning.is_some());
    }

    #[test]
    fn few_level_minimum_matches_full_solver() {
        let dims = HilbertDims::new(4, 8).unwrap();
        let grid: Vec<f64> = (0..41).map(|k| -0.02 + 0.001 * k as f64).collect();
        let argmin = |vals: &[f64]| {
            let mut best = 0;
            for (k, v) in vals.iter().enumerate() {
                if *v < vals[best] {
                    best = k;
                }
            }
            grid[best]
        };
        let few: Vec<f64> = grid
            .iter()
            .map(|&dl| few_level_g2(&EffectiveParams::sweep_point(dl, 0.2, 0.002, 0.002)).g2)
            .collect();
        let full: Vec<f64> = grid
            .iter()
            .map(|&dl| {
                solve_point(&EffectiveParams::sweep_point(dl, 0.2, 0.002, 0.002), dims)
                    .unwrap()
                    .1
                    .g2b
            })
            .collect();
        let (a, b) = (argmin(&few), argmin(&full));
        assert!(
            (a - b).abs() <= 0.1 * 0.04 + 1e-12,
            "few-level min at {a}, full at {b}"
        );
        // Magnitudes only agree once eps_b << gamma keeps |c01| small.
        let mut weak = EffectiveParams::sweep_point(0.0, 0.2, 2e-5, 2e-5);
        weak.n_th = 0.0;
        let ratio = few_level_g2(&weak).g2 / solve_point(&weak, dims).unwrap().1.g2b;
        assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
    }

    #[test]
    fn dense_rhs_matches_sparse_liouvillian() {
        let dims = HilbertDims::new(3, 4).unwrap();
        let p = EffectiveParams {
            delta_a: 0.07,
            delta_b: -0.03,
            coupling: c64::new(0.2, -0.1),
            eps_a: 0.004,
            eps_b: 0.002,
            kappa: 1.0,
            gamma: 0.01,
            n_th: 0.05,
        };
        let d = dims.dim();
        let rho = Mat::from_fn(d, d, |i, j| {
            c64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64)
        });
        let l = liouvillian(&p, dims);
        let fast = l.apply_to_matrix(&rho);
        let slow = dense_lindblad_rhs(&p, dims, &rho);
        assert!(
            max_abs_diff(&fast, &slow) < 1e-12,
            "{}",
            max_abs_diff(&fast, &slow)
        );
    }
}
