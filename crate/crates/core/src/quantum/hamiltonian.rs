use faer::Mat;

use super::{EffectiveParams, OperatorSet, QuantumError};
use crate::c64;

/// `H = Δa a†a + Δb b†b + (J a b†² + J* a† b²) + (εa a† + εb b† + h.c.)`.
pub fn build_hamiltonian(
    params: &EffectiveParams,
    ops: &OperatorSet,
) -> Result<Mat<c64>, QuantumError> {
    let d = ops.dim();
    for m in [&ops.a, &ops.a_dag, &ops.b, &ops.b_dag] {
        if m.nrows() != d || m.ncols() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
    }
    let real = |x: f64| c64::new(x, 0.0);

    let n_a = &ops.a_dag * &ops.a;
    let n_b = &ops.b_dag * &ops.b;
    let b_dag2 = &ops.b_dag * &ops.b_dag;
    let b2 = &ops.b * &ops.b;
    let down_conv = &ops.a * &b_dag2;
    let up_conv = &ops.a_dag * &b2;

    let mut h = Mat::<c64>::zeros(d, d);
    h += faer::Scale(real(params.delta_a)) * &n_a;
    h += faer::Scale(real(params.delta_b)) * &n_b;
    h += faer::Scale(params.coupling) * &down_conv;
    h += faer::Scale(params.coupling.conj()) * &up_conv;
    h += faer::Scale(real(params.eps_a)) * &(&ops.a_dag + &ops.a);
    h += faer::Scale(real(params.eps_b)) * &(&ops.b_dag + &ops.b);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_operators, hermiticity_deviation, max_abs, HilbertDims};

    /// Matrix element `<m' n'|H|m n>` written out from the ladder rules.
    fn element(p: &EffectiveParams, (mp, np): (usize, usize), (m, n): (usize, usize)) -> c64 {
        let f = |x: usize| (x as f64).sqrt();
        let mut v = c64::new(0.0, 0.0);
        if mp == m && np == n {
            v += p.delta_a * m as f64 + p.delta_b * n as f64;
        }
        if m >= 1 && mp == m - 1 && np == n + 2 {
            v += p.coupling * f(m) * f(n + 1) * f(n + 2);
        }
        if n >= 2 && mp == m + 1 && np == n - 2 {
            v += p.coupling.conj() * f(m + 1) * f(n) * f(n - 1);
        }
        if np == n && mp == m + 1 {
            v += p.eps_a * f(m + 1);
        }
        if np == n && m >= 1 && mp == m - 1 {
            v += p.eps_a * f(m);
        }
        if mp == m && np == n + 1 {
            v += p.eps_b * f(n + 1);
        }
        if mp == m && n >= 1 && np == n - 1 {
            v += p.eps_b * f(n);
        }
        v
    }

    #[test]
    fn number_operators_only() {
        let dims = HilbertDims::new(3, 4).unwrap();
        let ops = build_operators(dims).unwrap();
        let mut p = EffectiveParams::sweep_point(1.0, 0.0, 0.0, 0.0);
        p.coupling = c64::new(0.0, 0.0);
        let h = build_hamiltonian(&p, &ops).unwrap();
        for m in 0..3 {
            for n in 0..4 {
                let i = dims.index(m, n);
                for j in 0..dims.dim() {
                    let expected = if i == j { (m + n) as f64 } else { 0.0 };
                    assert!((h[(i, j)] - c64::new(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_parameters_give_zero_matrix() {
        let ops = build_operators(HilbertDims::new(2, 3).unwrap()).unwrap();
        let p = EffectiveParams::sweep_point(0.0, 0.0, 0.0, 0.0);
        assert_eq!(max_abs(&build_hamiltonian(&p, &ops).unwrap()), 0.0);
    }

    #[test]
    fn matches_hand_assembled_elements() {
        let dims = HilbertDims::new(4, 8).unwrap();
        let ops = build_operators(dims).unwrap();
        let mut p = EffectiveParams::sweep_point(0.0, 0.2, 0.002, 0.002);
        let h = build_hamiltonian(&p, &ops).unwrap();
        // the 3x3 block spanned by |00>, |10>, |02>
        let basis = [(0, 0), (1, 0), (0, 2)];
        for &bra in &basis {
            for &ket in &basis {
                let got = h[(dims.index(bra.0, bra.1), dims.index(ket.0, ket.1))];
                assert!(
                    (got - element(&p, bra, ket)).norm() < 1e-15,
                    "{bra:?} {ket:?}"
                );
            }
        }
        assert!((h[(dims.index(0, 2), dims.index(1, 0))].re - 0.2 * 2f64.sqrt()).abs() < 1e-15);

        // And every element, with a complex coupling and detunings.
        p.coupling = c64::new(0.13, -0.07);
        p.delta_a = 0.03;
        p.delta_b = -0.05;
        let h = build_hamiltonian(&p, &ops).unwrap();
        for mp in 0..4 {
            for np in 0..8 {
                for m in 0..4 {
                    for n in 0..8 {
                        let got = h[(dims.index(mp, np), dims.index(m, n))];
                        let want = element(&p, (mp, np), (m, n));
                        assert!((got - want).norm() < 1e-14);
                    }
                }
            }
        }
        assert!(hermiticity_deviation(&h) <= 1e-12);
    }
}
