use faer::Mat;
use phonon_core::c64;
use phonon_core::oracle::dense_lindblad_rhs;
use phonon_core::quantum::{
    build_hamiltonian, build_liouvillian, build_operators, converge_dims, hermiticity_deviation,
    max_abs_diff, observables, solve_point, steady_state, ConvergenceOptions, EffectiveParams,
    HilbertDims, QuantumError,
};
use proptest::prelude::*;

fn decoupled(eps_a: f64, eps_b: f64, n_th: f64) -> EffectiveParams {
    EffectiveParams {
        delta_a: 0.0,
        delta_b: 0.0,
        coupling: c64::new(0.0, 0.0),
        eps_a,
        eps_b,
        kappa: 1.0,
        gamma: EffectiveParams::CANONICAL_GAMMA,
        n_th,
    }
}

fn g2(p: &EffectiveParams, dims: (usize, usize)) -> f64 {
    solve_point(p, HilbertDims::new(dims.0, dims.1).unwrap())
        .unwrap()
        .1
        .g2b
}

#[test]
fn thermal_limit() {
    for n_th in [1e-3, 0.01, 0.05] {
        let g = g2(&decoupled(0.0, 0.0, n_th), (2, 14));
        assert!((g - 2.0).abs() <= 1e-5, "n_th={n_th}: g2={g}");
    }
}

#[test]
fn coherent_limit() {
    let p = decoupled(0.0, 1e-4, 0.0);
    let g = g2(&p, (2, 10));
    assert!((g - 1.0).abs() <= 1e-5, "g2={g}");
}

#[test]
fn coherent_limit_with_detuning_and_optical_drive() {
    let p = EffectiveParams {
        delta_b: 0.002,
        ..decoupled(0.002, 3e-4, 0.0)
    };
    let g = g2(&p, (3, 12));
    assert!((g - 1.0).abs() <= 1e-5, "g2={g}");
}

#[test]
fn displaced_thermal_closed_form() {
    for (eps_b, n_th) in [(2e-4, 0.05), (5e-4, 0.02), (1e-4, 0.1)] {
        let p = decoupled(0.0, eps_b, n_th);
        let beta = c64::new(-eps_b, 0.0) / c64::new(p.delta_b, -p.gamma / 2.0);
        let b2 = beta.norm_sqr();
        let expect = (b2 * b2 + 4.0 * b2 * n_th + 2.0 * n_th * n_th) / ((b2 + n_th) * (b2 + n_th));
        let (_, obs) = solve_point(&p, HilbertDims::new(2, 16).unwrap()).unwrap();
        assert!(
            (obs.n_b - (b2 + n_th)).abs() <= 1e-8,
            "n_b={} expected {}",
            obs.n_b,
            b2 + n_th
        );
        assert!(
            (obs.g2b - expect).abs() <= 1e-5,
            "eps_b={eps_b} n_th={n_th}: {} vs {expect}",
            obs.g2b
        );
    }
}

#[test]
fn driven_cavity_coherent_amplitude() {
    let p = decoupled(0.002, 0.0, 1e-3);
    let (rho, obs) = solve_point(&p, HilbertDims::new(4, 6).unwrap()).unwrap();
    assert!((obs.n_c - 1.6e-5).abs() <= 1e-12, "n_c={}", obs.n_c);
    // <a> = -2i eps_a: q = 0, p = -2 sqrt2 eps_a
    assert!(obs.q.abs() <= 1e-12);
    assert!(
        (obs.p + 2.0 * std::f64::consts::SQRT_2 * 0.002).abs() <= 1e-12,
        "p={}",
        obs.p
    );
    let ops = build_operators(rho.dims).unwrap();
    let a = rho.expectation(&ops.a);
    assert!((a - c64::new(0.0, -0.004)).norm() <= 1e-12);
}

#[test]
fn decoupled_thermal_populations() {
    let n_th = 1e-3;
    let dims = HilbertDims::new(2, 6).unwrap();
    let (rho, _) = solve_point(&decoupled(0.0, 0.0, n_th), dims).unwrap();
    let r = n_th / (1.0 + n_th);
    let z: f64 = (0..6).map(|k| r.powi(k)).sum();
    for k in 0..6 {
        assert!((rho.population(0, k) - r.powi(k as i32) / z).abs() <= 1e-12);
    }
}

#[test]
fn vacuum_mechanics_is_an_error() {
    let p = decoupled(0.0, 0.0, 0.0);
    let err = solve_point(&p, HilbertDims::new(2, 3).unwrap()).unwrap_err();
    assert!(
        matches!(err, QuantumError::VacuumMechanicalMode { .. }),
        "{err:?}"
    );
}

#[test]
fn blockade_point_fixture() {
    let (rho, obs) = solve_point(
        &EffectiveParams::canonical(),
        HilbertDims::new(6, 10).unwrap(),
    )
    .unwrap();
    assert!(
        (obs.g2b - 2.248463829164e-3).abs() <= 1e-9 * 2.25e-3,
        "g2={:.12e}",
        obs.g2b
    );
    assert!(obs.log10_g2b() < -2.6);
    assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
}

// g2 depends on the coupling phase only relative to the drive phases: the
// mechanical rotation b -> i b maps J -> -J together with eps_b -> i eps_b,
// which is not a parameter symmetry. What survives is below.
#[test]
fn coupling_sign_with_optical_drive_sign() {
    let dims = (4, 8);
    for (dl, j, eb) in [(0.0, 0.2, 0.002), (0.03, 0.15, 0.001), (-0.05, 0.3, 0.003)] {
        let p = EffectiveParams::sweep_point(dl, j, 0.002, eb);
        let q = EffectiveParams {
            coupling: -p.coupling,
            eps_a: -p.eps_a,
            ..p
        };
        let (a, b) = (g2(&p, dims), g2(&q, dims));
        assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    }
}

#[test]
fn detuning_reversal_with_conjugate_coupling() {
    let dims = (4, 8);
    for (dl, j) in [
        (0.02, c64::new(0.2, 0.1)),
        (-0.07, c64::new(0.1, -0.25)),
        (0.04, c64::new(0.3, 0.0)),
    ] {
        let p = EffectiveParams {
            delta_a: dl,
            delta_b: dl,
            coupling: j,
            ..EffectiveParams::canonical()
        };
        let q = EffectiveParams {
            delta_a: -dl,
            delta_b: -dl,
            coupling: j.conj(),
            ..p
        };
        let (a, b) = (g2(&p, dims), g2(&q, dims));
        assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    }
}

#[test]
fn coupling_sign_alone_is_not_a_symmetry() {
    let p = EffectiveParams::sweep_point(0.05, 0.2, 0.002, 0.002);
    let q = EffectiveParams {
        coupling: -p.coupling,
        ..p
    };
    let (a, b) = (g2(&p, (4, 8)), g2(&q, (4, 8)));
    assert!((a - b).abs() > 1e-3 * a, "{a} vs {b}");
}

#[test]
fn convergence_fixtures() {
    let start = HilbertDims::new(2, 3).unwrap();
    let opts = ConvergenceOptions::default();
    let weak = converge_dims(
        &EffectiveParams::sweep_point(0.0, 0.2, 0.002, 0.001),
        start,
        opts,
    )
    .unwrap();
    let strong = converge_dims(
        &EffectiveParams::sweep_point(0.0, 0.2, 0.002, 0.003),
        start,
        opts,
    )
    .unwrap();
    let canonical = converge_dims(&EffectiveParams::canonical(), start, opts).unwrap();
    assert!(canonical.n_cav <= 6 && canonical.n_mech <= 10);
    assert_eq!(canonical, HilbertDims::new(4, 5).unwrap());
    // The weaker drive has the smaller g2, which is relatively more
    // sensitive to the truncation, so it needs the larger space.
    assert_eq!(weak, HilbertDims::new(5, 6).unwrap());
    assert_eq!(strong, HilbertDims::new(4, 5).unwrap());
}

fn random_state(d: usize, seed: &[f64]) -> Mat<c64> {
    // A A† / Tr(A A†) from a deterministic entry stream.
    let a = Mat::from_fn(d, d, |i, j| {
        let k = (i * d + j) % seed.len();
        c64::new(
            seed[k] * ((i + 1) as f64).sin(),
            seed[(k + 1) % seed.len()] * ((j + 2) as f64).cos(),
        )
    });
    let mut rho = Mat::<c64>::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] = (0..d).map(|k| a[(i, k)] * a[(j, k)].conj()).sum();
        }
    }
    let tr: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] /= tr;
        }
    }
    rho
}

fn arb_params() -> impl Strategy<Value = EffectiveParams> {
    (
        -0.1..0.1f64,
        -0.4..0.4f64,
        -0.4..0.4f64,
        0.0..0.005f64,
        0.0..0.005f64,
        1e-4..0.01f64,
        0.0..0.1f64,
    )
        .prop_map(|(dl, jr, ji, ea, eb, gamma, n_th)| EffectiveParams {
            delta_a: dl,
            delta_b: -dl * 0.5,
            coupling: c64::new(jr, ji),
            eps_a: ea,
            eps_b: eb,
            kappa: 1.0,
            gamma,
            n_th,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hamiltonian_is_hermitian(p in arb_params(), nc in 2usize..5, nm in 3usize..7) {
        let ops = build_operators(HilbertDims::new(nc, nm).unwrap()).unwrap();
        let h = build_hamiltonian(&p, &ops).unwrap();
        prop_assert!(hermiticity_deviation(&h) <= 1e-12);
    }

    #[test]
    fn liouvillian_preserves_trace(p in arb_params(), seed in prop::collection::vec(-1.0..1.0f64, 7)) {
        let dims = HilbertDims::new(3, 5).unwrap();
        let ops = build_operators(dims).unwrap();
        let h = build_hamiltonian(&p, &ops).unwrap();
        let l = build_liouvillian(&h, &p, &ops).unwrap();
        let rho = random_state(dims.dim(), &seed);
        let out = l.apply_to_matrix(&rho);
        let tr: c64 = (0..dims.dim()).map(|i| out[(i, i)]).sum();
        prop_assert!(tr.norm() <= 1e-10, "trace {tr}");
    }

    #[test]
    fn liouvillian_matches_dense_rhs(p in arb_params(), seed in prop::collection::vec(-1.0..1.0f64, 5)) {
        let dims = HilbertDims::new(3, 4).unwrap();
        let ops = build_operators(dims).unwrap();
        let h = build_hamiltonian(&p, &ops).unwrap();
        let l = build_liouvillian(&h, &p, &ops).unwrap();
        let rho = random_state(dims.dim(), &seed);
        prop_assert!(max_abs_diff(&l.apply_to_matrix(&rho), &dense_lindblad_rhs(&p, dims, &rho)) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steady_state_invariants(
        dl in -0.1..0.1f64, j in 0.1..0.35f64, eb in 0.001..0.003f64,
    ) {
        let p = EffectiveParams::sweep_point(dl, j, 0.002, eb);
        let dims = HilbertDims::new(3, 6).unwrap();
        let ops = build_operators(dims).unwrap();
        let h = build_hamiltonian(&p, &ops).unwrap();
        let l = build_liouvillian(&h, &p, &ops).unwrap();
        let rho = steady_state(&l).unwrap();
        prop_assert!(rho.hermiticity_deviation() <= 1e-10);
        prop_assert!((rho.trace() - c64::new(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
        let residual = l.apply(&phonon_core::quantum::vectorize(&rho.rho)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        prop_assert!(residual <= 1e-10 * l.max_abs());
        let obs = observables(&rho, &ops).unwrap();
        prop_assert!(obs.n_c >= 0.0 && obs.n_b >= 0.0 && obs.g2b >= 0.0);
    }
}
