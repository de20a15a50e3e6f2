use std::fs;

use phonon_core::c64;
use phonon_core::dataset::{
    generate, label_point, provenance_path, read_csv, sample_points, write_csv, Dataset,
    DatasetError, GenerateOptions, Interval, SampleMode, SweepRanges, CSV_HEADER, DEFAULT_DIMS,
};
use phonon_core::oracle::eig_steady_state;
use phonon_core::quantum::{
    build_hamiltonian, build_liouvillian, build_operators, observables, EffectiveParams,
    HilbertDims,
};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/three_rows.csv");

#[test]
fn fixture_rows_parse_exactly() {
    let ds = read_csv(FIXTURE.as_ref()).unwrap();
    assert_eq!(ds.len(), 3);
    assert!(ds.provenance.is_none());
    let s = &ds.samples[0];
    assert_eq!(s.params, EffectiveParams::canonical());
    assert_eq!(
        s.dims_used,
        HilbertDims {
            n_cav: 4,
            n_mech: 8
        }
    );
    assert_eq!(s.x.p, 2.6363401263845769e-3);
    assert_eq!(s.x.q, 0.0);
    assert_eq!(s.x.n_c, 4.7023531669765309e-5);
    assert_eq!(s.y, -2.6481140944961536);
    let s = &ds.samples[1];
    assert_eq!(
        s.params,
        EffectiveParams::sweep_point(0.05, 0.3, 0.002, 0.001)
    );
    assert_eq!(s.x.p, -4.6973654435924773e-4);
    assert_eq!(s.x.q, 1.5692805178778506e-3);
    assert_eq!(s.y, 1.2998233843663487);
    let s = &ds.samples[2];
    assert_eq!(s.params.delta_b, -0.02);
    assert_eq!(s.params.coupling, c64::new(0.15, 0.0));
    assert_eq!(s.x.n_c, 1.2328184127241167e-5);
    assert_eq!(s.y, -1.1529366296472911e-1);
}

#[test]
fn fixture_rows_relabel() {
    let ds = read_csv(FIXTURE.as_ref()).unwrap();
    for s in &ds.samples {
        let again = label_point(&s.params, s.dims_used).unwrap();
        assert!((again.y - s.y).abs() <= 1e-9);
    }
}

#[test]
fn empty_dataset_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(&Dataset::default(), &path).unwrap();
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        format!("{CSV_HEADER}\n")
    );
    assert!(read_csv(&path).unwrap().is_empty());
    assert!(!provenance_path(&path).exists());
}

#[test]
fn round_trip_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let ranges = SweepRanges::default();
    let opts = GenerateOptions {
        n: 12,
        seed: 9,
        dims: HilbertDims {
            n_cav: 3,
            n_mech: 5,
        },
        jobs: 2,
        ..Default::default()
    };
    let ds = generate(&ranges, &opts).unwrap();
    write_csv(&ds, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.samples, ds.samples);
    assert_eq!(back.provenance, ds.provenance);
    let bytes = fs::read(&path).unwrap();
    write_csv(&back, &path).unwrap();
    assert_eq!(fs::read(&path).unwrap(), bytes);
}

#[test]
fn malformed_rows_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let good = fs::read_to_string(FIXTURE).unwrap();
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    lines[3] = lines[3].replacen("2.0000000000000000e-3", "abc", 1);
    let path = dir.path().join("bad.csv");
    fs::write(&path, lines.join("\n")).unwrap();
    match read_csv(&path) {
        Err(DatasetError::Malformed {
            line: 4, message, ..
        }) => assert!(message.contains("eps_a"), "{message}"),
        other => panic!("{other:?}"),
    }

    let mut short: Vec<String> = good.lines().map(String::from).collect();
    short[2] = "1,2,3".into();
    fs::write(&path, short.join("\n")).unwrap();
    assert!(matches!(
        read_csv(&path),
        Err(DatasetError::Malformed { line: 3, .. })
    ));

    fs::write(&path, "delta,J\n").unwrap();
    assert!(matches!(
        read_csv(&path),
        Err(DatasetError::Malformed { line: 1, .. })
    ));
}

#[test]
fn label_matches_eigen_oracle() {
    let p = EffectiveParams::sweep_point(0.0, 0.2, 0.002, 0.001);
    let dims = HilbertDims::new(3, 6).unwrap();
    let s = label_point(&p, dims).unwrap();
    let ops = build_operators(dims).unwrap();
    let h = build_hamiltonian(&p, &ops).unwrap();
    let l = build_liouvillian(&h, &p, &ops).unwrap();
    let rho = eig_steady_state(&l).unwrap();
    let y = observables(&rho, &ops).unwrap().log10_g2b();
    assert!((s.y - y).abs() <= 1e-7, "{} vs {y}", s.y);
}

#[test]
fn mechanical_drive_peak_below_sweep_range() {
    let g2 = |eb: f64| {
        label_point(
            &EffectiveParams::sweep_point(0.0, 0.2, 0.002, eb),
            DEFAULT_DIMS,
        )
        .unwrap()
        .y
    };
    assert!(g2(1e-5) > 0.0);
    assert!(g2(1e-3) < -2.0);
}

#[test]
fn detuning_line_minimum_at_resonance() {
    let ranges = SweepRanges {
        delta: Interval::new(-0.1, 0.1),
        coupling: Interval::fixed(0.2),
        eps_b: Interval::fixed(0.0015),
        ..SweepRanges::default()
    };
    let opts = GenerateOptions {
        n: 41,
        mode: SampleMode::Grid,
        jobs: 1,
        ..Default::default()
    };
    let ds = generate(&ranges, &opts).unwrap();
    let best = (0..ds.len())
        .min_by(|&a, &b| ds.samples[a].y.total_cmp(&ds.samples[b].y))
        .unwrap();
    assert_eq!(ds.samples[best].params.delta_a, 0.0);
}

#[test]
fn stored_samples_relabel_consistently() {
    let points =
        sample_points(&SweepRanges::default(), 100, 21, SampleMode::UniformRandom).unwrap();
    let dims = HilbertDims::new(3, 6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("relabel.csv");
    let ds = Dataset::from_samples(
        points
            .iter()
            .map(|p| label_point(p, dims).unwrap())
            .collect(),
    );
    write_csv(&ds, &path).unwrap();
    for s in read_csv(&path).unwrap().samples {
        let again = label_point(&s.params, s.dims_used).unwrap();
        assert!((again.y - s.y).abs() <= 1e-9);
        assert!(s.x.n_c <= 0.1);
    }
}
