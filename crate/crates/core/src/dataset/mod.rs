//! Parameter sweeps labelled with steady-state features and `log10 g2`.

mod io;
mod presets;

pub use io::{provenance_path, read_csv, write_csv, CSV_HEADER};
pub use presets::{figure_preset, FigurePreset, PRESET_NAMES};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::c64;
use crate::quantum::{
    solve_point, EffectiveParams, HilbertDims, QuantumError, STEADY_RESIDUAL_FACTOR,
    VACUUM_THRESHOLD,
};

/// Largest tolerated fraction of rejected points in [`generate`].
pub const MAX_REJECT_FRACTION: f64 = 0.01;
/// Weak-drive sanity bound on the cavity occupation.
pub const MAX_WEAK_DRIVE_N_C: f64 = 0.1;
pub const DEFAULT_DIMS: HilbertDims = HilbertDims {
    n_cav: 4,
    n_mech: 8,
};
pub const DEFAULT_SAMPLES: usize = 20_000;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("interval `{name}` is empty or invalid: [{lo}, {hi}]")]
    EmptyInterval {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("drive `{name}` must be >= 0 (interval [{lo}, {hi}])")]
    NegativeDrive {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("invalid sweep settings: {0}")]
    Invalid(String),
    #[error("{rejected} of {total} points rejected (limit {:.0}%); first: {first}", MAX_REJECT_FRACTION * 100.0)]
    TooManyRejects {
        rejected: usize,
        total: usize,
        first: String,
    },
    #[error("split fractions must be >= 0 and sum to 1 (got {0:?})")]
    Fractions((f64, f64, f64)),
    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn check(&self, name: &'static str) -> Result<(), DatasetError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(DatasetError::EmptyInterval {
                name,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    /// `k` evenly spaced values including both ends; the midpoint when `k == 1`.
    fn grid(&self, k: usize) -> Vec<f64> {
        if k == 1 {
            return vec![if self.is_degenerate() {
                self.lo
            } else {
                self.midpoint()
            }];
        }
        let step = (self.hi - self.lo) / (k - 1) as f64;
        (0..k)
            .map(|i| {
                if i == k - 1 {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub delta: Interval,
    pub coupling: Interval,
    pub eps_b: Interval,
    pub eps_a: Interval,
    pub gamma: f64,
    pub n_th: f64,
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self {
            delta: Interval::new(-0.1, 0.1),
            coupling: Interval::new(0.1, 0.35),
            eps_b: Interval::new(0.001, 0.003),
            eps_a: Interval::fixed(EffectiveParams::CANONICAL_EPS_A),
            gamma: EffectiveParams::CANONICAL_GAMMA,
            n_th: EffectiveParams::CANONICAL_N_TH,
        }
    }
}

impl SweepRanges {
    pub fn validate(&self) -> Result<(), DatasetError> {
        self.delta.check("delta")?;
        self.coupling.check("J")?;
        self.eps_b.check("eps_b")?;
        self.eps_a.check("eps_a")?;
        for (name, iv) in [("eps_a", self.eps_a), ("eps_b", self.eps_b)] {
            if iv.lo < 0.0 {
                return Err(DatasetError::NegativeDrive {
                    name,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        if !(self.gamma > 0.0) || !(self.n_th >= 0.0) {
            return Err(DatasetError::Invalid(format!(
                "gamma = {}, n_th = {}",
                self.gamma, self.n_th
            )));
        }
        Ok(())
    }

    fn point(&self, delta: f64, coupling: f64, eps_a: f64, eps_b: f64) -> EffectiveParams {
        EffectiveParams {
            delta_a: delta,
            delta_b: delta,
            coupling: c64::new(coupling, 0.0),
            eps_a,
            eps_b,
            kappa: 1.0,
            gamma: self.gamma,
            n_th: self.n_th,
        }
    }

    fn axes(&self) -> [Interval; 4] {
        [self.delta, self.coupling, self.eps_a, self.eps_b]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    UniformRandom,
    Grid,
}

impl std::str::FromStr for SampleMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" | "uniform-random" | "random" => Ok(Self::UniformRandom),
            "grid" => Ok(Self::Grid),
            other => Err(format!(
                "unknown sampling mode `{other}` (expected uniform-random or grid)"
            )),
        }
    }
}

/// Splits `n` into `k` factors whose product is exactly `n`, as equal as
/// possible (smallest spread between largest and smallest factor).
pub fn balanced_factors(n: usize, k: usize) -> Vec<usize> {
    fn search(n: usize, k: usize, min: usize, acc: &mut Vec<usize>, best: &mut Option<Vec<usize>>) {
        if k == 1 {
            if n >= min {
                acc.push(n);
                let spread = |v: &[usize]| v[v.len() - 1] as f64 / v[0] as f64;
                if best.as_ref().map_or(true, |b| spread(acc) < spread(b)) {
                    *best = Some(acc.clone());
                }
                acc.pop();
            }
            return;
        }
        let mut f = min;
        while f.pow(k as u32) <= n {
            if n % f == 0 {
                acc.push(f);
                search(n / f, k - 1, f, acc, best);
                acc.pop();
            }
            f += 1;
        }
    }
    if k == 0 {
        return Vec::new();
    }
    let mut best = None;
    search(n, k, 1, &mut Vec::new(), &mut best);
    let mut factors = best.expect("1 * ... * n is always a factorization");
    factors.reverse();
    factors
}

/// Draws `n` parameter points. Uniform mode draws `delta, J, eps_a, eps_b`
/// in that order per point; grid mode splits `n` over the non-degenerate
/// axes with [`balanced_factors`], last axis fastest.
pub fn sample_points(
    ranges: &SweepRanges,
    n: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<Vec<EffectiveParams>, DatasetError> {
    ranges.validate()?;
    if n == 0 {
        return Err(DatasetError::Invalid("sample count must be >= 1".into()));
    }
    match mode {
        SampleMode::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = |iv: Interval| iv.lo + (iv.hi - iv.lo) * rng.random::<f64>();
            Ok((0..n)
                .map(|_| {
                    let d = draw(ranges.delta);
                    let j = draw(ranges.coupling);
                    let ea = draw(ranges.eps_a);
                    let eb = draw(ranges.eps_b);
                    ranges.point(d, j, ea, eb)
                })
                .collect())
        }
        SampleMode::Grid => {
            let axes = ranges.axes();
            let swept: Vec<usize> = (0..4).filter(|&i| !axes[i].is_degenerate()).collect();
            if swept.is_empty() && n != 1 {
                return Err(DatasetError::Invalid(format!(
                    "grid of {n} points over zero swept axes"
                )));
            }
            let factors = balanced_factors(n, swept.len());
            let mut counts = [1usize; 4];
            for (axis, k) in swept.iter().zip(&factors) {
                counts[*axis] = *k;
            }
            let values: Vec<Vec<f64>> = (0..4).map(|i| axes[i].grid(counts[i])).collect();
            let mut out = Vec::with_capacity(n);
            for &d in &values[0] {
                for &j in &values[1] {
                    for &ea in &values[2] {
                        for &eb in &values[3] {
                            out.push(ranges.point(d, j, ea, eb));
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub p: f64,
    pub q: f64,
    pub n_c: f64,
}

impl Features {
    pub fn to_array(&self) -> [f64; 3] {
        [self.p, self.q, self.n_c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub params: EffectiveParams,
    pub x: Features,
    /// `log10 g2`
    pub y: f64,
    pub dims_used: HilbertDims,
}

pub fn label_point(params: &EffectiveParams, dims: HilbertDims) -> Result<Sample, QuantumError> {
    let (_, obs) = solve_point(params, dims)?;
    let y = obs.log10_g2b();
    if !y.is_finite() {
        return Err(QuantumError::InvalidParams(format!(
            "non-finite label log10 g2 = {y}"
        )));
    }
    Ok(Sample {
        params: *params,
        x: Features {
            p: obs.p,
            q: obs.q,
            n_c: obs.n_c,
        },
        y,
        dims_used: dims,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub dims: HilbertDims,
    pub residual_factor: f64,
    pub vacuum_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub n: usize,
    pub mode: SampleMode,
    pub ranges: SweepRanges,
    pub solver: SolverSettings,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reject {
    pub index: usize,
    pub params: EffectiveParams,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub provenance: Option<Provenance>,
    pub rejects: Vec<Reject>,
    /// Indices of samples with `n_c > MAX_WEAK_DRIVE_N_C`.
    pub flagged: Vec<usize>,
}

impl Dataset {
    pub fn from_samples(samples: Vec<Sample>) -> Self {
        Self {
            samples,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn inputs(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| s.x.to_array()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GenerateOptions {
    pub n: usize,
    pub seed: u64,
    pub mode: SampleMode,
    pub dims: HilbertDims,
    /// Worker threads; `0` means one per available core.
    pub jobs: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_SAMPLES,
            seed: 0,
            mode: SampleMode::UniformRandom,
            dims: DEFAULT_DIMS,
            jobs: 0,
        }
    }
}

/// Labels explicit points on a worker pool, preserving input order.
pub fn label_points(
    points: &[EffectiveParams],
    dims: HilbertDims,
    jobs: usize,
) -> Result<Vec<Result<Sample, QuantumError>>, DatasetError> {
    dims.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| DatasetError::Invalid(format!("worker pool: {e}")))?;
    Ok(pool.install(|| points.par_iter().map(|p| label_point(p, dims)).collect()))
}

/// Samples and labels a sweep. Failed points go to `rejects`; more than
/// [`MAX_REJECT_FRACTION`] of them fails the run.
pub fn generate(ranges: &SweepRanges, opts: &GenerateOptions) -> Result<Dataset, DatasetError> {
    let points = sample_points(ranges, opts.n, opts.seed, opts.mode)?;
    let labelled = label_points(&points, opts.dims, opts.jobs)?;
    let mut samples = Vec::with_capacity(points.len());
    let mut rejects = Vec::new();
    for (index, (result, params)) in labelled.into_iter().zip(&points).enumerate() {
        match result {
            Ok(s) => samples.push(s),
            Err(e) => rejects.push(Reject {
                index,
                params: *params,
                reason: e.to_string(),
            }),
        }
    }
    if rejects.len() as f64 > MAX_REJECT_FRACTION * points.len() as f64 {
        return Err(DatasetError::TooManyRejects {
            rejected: rejects.len(),
            total: points.len(),
            first: format!("point {}: {}", rejects[0].index, rejects[0].reason),
        });
    }
    let flagged = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.x.n_c > MAX_WEAK_DRIVE_N_C)
        .map(|(i, _)| i)
        .collect();
    let provenance = Provenance {
        seed: opts.seed,
        n: opts.n,
        mode: opts.mode,
        ranges: *ranges,
        solver: SolverSettings {
            dims: opts.dims,
            residual_factor: STEADY_RESIDUAL_FACTOR,
            vacuum_threshold: VACUUM_THRESHOLD,
        },
        generator: format!("phonon-core {}", env!("CARGO_PKG_VERSION")),
    };
    Ok(Dataset {
        samples,
        provenance: Some(provenance),
        rejects,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub val: Dataset,
    pub fractions: (f64, f64, f64),
}

pub const DEFAULT_FRACTIONS: (f64, f64, f64) = (0.70, 0.15, 0.15);

/// Seeded permutation, then contiguous `train | test | val` cuts.
pub fn split(ds: &Dataset, fractions: (f64, f64, f64), seed: u64) -> Result<Split, DatasetError> {
    let (a, b, c) = fractions;
    if [a, b, c].iter().any(|f| !(*f >= 0.0)) || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(DatasetError::Fractions(fractions));
    }
    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((a * n as f64).round() as usize).min(n);
    let n_test = ((b * n as f64).round() as usize).min(n - n_train);
    let take = |idx: &[usize]| Dataset {
        samples: idx.iter().map(|&i| ds.samples[i]).collect(),
        provenance: ds.provenance.clone(),
        ..Dataset::default()
    };
    Ok(Split {
        train: take(&order[..n_train]),
        test: take(&order[n_train..n_train + n_test]),
        val: take(&order[n_train + n_test..]),
        fractions,
    })
}
