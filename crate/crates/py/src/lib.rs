//! Python module `phonon_detector`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use phonon_core::c64;
use phonon_core::dataset::{self, Dataset, GenerateOptions, Interval, SampleMode, SweepRanges};
use phonon_core::effective::{effective_params, LabParams};
use phonon_core::mlp::{self, MLPModel, TrainOptions};
use phonon_core::quantum::{self, ConvergenceOptions, EffectiveParams, HilbertDims};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dims_of((n_cav, n_mech): (usize, usize)) -> PyResult<HilbertDims> {
    HilbertDims::new(n_cav, n_mech).map_err(value_err)
}

/// Effective-model parameters in units of kappa.
#[pyclass(name = "Params", module = "phonon_detector", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: EffectiveParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (delta=0.0, J=0.2, eps_a=EffectiveParams::CANONICAL_EPS_A, eps_b=0.002, *,
        delta_a=None, delta_b=None, J_im=0.0, gamma=EffectiveParams::CANONICAL_GAMMA,
        n_th=EffectiveParams::CANONICAL_N_TH, kappa=1.0))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        delta: f64,
        J: f64,
        eps_a: f64,
        eps_b: f64,
        delta_a: Option<f64>,
        delta_b: Option<f64>,
        J_im: f64,
        gamma: f64,
        n_th: f64,
        kappa: f64,
    ) -> PyResult<Self> {
        let inner = EffectiveParams {
            delta_a: delta_a.unwrap_or(delta),
            delta_b: delta_b.unwrap_or(delta),
            coupling: c64::new(J, J_im),
            eps_a,
            eps_b,
            kappa,
            gamma,
            n_th,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self {
            inner: inner.normalized(),
        })
    }

    #[staticmethod]
    fn canonical() -> Self {
        Self {
            inner: EffectiveParams::canonical(),
        }
    }

    /// Maps a laboratory `key = value` file to effective parameters; returns
    /// `(params, warnings)`.
    #[staticmethod]
    fn from_lab_file(path: PathBuf) -> PyResult<(Self, Vec<String>)> {
        let lab = LabParams::from_config_file(&path).map_err(value_err)?;
        let (inner, report) = effective_params(&lab).map_err(value_err)?;
        Ok((Self { inner }, report.warnings))
    }

    #[getter]
    fn delta_a(&self) -> f64 {
        self.inner.delta_a
    }
    #[getter]
    fn delta_b(&self) -> f64 {
        self.inner.delta_b
    }
    #[getter(J)]
    fn coupling(&self) -> c64 {
        self.inner.coupling
    }
    #[getter]
    fn eps_a(&self) -> f64 {
        self.inner.eps_a
    }
    #[getter]
    fn eps_b(&self) -> f64 {
        self.inner.eps_b
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn n_th(&self) -> f64 {
        self.inner.n_th
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(delta_a={}, delta_b={}, J={}{:+}j, eps_a={}, eps_b={}, gamma={}, n_th={})",
            p.delta_a, p.delta_b, p.coupling.re, p.coupling.im, p.eps_a, p.eps_b, p.gamma, p.n_th
        )
    }
}

/// Steady-state observables.
#[pyclass(
    name = "Observables",
    module = "phonon_detector",
    frozen,
    skip_from_py_object
)]
struct PyObservables {
    #[pyo3(get)]
    p: f64,
    #[pyo3(get)]
    q: f64,
    #[pyo3(get)]
    n_c: f64,
    #[pyo3(get)]
    n_b: f64,
    #[pyo3(get)]
    g2b: f64,
    #[pyo3(get)]
    log10_g2b: f64,
}

#[pymethods]
impl PyObservables {
    fn __repr__(&self) -> String {
        format!(
            "Observables(p={:e}, q={:e}, n_c={:e}, n_b={:e}, g2b={:e})",
            self.p, self.q, self.n_c, self.n_b, self.g2b
        )
    }
}

/// Solve the steady state and return its observables.
#[pyfunction]
#[pyo3(signature = (params, dims=(4, 8)))]
fn solve(params: PyRef<'_, PyParams>, dims: (usize, usize)) -> PyResult<PyObservables> {
    let (_, o) = quantum::solve_point(&params.inner, dims_of(dims)?).map_err(value_err)?;
    Ok(PyObservables {
        p: o.p,
        q: o.q,
        n_c: o.n_c,
        n_b: o.n_b,
        g2b: o.g2b,
        log10_g2b: o.log10_g2b(),
    })
}

/// Steady-state density matrix as nested lists; basis index `m * n_mech + n`.
#[pyfunction]
#[pyo3(signature = (params, dims=(4, 8)))]
fn density_matrix(params: PyRef<'_, PyParams>, dims: (usize, usize)) -> PyResult<Vec<Vec<c64>>> {
    let (rho, _) = quantum::solve_point(&params.inner, dims_of(dims)?).map_err(value_err)?;
    let d = rho.rho.nrows();
    Ok((0..d)
        .map(|i| (0..d).map(|j| rho.rho[(i, j)]).collect())
        .collect())
}

/// Smallest truncation, grown from `start`, at which `g2` is converged.
#[pyfunction]
#[pyo3(signature = (params, start=(2, 3), rel_tol=1e-6, max_dims=(12, 16)))]
fn converge_dims(
    params: PyRef<'_, PyParams>,
    start: (usize, usize),
    rel_tol: f64,
    max_dims: (usize, usize),
) -> PyResult<(usize, usize)> {
    let opts = ConvergenceOptions {
        rel_tol,
        max_dims: dims_of(max_dims)?,
    };
    let d = quantum::converge_dims(&params.inner, dims_of(start)?, opts).map_err(value_err)?;
    Ok((d.n_cav, d.n_mech))
}

/// Labelled samples `(p, q, n_c) -> log10 g2`.
#[pyclass(name = "Dataset", module = "phonon_detector", skip_from_py_object)]
struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: dataset::read_csv(&path).map_err(value_err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        dataset::write_csv(&self.inner, &path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `[(p, q, n_c), ...]`
    fn inputs(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .inputs()
            .into_iter()
            .map(|[p, q, n]| (p, q, n))
            .collect()
    }

    fn targets(&self) -> Vec<f64> {
        self.inner.targets()
    }

    /// `[(delta, J, eps_a, eps_b), ...]`
    fn sweep_parameters(&self) -> Vec<(f64, f64, f64, f64)> {
        self.inner
            .samples
            .iter()
            .map(|s| {
                (
                    s.params.delta_a,
                    s.params.coupling.re,
                    s.params.eps_a,
                    s.params.eps_b,
                )
            })
            .collect()
    }

    /// `(train, test, val)`.
    #[pyo3(signature = (fractions=dataset::DEFAULT_FRACTIONS, seed=0))]
    fn split(&self, fractions: (f64, f64, f64), seed: u64) -> PyResult<(Self, Self, Self)> {
        let s = dataset::split(&self.inner, fractions, seed).map_err(value_err)?;
        Ok((
            Self { inner: s.train },
            Self { inner: s.test },
            Self { inner: s.val },
        ))
    }

    fn __repr__(&self) -> String {
        format!("Dataset(len={})", self.inner.len())
    }
}

fn interval(v: Option<(f64, f64)>, default: Interval) -> Interval {
    v.map_or(default, |(lo, hi)| Interval::new(lo, hi))
}

/// Sample and label a sweep. `preset` names a figure panel; explicit
/// `(lo, hi)` ranges override it.
#[pyfunction]
#[pyo3(signature = (n=None, *, seed=0, mode=None, preset=None, dims=(4, 8), jobs=0,
    delta=None, J=None, eps_a=None, eps_b=None))]
#[allow(non_snake_case, clippy::too_many_arguments)]
fn generate(
    py: Python<'_>,
    n: Option<usize>,
    seed: u64,
    mode: Option<&str>,
    preset: Option<&str>,
    dims: (usize, usize),
    jobs: usize,
    delta: Option<(f64, f64)>,
    J: Option<(f64, f64)>,
    eps_a: Option<(f64, f64)>,
    eps_b: Option<(f64, f64)>,
) -> PyResult<PyDataset> {
    let (mut ranges, mut sample_mode, mut count) = match preset {
        Some(name) => {
            let p = dataset::figure_preset(name)
                .ok_or_else(|| value_err(format!("unknown preset `{name}`")))?;
            (p.ranges, p.mode, p.n)
        }
        None => (
            SweepRanges::default(),
            SampleMode::UniformRandom,
            dataset::DEFAULT_SAMPLES,
        ),
    };
    if let Some(m) = mode {
        sample_mode = m.parse().map_err(value_err)?;
    }
    count = n.unwrap_or(count);
    ranges.delta = interval(delta, ranges.delta);
    ranges.coupling = interval(J, ranges.coupling);
    ranges.eps_a = interval(eps_a, ranges.eps_a);
    ranges.eps_b = interval(eps_b, ranges.eps_b);
    let opts = GenerateOptions {
        n: count,
        seed,
        mode: sample_mode,
        dims: dims_of(dims)?,
        jobs,
    };
    let ds = py
        .detach(|| dataset::generate(&ranges, &opts))
        .map_err(value_err)?;
    Ok(PyDataset { inner: ds })
}

/// Single-hidden-layer tanh network with its input/output scaler.
#[pyclass(name = "Model", module = "phonon_detector", skip_from_py_object)]
struct PyModel {
    inner: MLPModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (hidden=mlp::DEFAULT_HIDDEN, seed=0))]
    fn new(hidden: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: MLPModel::init(hidden, seed).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: mlp::load(&path).map_err(value_err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        mlp::save(&self.inner, &path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn hidden(&self) -> usize {
        self.inner.hidden
    }

    #[getter]
    fn dataset_hash(&self) -> Option<String> {
        self.inner.dataset_hash.clone()
    }

    /// Predicted `log10 g2` for one feature triple.
    fn predict(&self, p: f64, q: f64, n_c: f64) -> f64 {
        self.inner.forward(&[p, q, n_c])
    }

    fn predict_many(&self, xs: Vec<(f64, f64, f64)>) -> Vec<f64> {
        let xs: Vec<[f64; 3]> = xs.into_iter().map(|(p, q, n)| [p, q, n]).collect();
        self.inner.predict(&xs)
    }

    fn mse(&self, data: PyRef<'_, PyDataset>) -> PyResult<f64> {
        mlp::mse(&self.inner, &data.inner).map_err(value_err)
    }
}

/// Levenberg-Marquardt training. Returns the best-validation model and the
/// per-iteration history as a list of dicts.
#[pyfunction]
#[pyo3(signature = (train, val, test, *, hidden=mlp::DEFAULT_HIDDEN, seed=0, max_iters=1000,
    val_patience=6, lambda0=1e-3))]
#[allow(clippy::too_many_arguments)]
fn train<'py>(
    py: Python<'py>,
    train: PyRef<'_, PyDataset>,
    val: PyRef<'_, PyDataset>,
    test: PyRef<'_, PyDataset>,
    hidden: usize,
    seed: u64,
    max_iters: usize,
    val_patience: usize,
    lambda0: f64,
) -> PyResult<(PyModel, Vec<Bound<'py, PyDict>>)> {
    let opts = TrainOptions {
        max_iters,
        val_patience,
        lambda0,
        seed,
        ..TrainOptions::default()
    };
    let init = MLPModel::init(hidden, seed).map_err(value_err)?;
    let (tr, va, te) = (&train.inner, &val.inner, &test.inner);
    let (model, history) = py
        .detach(|| mlp::train_lm(&init, tr, va, te, &opts))
        .map_err(value_err)?;
    let mut rows = Vec::with_capacity(history.records.len());
    for r in &history.records {
        let d = PyDict::new(py);
        d.set_item("iteration", r.iteration)?;
        d.set_item("train_mse", r.train_mse)?;
        d.set_item("test_mse", r.test_mse)?;
        d.set_item("val_mse", r.val_mse)?;
        d.set_item("lambda", r.lambda)?;
        d.set_item("best", r.iteration == history.best_iteration)?;
        rows.push(d);
    }
    Ok((PyModel { inner: model }, rows))
}

#[pymodule]
fn phonon_detector(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyObservables>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(converge_dims, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add("PRESETS", dataset::PRESET_NAMES.to_vec())?;
    Ok(())
}
