//! Python bindings. Every index crossing this boundary is 1-based: ranking
//! permutations list particle names `1..=N`, and windows are rank pairs.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use rankcollide::conditions::{self, Criterion, TotalCriterion};
use rankcollide::simulate::{self, SimConfig, TrackedWindow};
use rankcollide::{Error, FiniteSystemSpec, InfiniteSystemSpec};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Resource(_) | Error::NonFinite { .. } => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn aggregate_to_py<'py>(py: Python<'py>, aggregate: &rankcollide::Aggregate) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(aggregate).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_criterion(id: &str) -> PyResult<Criterion> {
    id.parse().map_err(|e: Error| PyValueError::new_err(e.to_string()))
}

fn parse_total(id: &str) -> PyResult<TotalCriterion> {
    id.parse().map_err(|e: Error| PyValueError::new_err(e.to_string()))
}

/// Outcome of one sufficient-condition check.
#[pyclass(name = "ConditionReport", frozen)]
struct PyConditionReport {
    inner: conditions::ConditionReport,
}

#[pymethods]
impl PyConditionReport {
    #[getter]
    fn criterion(&self) -> &'static str {
        self.inner.criterion.id()
    }

    #[getter]
    fn holds(&self) -> bool {
        self.inner.holds
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.inner.margin
    }

    #[getter]
    fn strict(&self) -> bool {
        self.inner.strict
    }

    #[getter]
    fn window(&self) -> Option<(usize, usize)> {
        self.inner.window
    }

    #[getter]
    fn label(&self) -> Option<String> {
        self.inner.label.clone()
    }

    #[getter]
    fn note(&self) -> Option<String> {
        self.inner.note.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __bool__(&self) -> bool {
        self.inner.holds
    }

    fn __repr__(&self) -> String {
        format!(
            "ConditionReport(criterion={}, holds={}, margin={})",
            self.inner.criterion.id(),
            if self.inner.holds { "True" } else { "False" },
            self.inner.margin
        )
    }
}

/// Ranking permutation of `x`, as 1-based particle names from lowest to
/// highest; ties go to the smaller name.
#[pyfunction]
fn rank_permutation(x: Vec<f64>) -> PyResult<Vec<usize>> {
    Ok(rankcollide::model::rank_permutation(&x).map_err(to_py)?.to_one_based())
}

/// Values of `x` in ranked (ascending) order.
#[pyfunction]
fn ranked_values(x: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(rankcollide::model::ranked_values(&x).map_err(to_py)?.y)
}

/// Gaps between consecutive ranked values.
#[pyfunction]
fn gaps(x: Vec<f64>) -> PyResult<Vec<f64>> {
    rankcollide::model::ranked_values(&x).and_then(|s| s.gaps()).map_err(to_py)
}

/// Maximum of `sum d_i x_i^2` over unit vectors with zero sum.
#[pyfunction]
fn sphere_max(d: Vec<f64>) -> PyResult<f64> {
    conditions::sphere_max(&d).map_err(to_py)
}

/// Evaluates one criterion (wire id, e.g. "LEMMA21", "THM11") on ranked
/// diffusion coefficients.
#[pyfunction]
#[pyo3(signature = (sigma2, criterion, n=None, strict=None, window_criterion="LEMMA21"))]
fn check(
    sigma2: Vec<f64>,
    criterion: &str,
    n: Option<usize>,
    strict: Option<bool>,
    window_criterion: &str,
) -> PyResult<PyConditionReport> {
    let inner = conditions::check_criterion(&sigma2, parse_criterion(criterion)?, n, parse_total(window_criterion)?, strict)
        .map_err(to_py)?;
    Ok(PyConditionReport { inner })
}

/// The four collision-type reports of a four-particle system.
#[pyfunction]
fn four_particle_report(sigma2: Vec<f64>) -> PyResult<Vec<PyConditionReport>> {
    Ok(conditions::four_particle_report(&sigma2)
        .map_err(to_py)?
        .into_iter()
        .map(|inner| PyConditionReport { inner })
        .collect())
}

/// Ranked `N`-particle system.
#[pyclass(name = "FiniteSystem", frozen)]
struct PyFiniteSystem {
    inner: FiniteSystemSpec,
}

fn sim_config(
    horizon: f64,
    dt: f64,
    paths: usize,
    seed: u64,
    epsilons: Option<Vec<f64>>,
    windows: Option<Vec<(usize, usize)>>,
) -> SimConfig {
    let mut config = SimConfig::new(horizon, dt, paths, seed);
    if let Some(eps) = epsilons {
        config = config.with_epsilons(eps);
    }
    if let Some(w) = windows {
        config = config.with_windows(w.into_iter().map(|(k, n)| TrackedWindow { k, n }).collect());
    }
    config
}

#[pymethods]
impl PyFiniteSystem {
    #[new]
    fn new(g: Vec<f64>, sigma2: Vec<f64>, x0: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: FiniteSystemSpec::new(g, sigma2, x0).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        Ok(Self { inner: FiniteSystemSpec::from_json(doc).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn sigma2(&self) -> Vec<f64> {
        self.inner.sigma2.clone()
    }

    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.clone()
    }

    #[getter]
    fn x0(&self) -> Vec<f64> {
        self.inner.x0.clone()
    }

    #[pyo3(signature = (criterion="WINDOW_REDUCTION", n=None, strict=None, window_criterion="LEMMA21"))]
    fn check(&self, criterion: &str, n: Option<usize>, strict: Option<bool>, window_criterion: &str) -> PyResult<PyConditionReport> {
        check(self.inner.sigma2.clone(), criterion, n, strict, window_criterion)
    }

    /// Monte Carlo run; returns the aggregate as a dict. `windows` are
    /// `(k, n)` pairs tracking ranks `k..k+n-1`.
    #[pyo3(signature = (horizon, dt, paths, seed, epsilons=None, windows=None, threads=0))]
    #[allow(clippy::too_many_arguments)]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        horizon: f64,
        dt: f64,
        paths: usize,
        seed: u64,
        epsilons: Option<Vec<f64>>,
        windows: Option<Vec<(usize, usize)>>,
        threads: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let config = sim_config(horizon, dt, paths, seed, epsilons, windows);
        let spec = &self.inner;
        let aggregate = py
            .detach(|| {
                if threads == 0 {
                    simulate::monte_carlo(spec, &config)
                } else {
                    simulate::monte_carlo_with_threads(spec, &config, threads)
                }
            })
            .map_err(to_py)?;
        aggregate_to_py(py, &aggregate)
    }

    /// One path as CSV with columns `t,X_1..X_N`.
    #[pyo3(signature = (horizon, dt, seed, path_index=0))]
    fn trajectory(&self, horizon: f64, dt: f64, seed: u64, path_index: u64) -> PyResult<String> {
        let config = SimConfig::new(horizon, dt, 1, seed);
        simulate::trajectory_csv(&self.inner, &config, path_index).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("FiniteSystem(N={}, sigma2={:?})", self.inner.n, self.inner.sigma2)
    }
}

/// Countably infinite system with a finite head and constant tail.
#[pyclass(name = "InfiniteSystem", frozen)]
struct PyInfiniteSystem {
    inner: InfiniteSystemSpec,
}

#[pymethods]
impl PyInfiniteSystem {
    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        Ok(Self { inner: InfiniteSystemSpec::from_json(doc).map_err(to_py)? })
    }

    /// Validity problems, one message per failed gate; empty when usable.
    fn violations(&self) -> Vec<String> {
        self.inner.validate().violations
    }

    #[pyo3(signature = (n=4, strict=None))]
    fn check(&self, n: usize, strict: Option<bool>) -> PyResult<PyConditionReport> {
        let inner = conditions::infinite_ntuple_check(&self.inner, n, strict).map_err(to_py)?;
        Ok(PyConditionReport { inner })
    }

    /// Simulates the `m`-particle truncation with the top `buffer` ranks as
    /// a buffer zone.
    #[pyo3(signature = (horizon, dt, paths, seed, m, buffer, epsilons=None, windows=None))]
    #[allow(clippy::too_many_arguments)]
    fn simulate_truncated<'py>(
        &self,
        py: Python<'py>,
        horizon: f64,
        dt: f64,
        paths: usize,
        seed: u64,
        m: usize,
        buffer: usize,
        epsilons: Option<Vec<f64>>,
        windows: Option<Vec<(usize, usize)>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let config = sim_config(horizon, dt, paths, seed, epsilons, windows).with_truncation(m, buffer);
        let spec = &self.inner;
        let aggregate = py.detach(|| simulate::simulate_infinite_truncated(spec, &config)).map_err(to_py)?;
        aggregate_to_py(py, &aggregate)
    }
}

#[pymodule]
fn rankcollide_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConditionReport>()?;
    m.add_class::<PyFiniteSystem>()?;
    m.add_class::<PyInfiniteSystem>()?;
    m.add_function(wrap_pyfunction!(rank_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(ranked_values, m)?)?;
    m.add_function(wrap_pyfunction!(gaps, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_max, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(four_particle_report, m)?)?;
    Ok(())
}
