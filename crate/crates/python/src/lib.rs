//! Python bindings: states, ensembles, Chernoff quantities, detectors and the
//! evaluation routines. Matrices cross the boundary as lists of lists of
//! `complex`; pair indices are 0-based as in the Rust API.

use mqcb::chernoff::{self, ConditionReport};
use mqcb::cli::generate::{generate, GenKind, GenParams};
use mqcb::cli::report;
use mqcb::cli::scenario::ScenarioFile;
use mqcb::detectors::{self, SubDetectorStrategy};
use mqcb::evaluation::{self, ExperimentConfig, ExponentFit};
use mqcb::linalg::{Complex64, ComplexMatrix};
use mqcb::states::{self, DEFAULT_DIM_CAP};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(mqcb_py, MqcbError, PyValueError);

fn to_py(e: impl std::fmt::Display) -> PyErr {
    MqcbError::new_err(e.to_string())
}

type Rows = Vec<Vec<Complex64>>;

fn matrix_from_rows(rows: Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

#[pyclass(name = "DensityMatrix", module = "mqcb_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: states::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    /// Validates a Hermitian, positive semidefinite, unit-trace matrix.
    #[new]
    fn new(matrix: Rows) -> PyResult<Self> {
        let inner = states::density_from_matrix(matrix_from_rows(matrix)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn pure(vector: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: states::pure_state(&vector).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn classical(probabilities: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: states::classical_state(&probabilities).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn random(dim: usize, rank: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: states::random_density(dim, rank, seed).map_err(to_py)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Rows {
        matrix_to_rows(self.inner.matrix())
    }

    /// `(1 - epsilon) self + epsilon other`.
    fn mix(&self, other: &PyDensityMatrix, epsilon: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.mix(&other.inner, epsilon).map_err(to_py)?,
        })
    }

    #[pyo3(signature = (n, dim_cap = DEFAULT_DIM_CAP))]
    fn tensor_power(&self, n: usize, dim_cap: usize) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.tensor_power(n, dim_cap).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

#[pyclass(name = "Ensemble", module = "mqcb_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyEnsemble {
    inner: states::Ensemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    #[pyo3(signature = (states, labels = None))]
    fn new(states: Vec<PyDensityMatrix>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let mut inner =
            states::Ensemble::new(states.into_iter().map(|s| s.inner).collect()).map_err(to_py)?;
        if let Some(labels) = labels {
            inner = inner.with_labels(labels).map_err(to_py)?;
        }
        Ok(Self { inner })
    }

    /// Loads a scenario file's JSON text.
    #[staticmethod]
    fn from_scenario(text: &str) -> PyResult<Self> {
        let file = ScenarioFile::parse(text).map_err(to_py)?;
        Ok(Self {
            inner: file.to_ensemble().map_err(to_py)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn state(&self, i: usize) -> PyResult<PyDensityMatrix> {
        if i >= self.inner.len() {
            return Err(to_py(format!("state index {i} out of range")));
        }
        Ok(PyDensityMatrix {
            inner: self.inner.state(i).clone(),
        })
    }

    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "Detector", module = "mqcb_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyDetector {
    inner: detectors::Detector,
}

#[pymethods]
impl PyDetector {
    /// Validates PSD elements summing to the identity.
    #[new]
    fn new(elements: Vec<Rows>) -> PyResult<Self> {
        let elements = elements
            .into_iter()
            .map(matrix_from_rows)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: detectors::Detector::new(elements).map_err(to_py)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn elements(&self) -> Vec<Rows> {
        self.inner.elements().iter().map(matrix_to_rows).collect()
    }

    /// `(min_eigenvalue, identity_defect, is_valid)`.
    fn validity(&self) -> PyResult<(f64, f64, bool)> {
        let v = self.inner.validity().map_err(to_py)?;
        Ok((v.min_eigenvalue, v.identity_defect, v.is_valid()))
    }

    /// `Σ_i tr[ρ_i (I - E_i)]` for states on the detector's space.
    fn error_sum(&self, states: Vec<PyDensityMatrix>) -> PyResult<f64> {
        let states: Vec<_> = states.into_iter().map(|s| s.inner).collect();
        self.inner.error_sum(&states).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// `(xi, s_star, f_min)`.
#[pyfunction]
fn chernoff_distance(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix) -> PyResult<(f64, f64, f64)> {
    let r = chernoff::chernoff_distance(&rho1.inner, &rho2.inner).map_err(to_py)?;
    Ok((r.xi, r.s_star, r.f_min))
}

/// `(value, (i, j))`.
#[pyfunction]
#[pyo3(name = "mqcb")]
fn multiple_chernoff_bound(ensemble: &PyEnsemble) -> PyResult<(f64, (usize, usize))> {
    let m = chernoff::mqcb(&ensemble.inner).map_err(to_py)?;
    Ok((m.value, m.pair))
}

#[pyfunction]
fn xi_bar(ensemble: &PyEnsemble, i: usize, j: usize) -> PyResult<f64> {
    chernoff::xi_bar(&ensemble.inner, i, j).map_err(to_py)
}

fn condition_dict<'py>(py: Python<'py>, c: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("pair", c.pair)?;
    d.set_item("xi_ij", c.xi_ij)?;
    d.set_item("xi_bar", c.xi_bar)?;
    d.set_item("mqcb", c.mqcb)?;
    d.set_item("holds", c.holds)?;
    d.set_item("margin", c.margin)?;
    d.set_item("reference_level", c.reference_level())?;
    Ok(d)
}

#[pyfunction]
fn theorem_condition<'py>(py: Python<'py>, ensemble: &PyEnsemble) -> PyResult<Bound<'py, PyDict>> {
    let c = chernoff::theorem_condition(&ensemble.inner).map_err(to_py)?;
    condition_dict(py, &c)
}

#[pyfunction]
fn holevo_helstrom(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix) -> PyResult<PyDetector> {
    Ok(PyDetector {
        inner: detectors::holevo_helstrom(&rho1.inner, &rho2.inner).map_err(to_py)?,
    })
}

#[pyfunction]
fn wedge(rho1: &PyDensityMatrix, rho2: &PyDensityMatrix) -> PyResult<Rows> {
    Ok(matrix_to_rows(
        &detectors::wedge(&rho1.inner, &rho2.inner).map_err(to_py)?,
    ))
}

#[pyfunction]
fn pgm(states: Vec<PyDensityMatrix>) -> PyResult<PyDetector> {
    let states: Vec<_> = states.into_iter().map(|s| s.inner).collect();
    Ok(PyDetector {
        inner: detectors::pgm(&states).map_err(to_py)?,
    })
}

/// Composes a binary detector with partial elements; returns the detector
/// and the minimum eigenvalue of `Ẽ3 - R²`.
#[pyfunction]
fn compose_with_binary(partials: Vec<Rows>, binary: &PyDetector) -> PyResult<(PyDetector, f64)> {
    let partials = partials
        .into_iter()
        .map(matrix_from_rows)
        .collect::<PyResult<Vec<_>>>()?;
    let (det, trace) = detectors::compose_with_binary(&partials, &binary.inner).map_err(to_py)?;
    Ok((PyDetector { inner: det }, trace.r_squared_gap))
}

fn strategy(sub: &str) -> PyResult<SubDetectorStrategy> {
    sub.parse().map_err(to_py)
}

/// Returns the split detector and a dict with `n1`, `n2` and the error sums
/// of the sub-detectors and the binary test.
#[pyfunction]
#[pyo3(signature = (ensemble, n, w1 = 0.5, sub = "pgm", dim_cap = DEFAULT_DIM_CAP))]
fn build_split_detector<'py>(
    py: Python<'py>,
    ensemble: &PyEnsemble,
    n: usize,
    w1: f64,
    sub: &str,
    dim_cap: usize,
) -> PyResult<(PyDetector, Bound<'py, PyDict>)> {
    let split = detectors::build_split_detector(&ensemble.inner, n, w1, strategy(sub)?, dim_cap)
        .map_err(to_py)?;
    let rep = &split.report;
    let d = PyDict::new(py);
    d.set_item("n1", rep.n1)?;
    d.set_item("n2", rep.n2)?;
    d.set_item("sub1_err_sm", rep.sub1_err_sm)?;
    d.set_item("sub2_err_sm", rep.sub2_err_sm)?;
    d.set_item("binary_err_sm", rep.binary_err_sm)?;
    d.set_item("r_squared_gap", split.trace.r_squared_gap)?;
    Ok((PyDetector { inner: split.detector }, d))
}

/// `(per_state_error, err_sm)` of a detector on `ensemble^{⊗n}`.
#[pyfunction]
#[pyo3(signature = (ensemble, n, detector, dim_cap = DEFAULT_DIM_CAP))]
fn error_sum(
    ensemble: &PyEnsemble,
    n: usize,
    detector: &PyDetector,
    dim_cap: usize,
) -> PyResult<(Vec<f64>, f64)> {
    let rep = evaluation::error_sum(&ensemble.inner, n, &detector.inner, dim_cap).map_err(to_py)?;
    Ok((rep.per_state_error, rep.err_sm))
}

/// Rows `(n, err_sm, bound, holds)` for `n = 1..=n_max`.
#[pyfunction]
#[pyo3(signature = (rho1, rho2, n_max, dim_cap = DEFAULT_DIM_CAP))]
fn binary_chernoff_upper_check(
    rho1: &PyDensityMatrix,
    rho2: &PyDensityMatrix,
    n_max: usize,
    dim_cap: usize,
) -> PyResult<Vec<(usize, f64, f64, bool)>> {
    let rows = evaluation::binary_chernoff_upper_check(&rho1.inner, &rho2.inner, n_max, dim_cap)
        .map_err(to_py)?;
    Ok(rows.iter().map(|r| (r.n, r.err_sm, r.bound, r.holds)).collect())
}

/// Fitted slope of `-ln err` against `n`; `None` when it cannot be fitted.
#[pyfunction]
#[pyo3(signature = (rows, k_fit = 4))]
fn exponent_estimate(rows: Vec<(usize, f64)>, k_fit: usize) -> PyResult<Option<f64>> {
    let series = evaluation::exponent_estimate(&rows, k_fit).map_err(to_py)?;
    Ok(match series.fit {
        ExponentFit::Slope { slope, .. } => Some(slope),
        _ => None,
    })
}

/// Runs the experiment and returns the report text (`"csv"` or `"json"`).
#[pyfunction]
#[pyo3(signature = (ensemble, n_min, n_max, w1 = 0.5, sub = "pgm", k_fit = 4, dim_cap = DEFAULT_DIM_CAP, n_step = 1, format = "json"))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    ensemble: &PyEnsemble,
    n_min: usize,
    n_max: usize,
    w1: f64,
    sub: &str,
    k_fit: usize,
    dim_cap: usize,
    n_step: usize,
    format: &str,
) -> PyResult<String> {
    let config = ExperimentConfig {
        n_min,
        n_max,
        n_step,
        w1,
        strategy: strategy(sub)?,
        k_fit,
        dim_cap,
    };
    let table = evaluation::run_experiment(&ensemble.inner, &config).map_err(to_py)?;
    match format {
        "csv" => Ok(report::table_csv(&table)),
        "json" => Ok(report::table_json(&table)),
        other => Err(to_py(format!("unknown format '{other}'"))),
    }
}

/// Scenario file text for a generator kind.
#[pyfunction]
#[pyo3(signature = (kind, r = 3, d = 2, seed = 7))]
fn generate_scenario(kind: &str, r: usize, d: usize, seed: u64) -> PyResult<String> {
    let kind: GenKind = kind.parse().map_err(to_py)?;
    let file = generate(kind, GenParams { r, dim: d, seed }).map_err(to_py)?;
    Ok(file.to_json())
}

#[pymodule]
fn mqcb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MqcbError", m.py().get_type::<MqcbError>())?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyDetector>()?;
    m.add_function(wrap_pyfunction!(chernoff_distance, m)?)?;
    m.add_function(wrap_pyfunction!(multiple_chernoff_bound, m)?)?;
    m.add_function(wrap_pyfunction!(xi_bar, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_condition, m)?)?;
    m.add_function(wrap_pyfunction!(holevo_helstrom, m)?)?;
    m.add_function(wrap_pyfunction!(wedge, m)?)?;
    m.add_function(wrap_pyfunction!(pgm, m)?)?;
    m.add_function(wrap_pyfunction!(compose_with_binary, m)?)?;
    m.add_function(wrap_pyfunction!(build_split_detector, m)?)?;
    m.add_function(wrap_pyfunction!(error_sum, m)?)?;
    m.add_function(wrap_pyfunction!(binary_chernoff_upper_check, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    Ok(())
}
