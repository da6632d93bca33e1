//! Python bindings: compact sets with Hausdorff/projection operations,
//! catalog problems, schedules, and the three-step iteration engine.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use tristep_core::engine::{
    self, NonSingletonPolicy, ProcessMode, RunSettings, SelectionStrategy, StagnationRule,
    StopRule,
};
use tristep_core::geometry::{self, Vector};
use tristep_core::mappings::ProximalMap;
use tristep_core::{catalog, oracles, schedules};

fn value_err(e: tristep_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(coords: Vec<f64>) -> PyResult<Vector> {
    Vector::new(coords).map_err(value_err)
}

fn parse_mode(mode: &str) -> PyResult<ProcessMode> {
    match mode {
        "A" => Ok(ProcessMode::A),
        "B" => Ok(ProcessMode::B),
        other => Err(PyValueError::new_err(format!("mode must be \"A\" or \"B\", got {other:?}"))),
    }
}

fn parse_strategy(strategy: &str) -> PyResult<SelectionStrategy> {
    match strategy {
        "nearest" => Ok(SelectionStrategy::Nearest),
        "seeded_random" => Ok(SelectionStrategy::SeededRandom),
        "first_listed" => Ok(SelectionStrategy::FirstListed),
        other => Err(PyValueError::new_err(format!(
            "strategy must be nearest | seeded_random | first_listed, got {other:?}"
        ))),
    }
}

/// A nonempty closed bounded subset of Euclidean space.
#[pyclass(name = "CompactSet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCompactSet {
    inner: geometry::CompactSet,
}

#[pymethods]
impl PyCompactSet {
    #[staticmethod]
    fn singleton(point: Vec<f64>) -> PyResult<Self> {
        Ok(PyCompactSet { inner: geometry::CompactSet::singleton(vector(point)?) })
    }

    #[staticmethod]
    fn points(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let pts = points.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
        Ok(PyCompactSet { inner: geometry::CompactSet::points(pts).map_err(value_err)? })
    }

    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        Ok(PyCompactSet {
            inner: geometry::CompactSet::ball(vector(center)?, radius).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        Ok(PyCompactSet {
            inner: geometry::CompactSet::axis_box(vector(lower)?, vector(upper)?)
                .map_err(value_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }

    /// Infimum distance from `x` to the set.
    fn dist(&self, x: Vec<f64>) -> PyResult<f64> {
        geometry::dist_point_to_set(&vector(x)?, &self.inner).map_err(value_err)
    }

    /// Nearest point of the set to `x`.
    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(geometry::project(&vector(x)?, &self.inner).map_err(value_err)?.into_coords())
    }

    #[pyo3(signature = (x, tol=1e-12))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.inner.contains(&vector(x)?, tol).map_err(value_err)
    }

    /// Hausdorff distance to another set as `(value, exact)`; `exact` is
    /// False when a mixed-kind pair fell back to the sampled estimator.
    fn hausdorff(&self, other: &PyCompactSet) -> PyResult<(f64, bool)> {
        let h = geometry::hausdorff(&self.inner, &other.inner).map_err(value_err)?;
        Ok((h.value, h.exact))
    }

    #[pyo3(signature = (other, n_samples=100_000, seed=0))]
    fn hausdorff_sampled(
        &self,
        other: &PyCompactSet,
        n_samples: usize,
        seed: u64,
    ) -> PyResult<f64> {
        geometry::hausdorff_sampled(&self.inner, &other.inner, n_samples, seed).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("CompactSet(kind={}, dim={})", self.inner.kind_name(), self.inner.dim())
    }
}

/// A catalog fixed-point problem: three set-valued maps on one domain.
#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: catalog::Problem,
}

#[pymethods]
impl PyProblem {
    /// Build a problem from the catalog; see `catalog_labels()`.
    #[staticmethod]
    #[pyo3(signature = (label, params=None))]
    fn catalog(label: &str, params: Option<Vec<f64>>) -> PyResult<Self> {
        let problem = catalog::problem(label, &params.unwrap_or_default()).map_err(value_err)?;
        Ok(PyProblem { inner: problem })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn domain(&self) -> PyCompactSet {
        PyCompactSet { inner: self.inner.domain.clone() }
    }

    /// Known common fixed points as `(points, strict_singleton_images)`,
    /// or None.
    #[getter]
    fn fixed_points(&self) -> Option<(Vec<Vec<f64>>, bool)> {
        self.inner.fixed_points.as_ref().map(|f| {
            (
                f.points.iter().map(|p| p.coords().to_vec()).collect(),
                f.strict_singleton_images,
            )
        })
    }

    /// Image of the i-th map (0-based) at `x`.
    fn evaluate(&self, map_index: usize, x: Vec<f64>) -> PyResult<PyCompactSet> {
        let map = self.map(map_index)?;
        Ok(PyCompactSet { inner: map.evaluate(&vector(x)?).map_err(value_err)? })
    }

    /// Metric-projection image `P_T(x)` of the i-th map at `x`.
    fn proximal(&self, map_index: usize, x: Vec<f64>) -> PyResult<PyCompactSet> {
        let map = self.map(map_index)?;
        Ok(PyCompactSet {
            inner: ProximalMap::new(map.clone())
                .evaluate_proximal(&vector(x)?)
                .map_err(value_err)?,
        })
    }

    /// `dist(x, T_i x)` for the three maps.
    fn residuals(&self, x: Vec<f64>) -> PyResult<[f64; 3]> {
        let x = vector(x)?;
        let mut out = [0.0; 3];
        for (i, map) in self.inner.maps.iter().enumerate() {
            out[i] = map.residual(&x).map_err(value_err)?;
        }
        Ok(out)
    }
}

impl PyProblem {
    fn map(&self, index: usize) -> PyResult<&tristep_core::mappings::MultiMap> {
        self.inner
            .maps
            .get(index)
            .ok_or_else(|| PyValueError::new_err(format!("map index {index} out of range 0..3")))
    }
}

/// Coefficient and error sequences for the iteration.
#[pyclass(name = "Schedule", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: schedules::Schedule,
}

#[pymethods]
impl PySchedule {
    /// Built-in schedules: "constant_decay", "mann", "ishikawa".
    #[staticmethod]
    fn builtin(name: &str, dim: usize) -> PyResult<Self> {
        Ok(PySchedule { inner: schedules::Schedule::builtin(name, dim).map_err(value_err)? })
    }

    /// Replace the error rule with seeded uniform draws from a box.
    fn with_seeded_errors(&self, lower: Vec<f64>, upper: Vec<f64>, seed: u64) -> PyResult<Self> {
        let rule = schedules::ErrorRule::SeededUniform {
            lower: vector(lower)?,
            upper: vector(upper)?,
            seed,
        };
        Ok(PySchedule { inner: self.inner.clone().with_errors(rule).map_err(value_err)? })
    }

    /// Replace the error rule with a constant point.
    fn with_constant_errors(&self, point: Vec<f64>) -> PyResult<Self> {
        let rule = schedules::ErrorRule::Constant { point: vector(point)? };
        Ok(PySchedule { inner: self.inner.clone().with_errors(rule).map_err(value_err)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    /// The coefficient tuple at index n as a dict, plus the three error
    /// vectors under "errors".
    fn coefficients_at<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        let t = self.inner.coefficients_at(n).map_err(value_err)?;
        let dict = pyo3::types::PyDict::new(py);
        for (k, v) in [
            ("a", t.a),
            ("b", t.b),
            ("c", t.c),
            ("d", t.d),
            ("e", t.e),
            ("alpha", t.alpha),
            ("beta", t.beta),
            ("gamma", t.gamma),
        ] {
            dict.set_item(k, v)?;
        }
        let errors: Vec<Vec<f64>> = t.errors.iter().map(|e| e.coords().to_vec()).collect();
        dict.set_item("errors", errors)?;
        Ok(dict.into_any())
    }

    /// `theta_n = M (b_n + e_n + gamma_n)`.
    fn theta_at(&self, n: u64, m: f64) -> PyResult<f64> {
        self.inner.theta_at(n, m).map_err(value_err)
    }

    /// Validate the theorem hypotheses up to `horizon`; returns
    /// `(strict_ok, warnings)`. Raises in strict mode on the first
    /// violation.
    #[pyo3(signature = (horizon, strict=false))]
    fn validate(&self, horizon: u64, strict: bool) -> PyResult<(bool, Vec<String>)> {
        let report = self.inner.validate(horizon, strict).map_err(value_err)?;
        Ok((report.strict_ok, report.warnings))
    }
}

/// The recorded trajectory of one run.
#[pyclass(name = "Trace", frozen)]
struct PyTrace {
    inner: engine::Trace,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn iterations(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn stop_reason(&self) -> String {
        self.inner.meta.stop_reason.to_string()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.meta.warnings.clone()
    }

    #[getter]
    fn final_x(&self) -> Option<Vec<f64>> {
        self.inner.final_record().map(|r| r.x.coords().to_vec())
    }

    #[getter]
    fn final_residuals(&self) -> Option<[f64; 3]> {
        self.inner.final_record().map(|r| r.residuals)
    }

    #[getter]
    fn final_dist_f(&self) -> Option<f64> {
        self.inner.final_record().and_then(|r| r.dist_f)
    }

    /// Iterates x_n as a list of coordinate lists.
    fn xs(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.x.coords().to_vec()).collect()
    }

    /// Residual triples per iteration.
    fn residuals(&self) -> Vec<[f64; 3]> {
        self.inner.records.iter().map(|r| r.residuals).collect()
    }

    /// The trace in the CSV layout the CLI writes.
    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    /// Audit the per-step Fejér bound against a fixed point `p`.
    #[pyo3(signature = (p, m=None, tol=1e-9))]
    fn fejer_check(&self, p: Vec<f64>, m: Option<f64>, tol: f64) -> PyResult<bool> {
        Ok(engine::fejer_check(&self.inner, &vector(p)?, m, tol).map_err(value_err)?.passed)
    }
}

/// Run process A or B on a problem until a stop rule fires.
#[pyfunction]
#[pyo3(signature = (
    problem,
    x1,
    schedule,
    mode="A",
    strategy="nearest",
    seed=1,
    max_iter=10_000,
    residual_tol=1e-8,
    stagnation_tol=None,
    stagnation_window=None,
    refuse_nonsingleton=false,
))]
#[allow(clippy::too_many_arguments)]
fn run(
    problem: &PyProblem,
    x1: Vec<f64>,
    schedule: &PySchedule,
    mode: &str,
    strategy: &str,
    seed: u64,
    max_iter: u64,
    residual_tol: Option<f64>,
    stagnation_tol: Option<f64>,
    stagnation_window: Option<u32>,
    refuse_nonsingleton: bool,
) -> PyResult<PyTrace> {
    let stagnation = match (stagnation_tol, stagnation_window) {
        (Some(tol), Some(window)) => Some(StagnationRule { tol, window }),
        (None, None) => None,
        _ => {
            return Err(PyValueError::new_err(
                "stagnation_tol and stagnation_window must be given together",
            ))
        }
    };
    let settings = RunSettings {
        mode: parse_mode(mode)?,
        strategy: parse_strategy(strategy)?,
        seed,
        stop: StopRule { max_iter, residual_tol, stagnation },
        nonsingleton_policy: if refuse_nonsingleton {
            NonSingletonPolicy::Refuse
        } else {
            NonSingletonPolicy::Warn
        },
    };
    match engine::run(&problem.inner, &vector(x1)?, &schedule.inner, &settings) {
        Ok(trace) => Ok(PyTrace { inner: trace }),
        Err(failure) => Err(PyRuntimeError::new_err(failure.to_string())),
    }
}

/// Labels accepted by `Problem.catalog`.
#[pyfunction]
fn catalog_labels() -> Vec<&'static str> {
    catalog::LABELS.to_vec()
}

/// Max absolute gap of the four-point identity on seeded random tuples;
/// effectively rounding noise in exact arithmetic.
#[pyfunction]
#[pyo3(signature = (count=1000, dim=3, seed=42))]
fn four_point_identity_gap(count: usize, dim: usize, seed: u64) -> PyResult<f64> {
    let (tuples, weights) = oracles::random_simplex_tuples(count, dim, seed);
    let report = oracles::four_point_identity_check(&tuples, &weights, 0.0).map_err(value_err)?;
    Ok(report.violations.iter().map(|v| (v.lhs - v.rhs).abs()).fold(0.0, f64::max))
}

#[pymodule]
fn tristep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCompactSet>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_labels, m)?)?;
    m.add_function(wrap_pyfunction!(four_point_identity_gap, m)?)?;
    Ok(())
}
