//! Python bindings for `treegini`.
//!
//! Tree classes, regimes and variants are passed as their kebab-case names
//! (`"bst"`, `"caterpillar-pa"`, `"poisson"`, `"wealth"`). Records come back
//! as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

use treegini::experiments::oracle::{exact_expectation, exact_to_f64};
use treegini::experiments::{grow, MAX_EXPONENTIAL_TIME};
use treegini::report::TreeSummary;
use treegini::{
    analytical_limit, analytical_limits, convergence_sweep, duality_experiment, run_monte_carlo,
    BinaryModel, DegreeMultiset, Error, GiniVariant, Parallelism, Regime, ReplacementMatrix,
    Scenario, TreeClass,
};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::UndefinedIndex
        | Error::EmptySamples
        | Error::UnsupportedMatrix(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn name<T: DeserializeOwned>(kind: &str, value: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| PyValueError::new_err(format!("unknown {kind} {value:?}")))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn threads(n: Option<usize>) -> PyResult<Parallelism> {
    match n {
        Some(0) => Err(PyValueError::new_err("threads must be at least 1")),
        other => Ok(Parallelism(other)),
    }
}

fn scenario(class: TreeClass, n: Option<u64>, t: Option<f64>, spine: u64) -> PyResult<Scenario> {
    let sc = match (n, t) {
        (Some(n), None) => Scenario::discrete(class, n, spine),
        (None, Some(t)) => {
            if class != TreeClass::CaterpillarUniform && t > MAX_EXPONENTIAL_TIME {
                return Err(PyValueError::new_err(format!(
                    "t = {t} exceeds the cap {MAX_EXPONENTIAL_TIME} for class {class}"
                )));
            }
            Scenario::poisson(class, t, spine)
        }
        _ => return Err(PyValueError::new_err("give exactly one of n and t")),
    };
    sc.validate().map_err(err)?;
    Ok(sc)
}

/// Counter-based random source: one independent stream per `(seed, stream)`.
#[pyclass(name = "RandomSource")]
struct PyRandomSource(treegini::RandomSource);

#[pymethods]
impl PyRandomSource {
    #[new]
    #[pyo3(signature = (seed, stream = 0))]
    fn new(seed: u64, stream: u64) -> Self {
        Self(treegini::RandomSource::new(seed, stream))
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn below(&mut self, bound: u64) -> PyResult<u64> {
        if bound == 0 {
            return Err(PyValueError::new_err("bound must be positive"));
        }
        Ok(self.0.below(bound))
    }

    fn unit(&mut self) -> f64 {
        self.0.unit()
    }

    fn exponential(&mut self, rate: f64) -> PyResult<f64> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(PyValueError::new_err("rate must be positive and finite"));
        }
        Ok(self.0.exponential(rate))
    }

    fn poisson(&mut self, lam: f64) -> PyResult<u64> {
        if !(lam >= 0.0 && lam.is_finite()) {
            return Err(PyValueError::new_err("lambda must be finite and >= 0"));
        }
        Ok(self.0.poisson(lam))
    }
}

/// One grown tree.
#[pyclass(name = "Tree", frozen)]
struct PyTree(TreeSummary);

#[pymethods]
impl PyTree {
    #[getter]
    fn class_name(&self) -> String {
        self.0.class.to_string()
    }

    #[getter]
    fn order(&self) -> u64 {
        self.0.order
    }

    #[getter]
    fn event_count(&self) -> Option<u64> {
        self.0.event_count
    }

    /// Degree multiset as `{degree: count}`.
    #[getter]
    fn degrees<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, v) in &self.0.degrees {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    #[getter]
    fn gini(&self) -> Option<f64> {
        self.0.gini
    }

    #[getter]
    fn wealth_gini(&self) -> Option<f64> {
        self.0.wealth_gini
    }

    #[getter]
    fn attachments(&self) -> Option<Vec<u64>> {
        self.0.attachments.clone()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        let gini = self.0.gini.map_or("None".to_string(), |g| g.to_string());
        format!("Tree(class={}, order={}, gini={gini})", self.0.class, self.0.order)
    }
}

/// Grows one tree. Give `n` for discrete growth or `t` for poissonized growth.
#[pyfunction]
#[pyo3(signature = (class_name, n = None, t = None, spine = 10, seed = 1, stream = 0))]
fn simulate(
    py: Python<'_>,
    class_name: &str,
    n: Option<u64>,
    t: Option<f64>,
    spine: u64,
    seed: u64,
    stream: u64,
) -> PyResult<PyTree> {
    let sc = scenario(name("class", class_name)?, n, t, spine)?;
    let summary = py.detach(|| {
        let mut rng = treegini::RandomSource::new(seed, stream);
        let tree = grow(&sc, &mut rng)?;
        TreeSummary::new(&sc, seed, stream, &tree)
    });
    Ok(PyTree(summary.map_err(err)?))
}

/// Monte Carlo estimate of a class mean index.
#[pyfunction]
#[pyo3(signature = (class_name, n = None, t = None, spine = 10, reps = 100, seed = 1, variant = "topological", threads = None))]
#[allow(clippy::too_many_arguments)]
fn estimate<'py>(
    py: Python<'py>,
    class_name: &str,
    n: Option<u64>,
    t: Option<f64>,
    spine: u64,
    reps: u64,
    seed: u64,
    variant: &str,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let sc = scenario(name("class", class_name)?, n, t, spine)?;
    let variant: GiniVariant = name("variant", variant)?;
    let par = self::threads(threads)?;
    let record = py.detach(|| run_monte_carlo(&sc, variant, reps, seed, par)).map_err(err)?;
    to_py(py, &record)
}

/// Discrete growth at `n = g(t)` against poissonized growth at `t`.
#[pyfunction]
#[pyo3(signature = (class_name, t, spine = 10, reps = 100, seed = 1, tol = 0.02, variant = "topological", threads = None))]
#[allow(clippy::too_many_arguments)]
fn duality<'py>(
    py: Python<'py>,
    class_name: &str,
    t: f64,
    spine: u64,
    reps: u64,
    seed: u64,
    tol: f64,
    variant: &str,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let class: TreeClass = name("class", class_name)?;
    scenario(class, None, Some(t), spine)?;
    let variant: GiniVariant = name("variant", variant)?;
    let par = self::threads(threads)?;
    let report =
        py.detach(|| duality_experiment(class, spine, t, reps, seed, tol, variant, par)).map_err(err)?;
    to_py(py, &report)
}

/// Estimates over a grid of horizons, each row carrying the analytical limit.
#[pyfunction]
#[pyo3(signature = (class_name, grid, regime = "discrete", spine = 10, reps = 100, seed = 1, variant = "topological", threads = None))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    class_name: &str,
    grid: Vec<f64>,
    regime: &str,
    spine: u64,
    reps: u64,
    seed: u64,
    variant: &str,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let class: TreeClass = name("class", class_name)?;
    let regime: Regime = name("regime", regime)?;
    if regime == Regime::Poisson {
        for &t in &grid {
            scenario(class, None, Some(t), spine)?;
        }
    }
    let variant: GiniVariant = name("variant", variant)?;
    let par = self::threads(threads)?;
    let rows = py
        .detach(|| convergence_sweep(class, regime, &grid, spine, variant, reps, seed, par))
        .map_err(err)?;
    to_py(py, &rows)
}

/// Analytical limits of every class as a list of dicts.
#[pyfunction]
fn limits(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &analytical_limits().map_err(err)?)
}

/// Analytical limit of one class and variant.
#[pyfunction]
#[pyo3(signature = (class_name, variant = "topological"))]
fn limit(class_name: &str, variant: &str) -> PyResult<f64> {
    analytical_limit(name("class", class_name)?, name("variant", variant)?).map_err(err)
}

/// Exact expected Gini by enumeration, as `fractions.Fraction`.
#[pyfunction]
#[pyo3(signature = (class_name, n, spine = 3))]
fn oracle<'py>(py: Python<'py>, class_name: &str, n: u64, spine: u64) -> PyResult<Bound<'py, PyAny>> {
    let class: TreeClass = name("class", class_name)?;
    let exact = py.detach(|| exact_expectation(class, n, spine)).map_err(err)?;
    py.import("fractions")?.getattr("Fraction")?.call1((*exact.numer(), *exact.denom()))
}

/// Same value as `oracle`, as a float.
#[pyfunction]
#[pyo3(signature = (class_name, n, spine = 3))]
fn oracle_value(class_name: &str, n: u64, spine: u64) -> PyResult<f64> {
    let exact = exact_expectation(name("class", class_name)?, n, spine).map_err(err)?;
    Ok(exact_to_f64(&exact))
}

/// Gini index of a list of node degrees.
#[pyfunction]
fn degree_gini(degrees: Vec<u64>) -> PyResult<f64> {
    treegini::degree_gini(&DegreeMultiset::from_degrees(degrees)).map_err(err)
}

/// Closed-form Gini of a binary tree with `n1`, `n2`, `n3` nodes of degree 1, 2, 3.
#[pyfunction]
fn binary_gini(n1: u64, n2: u64, n3: u64) -> PyResult<f64> {
    treegini::binary_gini(n1, n2, n3).map_err(err)
}

/// Gini index of spine wealth.
#[pyfunction]
fn wealth_gini(wealth: Vec<u64>) -> PyResult<f64> {
    let total = wealth.iter().sum();
    treegini::wealth_gini(&wealth, total).map_err(err)
}

/// Principal eigenvalue and L1-normalized eigenvector of the urn matrix of
/// `"bst"` or `"pyramid"`.
#[pyfunction]
fn principal_eigenpair(model: &str) -> PyResult<(f64, (f64, f64))> {
    let model: BinaryModel = name("model", model)?;
    let e = treegini::principal_eigenpair(&ReplacementMatrix::for_model(model)).map_err(err)?;
    Ok((e.lambda1, (e.v1[0], e.v1[1])))
}

#[pymodule]
pub fn pytreegini(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRandomSource>()?;
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(duality, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_value, m)?)?;
    m.add_function(wrap_pyfunction!(degree_gini, m)?)?;
    m.add_function(wrap_pyfunction!(binary_gini, m)?)?;
    m.add_function(wrap_pyfunction!(wealth_gini, m)?)?;
    m.add_function(wrap_pyfunction!(principal_eigenpair, m)?)?;
    m.add("MAX_EXPONENTIAL_TIME", MAX_EXPONENTIAL_TIME)?;
    Ok(())
}
