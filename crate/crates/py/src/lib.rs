use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use gwloc::algebra::{format_rational, parse_rational, Rational};
use gwloc::axioms::{run_suite, wdvv_quantum_product, Manifest};
use gwloc::gkm::{builtin, space_from_str, space_to_json, GkmSpace};
use gwloc::graphs::{enumerate_graphs, graph_count};
use gwloc::localize::{compute_invariant, ComputeOptions, InvariantRequest, InvariantResult};
use gwloc::GwError;

fn to_py(e: GwError) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format_rational(r),))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn options(threads: Option<usize>, per_graph: bool) -> ComputeOptions {
    ComputeOptions {
        per_graph,
        threads,
        ..Default::default()
    }
}

/// A GKM space: fixed points, invariant spheres and named classes.
#[pyclass(name = "Space", module = "gwloc_py", frozen)]
struct PySpace {
    inner: GkmSpace,
}

#[pymethods]
impl PySpace {
    /// One of the built-in spaces, e.g. `"P2"` or `"P1xP1"`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let name = name.strip_prefix("builtin:").unwrap_or(name);
        Ok(PySpace {
            inner: builtin(name).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySpace {
            inner: space_from_str(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&space_to_json(&self.inner)).expect("json values serialize")
    }

    /// Empty list when every structural rule holds, else one message per failure.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .failures
            .iter()
            .map(|f| f.to_string())
            .collect()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn torus_rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn h2_rank(&self) -> usize {
        self.inner.h2_rank
    }

    #[getter]
    fn fixed_points(&self) -> Vec<String> {
        self.inner.points.iter().map(|p| p.id.clone()).collect()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.classes.keys().cloned().collect()
    }

    /// Symplectic area of a curve class.
    fn area<'py>(&self, py: Python<'py>, class_: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.area(&class_).map_err(to_py)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Space(dim={}, fixed_points={}, spheres={})",
            self.inner.dim,
            self.inner.points.len(),
            self.inner.spheres.len()
        )
    }
}

/// Result of a localization computation.
#[pyclass(name = "Invariant", module = "gwloc_py", frozen)]
struct PyInvariant {
    result: InvariantResult,
    json: serde_json::Value,
}

#[pymethods]
impl PyInvariant {
    /// Non-equivariant number, or `None` if the value has positive degree.
    #[getter]
    fn constant<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.result
            .constant
            .as_ref()
            .map(|c| fraction(py, c))
            .transpose()
    }

    /// The exact equivariant value as a rational function of the torus weights.
    #[getter]
    fn equivariant(&self) -> String {
        self.result.equivariant.to_string()
    }

    #[getter]
    fn is_polynomial(&self) -> bool {
        self.result.is_polynomial
    }

    #[getter]
    fn vdim(&self) -> i64 {
        self.result.vdim
    }

    #[getter]
    fn graph_count(&self) -> String {
        self.result.graph_count.to_string()
    }

    /// Evaluate the equivariant value at rational weights given as strings
    /// or ints; `None` where a denominator vanishes.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        point: Vec<String>,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        let pt = point
            .iter()
            .map(|s| parse_rational(s))
            .collect::<gwloc::Result<Vec<_>>>()
            .map_err(to_py)?;
        let v = self.result.equivariant.evaluate(&pt).map_err(to_py)?;
        v.as_ref().map(|c| fraction(py, c)).transpose()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.json)
    }

    fn __repr__(&self) -> String {
        match &self.result.constant {
            Some(c) => format!("Invariant({})", format_rational(c)),
            None => format!("Invariant(equivariant={})", self.result.equivariant),
        }
    }
}

/// Equivariant Gromov-Witten invariant `<insertions>_{genus, class}`.
///
/// Insertions use the CLI syntax: `"pt"`, `"H^2"`, `"tau:1:H"`.
#[pyfunction]
#[pyo3(signature = (space, genus, class_, insertions, per_graph = false, threads = None))]
fn compute(
    py: Python<'_>,
    space: &PySpace,
    genus: u32,
    class_: Vec<i64>,
    insertions: Vec<String>,
    per_graph: bool,
    threads: Option<usize>,
) -> PyResult<PyInvariant> {
    let space = &space.inner;
    let specs: Vec<&str> = insertions.iter().map(String::as_str).collect();
    let result = py
        .detach(|| {
            let req = InvariantRequest::parse(space, genus, class_, &specs)?;
            compute_invariant(&req, &options(threads, per_graph))
        })
        .map_err(to_py)?;
    let json = result.to_json(space);
    Ok(PyInvariant { result, json })
}

/// Number of decorated graphs with `markings` marked points.
#[pyfunction]
#[pyo3(signature = (space, genus, class_, markings = 0))]
fn count_graphs(
    space: &PySpace,
    genus: u32,
    class_: Vec<i64>,
    markings: usize,
) -> PyResult<String> {
    Ok(graph_count(&space.inner, genus, markings, &class_)
        .map_err(to_py)?
        .to_string())
}

/// The decorated graphs themselves, as dicts.
#[pyfunction]
#[pyo3(signature = (space, genus, class_, markings = 0))]
fn graphs<'py>(
    py: Python<'py>,
    space: &PySpace,
    genus: u32,
    class_: Vec<i64>,
    markings: usize,
) -> PyResult<Bound<'py, PyList>> {
    let gs = enumerate_graphs(&space.inner, genus, markings, &class_).map_err(to_py)?;
    let items = gs
        .iter()
        .map(|g| json_to_py(py, &g.to_json(&space.inner)))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// Run an axiom manifest (the bundled one when `path` is omitted); returns
/// `(all_passed, reports)`.
#[pyfunction]
#[pyo3(signature = (path = None, threads = None))]
fn check<'py>(
    py: Python<'py>,
    path: Option<&str>,
    threads: Option<usize>,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let manifest = match path {
        Some(p) => Manifest::from_path(std::path::Path::new(p)).map_err(to_py)?,
        None => Manifest::bundled(),
    };
    let reports = py
        .detach(|| run_suite(&manifest, &options(threads, false)))
        .map_err(to_py)?;
    let pass = reports.iter().all(|r| r.pass());
    let v = serde_json::Value::Array(reports.iter().map(|r| r.to_json()).collect());
    Ok((pass, json_to_py(py, &v)?))
}

/// Small quantum product table up to an area bound; returns
/// `(associative, table)`.
#[pyfunction]
#[pyo3(signature = (space, basis, area = "3"))]
fn quantum<'py>(
    py: Python<'py>,
    space: &PySpace,
    basis: Vec<String>,
    area: &str,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let bound = parse_rational(area).map_err(to_py)?;
    let basis: Vec<&str> = basis.iter().map(String::as_str).collect();
    let (table, report) = py
        .detach(|| wdvv_quantum_product(&space.inner, &basis, &bound, &ComputeOptions::default()))
        .map_err(to_py)?;
    Ok((report.pass(), json_to_py(py, &table.to_json())?))
}

/// Closed-form count of rational plane curves of degree `d` through `3d-1` points.
#[pyfunction]
fn kontsevich<'py>(py: Python<'py>, d: u64) -> PyResult<Bound<'py, PyAny>> {
    if d == 0 {
        return Err(PyValueError::new_err("degree must be positive"));
    }
    fraction(py, &gwloc::axioms::kontsevich_oracle(d))
}

#[pymodule]
pub fn gwloc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyInvariant>()?;
    m.add_function(wrap_pyfunction!(compute, m)?)?;
    m.add_function(wrap_pyfunction!(count_graphs, m)?)?;
    m.add_function(wrap_pyfunction!(graphs, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(quantum, m)?)?;
    m.add_function(wrap_pyfunction!(kontsevich, m)?)?;
    m.add("BUILTIN_SPACES", gwloc::gkm::BUILTIN_NAMES.to_vec())?;
    Ok(())
}
