//! Python bindings. Polynomials cross the boundary in their text form,
//! e.g. `"x1_0*x2_1 + (0,1)*x1_2"`, and reports as JSON strings.

#![allow(clippy::useless_conversion)]

use std::collections::BTreeSet;
use std::sync::Arc;

use ncsphere::ncalg::{confluence_check, Algebra as CoreAlgebra, NCPoly};
use ncsphere::report::{self, Backend, RunSpec, Task};
use ncsphere::rmatrix::{build_r_quaternionic, check_all_conditions, DeformParams as CoreParams};
use ncsphere::spheres::{compute_y, diagonalize_lambda, SphereAlgebra as CoreSphere, SphereKind};
use ncsphere::{ConditionReport, Error, GaussRational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn checks_to_dict<'py>(py: Python<'py>, report: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new_bound(py);
    for (name, c) in &report.checks {
        out.set_item(name, (c.pass, c.max_residual, c.witness.clone()))?;
    }
    Ok(out)
}

/// A rational point `(u0, u1, u2)` on the unit sphere.
#[pyclass(frozen)]
#[derive(Clone)]
struct DeformParams {
    inner: CoreParams<GaussRational>,
}

#[pymethods]
impl DeformParams {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self { inner: CoreParams::parse(text).map_err(py_err)? })
    }

    #[getter]
    fn u(&self) -> (String, String, String) {
        let [a, b, c] = self.inner.rationals();
        (a.to_string(), b.to_string(), c.to_string())
    }

    fn is_classical(&self) -> bool {
        self.inner.is_classical()
    }

    /// `(re, im)` of `e^{i theta}` as exact strings, or `None` when irrational.
    fn phase(&self) -> Option<(String, String)> {
        diagonalize_lambda(&self.inner).ok().map(|d| (d.phase.re.to_string(), d.phase.im.to_string()))
    }

    fn theta(&self) -> f64 {
        let [u0, u1, u2] = self.inner.as_f64();
        let s = u1.hypot(u2);
        (2.0 * u0 * s).atan2(u0 * u0 - s * s)
    }

    /// Every structural condition on the R-matrix: name -> (pass, residual, witness).
    fn check_conditions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = build_r_quaternionic(&self.inner).map_err(py_err)?;
        checks_to_dict(py, &check_all_conditions(&r))
    }

    fn __repr__(&self) -> String {
        let (a, b, c) = self.u();
        format!("DeformParams({a},{b},{c})")
    }
}

/// The quadratic algebra at a parameter point.
#[pyclass(frozen)]
struct Algebra {
    params: CoreParams<GaussRational>,
    inner: Arc<CoreAlgebra<GaussRational>>,
}

impl Algebra {
    fn parse(&self, text: &str) -> PyResult<NCPoly<GaussRational>> {
        self.inner.parse(text).map_err(py_err)
    }
}

#[pymethods]
impl Algebra {
    #[new]
    fn new(params: &DeformParams) -> PyResult<Self> {
        let inner = Arc::new(CoreAlgebra::quaternionic(&params.inner).map_err(py_err)?);
        Ok(Self { params: params.inner.clone(), inner })
    }

    /// Normal form of the product.
    fn multiply(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.inner.format(&self.inner.multiply(&self.parse(a)?, &self.parse(b)?)))
    }

    fn star(&self, a: &str) -> PyResult<String> {
        Ok(self.inner.format(&self.inner.star(&self.parse(a)?)))
    }

    fn normal_form(&self, a: &str) -> PyResult<String> {
        Ok(self.inner.format(&self.parse(a)?))
    }

    fn is_central(&self, a: &str) -> PyResult<bool> {
        Ok(self.inner.is_central(&self.parse(a)?))
    }

    /// Graded dimensions for degrees `1..=n`.
    fn hilbert_dims(&self, n: usize) -> Vec<usize> {
        confluence_check(&self.inner, n, 0, 0).dims
    }

    /// `Y^0..Y^3` and `Y^4` as text.
    fn y(&self) -> Vec<String> {
        let ys = compute_y(&self.inner, &self.params);
        ys.y.iter().chain(std::iter::once(&ys.y4)).map(|f| self.inner.format(f)).collect()
    }
}

/// A quotient by central relations: `"seven"` (x^2 = 1), `"torus"` or `"equator"`.
#[pyclass(frozen)]
struct SphereAlgebra {
    inner: CoreSphere<GaussRational>,
}

#[pymethods]
impl SphereAlgebra {
    #[new]
    #[pyo3(signature = (params, kind = "seven"))]
    fn new(params: &DeformParams, kind: &str) -> PyResult<Self> {
        let kind = match kind {
            "seven" => SphereKind::SevenSphere,
            "torus" => SphereKind::Torus,
            "equator" => SphereKind::Equator,
            other => return Err(PyValueError::new_err(format!("unknown sphere kind {other:?}"))),
        };
        let alg = Arc::new(CoreAlgebra::quaternionic(&params.inner).map_err(py_err)?);
        Ok(Self { inner: CoreSphere::new(alg, kind).map_err(py_err)? })
    }

    fn reduce(&self, a: &str) -> PyResult<String> {
        let alg = self.inner.algebra();
        let f = alg.parse(a).map_err(py_err)?;
        Ok(alg.format(&self.inner.reduce(&f).map_err(py_err)?))
    }
}

fn spec(params: &str, backend: &str, tasks: Option<Vec<String>>, degree_cap: usize, tol: Option<f64>) -> PyResult<RunSpec> {
    let backend: Backend = backend.parse().map_err(py_err)?;
    let tasks: BTreeSet<Task> = match tasks {
        Some(list) => list.iter().map(|t| t.parse()).collect::<Result<_, _>>().map_err(py_err)?,
        None => Task::ALL.into_iter().collect(),
    };
    Ok(RunSpec { params: params.to_string(), backend, tasks, degree_cap, tol, ..RunSpec::default() })
}

/// Runs the verification pipeline at one point and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (params, backend = "exact", tasks = None, degree_cap = 8, tol = None))]
fn run(py: Python<'_>, params: &str, backend: &str, tasks: Option<Vec<String>>, degree_cap: usize, tol: Option<f64>) -> PyResult<String> {
    let spec = spec(params, backend, tasks, degree_cap, tol)?;
    py.allow_threads(|| report::run(&spec).and_then(|r| r.to_json())).map_err(py_err)
}

/// Runs every point; returns `(json_array, csv_summary)`.
#[pyfunction]
#[pyo3(signature = (points = None, backend = "exact", tasks = None, degree_cap = 8, tol = None))]
fn sweep(
    py: Python<'_>,
    points: Option<Vec<String>>,
    backend: &str,
    tasks: Option<Vec<String>>,
    degree_cap: usize,
    tol: Option<f64>,
) -> PyResult<(String, String)> {
    let base = spec("", backend, tasks, degree_cap, tol)?;
    let points = points.unwrap_or_else(report::catalog);
    py.allow_threads(|| {
        let out = report::sweep(&points, &base)?;
        Ok((out.to_json()?, out.csv))
    })
    .map_err(py_err)
}

#[pyfunction]
fn catalog() -> Vec<String> {
    report::catalog()
}

#[pymodule]
#[pyo3(name = "ncsphere")]
fn ncsphere_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DeformParams>()?;
    m.add_class::<Algebra>()?;
    m.add_class::<SphereAlgebra>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
