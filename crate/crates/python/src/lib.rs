//! Python bindings: closed-form Green's functions, oracles and hitting times.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use torgreen::closed_forms::{self, TorusRow, TorusSpec};
use torgreen::graph::{RegularGraph, VertexId};
use torgreen::verify::{run_suite, Suite, VerifyOptions};
use torgreen::{chebyshev, oracle, walk, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidSize(_)
        | Error::InvalidSubset(_)
        | Error::InvalidGraph(_)
        | Error::Index { .. }
        | Error::Shape(_)
        | Error::Misuse(_)
        | Error::Domain(_)
        | Error::Pole { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// A torus `C_{m_1} x ... x C_{m_t}`.
#[pyclass(name = "Torus", module = "torgreen_py", frozen)]
struct PyTorus {
    spec: TorusSpec,
}

#[pymethods]
impl PyTorus {
    #[new]
    fn new(dims: Vec<usize>) -> PyResult<Self> {
        Ok(PyTorus {
            spec: TorusSpec::new(dims).map_err(py_err)?,
        })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.spec.dims().to_vec()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.spec.vertex_count()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    /// `G(0, displacement)` by the closed-form recursion.
    fn green(&self, displacement: Vec<usize>) -> PyResult<f64> {
        closed_forms::t_torus_green(&self.spec, &displacement).map_err(py_err)
    }

    /// The full row `G(0, .)`, row-major over displacements.
    #[pyo3(signature = (threads = 1))]
    fn row(&self, py: Python<'_>, threads: usize) -> PyResult<Vec<f64>> {
        let spec = self.spec.clone();
        py.detach(move || TorusRow::compute_with_threads(&spec, threads).map(|r| r.expand()))
            .map_err(py_err)
    }

    /// Dense pseudo-inverse of the normalized Laplacian via Jacobi.
    fn pseudo_inverse(&self) -> PyResult<Vec<Vec<f64>>> {
        let g = self.spec.graph().map_err(py_err)?;
        Ok(rows(&oracle::pseudo_green_of(&g).map_err(py_err)?.entries))
    }

    /// Hitting times from `source` to every vertex, as an `M x N` grid (2-tori only).
    #[pyo3(signature = (source = None, threads = 1))]
    fn hitting_grid(
        &self,
        py: Python<'_>,
        source: Option<Vec<usize>>,
        threads: usize,
    ) -> PyResult<Vec<Vec<f64>>> {
        let spec = self.spec.clone();
        let source = source.unwrap_or_else(|| vec![0; spec.t()]);
        let table = py
            .detach(move || walk::hitting_grid_with_threads(&spec, &source, threads))
            .map_err(py_err)?;
        let n = self.spec.dims()[1];
        Ok(table
            .entries
            .row(0)
            .iter()
            .copied()
            .collect::<Vec<f64>>()
            .chunks(n)
            .map(<[f64]>::to_vec)
            .collect())
    }

    /// First-step solve for `Q(., target)`, vertices in row-major order.
    fn hitting_oracle(&self, target: Vec<usize>) -> PyResult<Vec<f64>> {
        let g = self.spec.graph().map_err(py_err)?;
        let t = g.vertex_at(&target).map_err(py_err)?;
        walk::hitting_oracle(&g, t).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Torus({:?})", self.spec.dims())
    }
}

#[pyfunction]
fn cycle_green(m: usize, a: usize) -> PyResult<f64> {
    closed_forms::cycle_green(m, a).map_err(py_err)
}

#[pyfunction]
fn cycle_green_alpha(m: usize, alpha: f64, a: usize) -> PyResult<f64> {
    closed_forms::cycle_green_alpha(m, alpha, a).map_err(py_err)
}

#[pyfunction]
fn torus_green(m: usize, n: usize, da: usize, db: usize) -> PyResult<f64> {
    closed_forms::torus_green(m, n, da, db).map_err(py_err)
}

#[pyfunction]
fn t_torus_green(dims: Vec<usize>, displacement: Vec<usize>) -> PyResult<f64> {
    let spec = TorusSpec::new(dims).map_err(py_err)?;
    closed_forms::t_torus_green(&spec, &displacement).map_err(py_err)
}

#[pyfunction]
fn torus3_green(m: usize, displacement: [usize; 3]) -> PyResult<f64> {
    closed_forms::torus3_green(m, displacement).map_err(py_err)
}

#[pyfunction]
fn cheb_t(order: f64, x: f64) -> PyResult<f64> {
    chebyshev::cheb_t(order, x).map_err(py_err)
}

#[pyfunction]
fn cheb_u(order: f64, x: f64) -> PyResult<f64> {
    chebyshev::cheb_u(order, x).map_err(py_err)
}

/// Pseudo-inverse Green's function of the cycle `C_m` from the dense oracle.
#[pyfunction]
fn cycle_pseudo_inverse(m: usize) -> PyResult<Vec<Vec<f64>>> {
    let g = RegularGraph::cycle(m).map_err(py_err)?;
    Ok(rows(&oracle::pseudo_green_of(&g).map_err(py_err)?.entries))
}

/// `Q(x, y)` on `C_m` from the closed-form Green's function.
#[pyfunction]
fn cycle_hitting_time(m: usize, x: usize, y: usize) -> PyResult<f64> {
    let g = RegularGraph::cycle(m).map_err(py_err)?;
    let green = oracle::pseudo_green_of(&g).map_err(py_err)?;
    walk::hitting_time(&green, VertexId(x), VertexId(y)).map_err(py_err)
}

/// Runs a verification suite; returns `(all passed, report lines)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", max_size = None, tol = None))]
fn verify(
    py: Python<'_>,
    suite: &str,
    max_size: Option<usize>,
    tol: Option<f64>,
) -> PyResult<(bool, Vec<String>)> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let report = py.detach(move || run_suite(suite, &VerifyOptions { max_size, tol }));
    let mut lines: Vec<String> = report.checks.iter().map(|c| c.to_string()).collect();
    lines.push(report.summary());
    Ok((report.all_passed(), lines))
}

#[pymodule]
fn torgreen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTorus>()?;
    m.add_function(wrap_pyfunction!(cycle_green, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_green_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(torus_green, m)?)?;
    m.add_function(wrap_pyfunction!(t_torus_green, m)?)?;
    m.add_function(wrap_pyfunction!(torus3_green, m)?)?;
    m.add_function(wrap_pyfunction!(cheb_t, m)?)?;
    m.add_function(wrap_pyfunction!(cheb_u, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_pseudo_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_hitting_time, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
