//! Python bindings for the `dpt` toolkit.

use dpt::approx_lp;
use dpt::boolean_core::{PartialBooleanFunction, PartialSignMatrix};
use dpt::factor_norms::{self, NormConfig};
use dpt::rational::parse_rational;
use dpt::theorem_bench::{self, SuiteConfig};
use dpt::witness_forge;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

fn err(e: dpt::Error) -> PyErr {
    match e {
        dpt::Error::TooLarge(_) => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn config(tolerance: Option<f64>, max_dim: Option<usize>) -> NormConfig {
    let d = NormConfig::default();
    NormConfig { tolerance: tolerance.unwrap_or(d.tolerance), max_dim: max_dim.unwrap_or(d.max_dim) }
}

/// A partial Boolean function on `{-1,1}^n`; undefined points are stored as 0.
#[pyclass(name = "BooleanFunction", module = "pydpt", frozen, from_py_object)]
#[derive(Clone)]
struct PyBooleanFunction {
    inner: PartialBooleanFunction,
}

#[pymethods]
impl PyBooleanFunction {
    #[new]
    fn new(num_vars: usize, values: Vec<i8>) -> PyResult<Self> {
        Ok(Self { inner: PartialBooleanFunction::from_values(num_vars, values).map_err(err)? })
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(Self { inner: PartialBooleanFunction::catalog(name).map_err(err)? })
    }

    #[staticmethod]
    fn tensor_xor(parts: Vec<PyBooleanFunction>) -> PyResult<Self> {
        let fs: Vec<_> = parts.into_iter().map(|p| p.inner).collect();
        Ok(Self { inner: dpt::boolean_core::tensor_xor(&fs).map_err(err)? })
    }

    fn compose(&self, inner: Vec<PyBooleanFunction>) -> PyResult<Self> {
        let fs: Vec<_> = inner.into_iter().map(|p| p.inner).collect();
        Ok(Self { inner: dpt::boolean_core::compose(&self.inner, &fs).map_err(err)? })
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    #[getter]
    fn values(&self) -> Vec<i8> {
        self.inner.values().to_vec()
    }

    fn is_total(&self) -> bool {
        self.inner.is_total()
    }

    /// Exact approximate degree at error `eps` (a `num/den` string).
    fn approx_degree<'py>(&self, py: Python<'py>, eps: &str) -> PyResult<Bound<'py, PyAny>> {
        let eps = parse_rational(eps).map_err(err)?;
        let r = approx_lp::approx_degree(&self.inner, &eps).map_err(err)?;
        to_py(py, &r.to_json())
    }

    fn threshold_degree(&self) -> PyResult<usize> {
        Ok(approx_lp::threshold_degree(&self.inner).map_err(err)?.degree)
    }

    fn __len__(&self) -> usize {
        self.inner.num_points()
    }

    fn __repr__(&self) -> String {
        format!("BooleanFunction(num_vars={}, total={})", self.inner.num_vars(), self.inner.is_total())
    }
}

/// A sign matrix with entries 1, -1 and 0 for undefined.
#[pyclass(name = "SignMatrix", module = "pydpt", frozen, from_py_object)]
#[derive(Clone)]
struct PySignMatrix {
    inner: PartialSignMatrix,
}

#[pymethods]
impl PySignMatrix {
    #[new]
    fn new(rows: usize, cols: usize, entries: Vec<i8>) -> PyResult<Self> {
        Ok(Self { inner: PartialSignMatrix::new(rows, cols, entries).map_err(err)? })
    }

    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(Self { inner: PartialSignMatrix::catalog(name).map_err(err)? })
    }

    fn kron(&self, other: &PySignMatrix) -> Self {
        Self { inner: self.inner.kron(&other.inner) }
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    #[getter]
    fn entries(&self) -> Vec<i8> {
        self.inner.entries().to_vec()
    }

    /// `gamma_2` certificate, or `gamma_{2,eps}` when `eps` is given.
    #[pyo3(signature = (eps=None, tolerance=None, max_dim=None))]
    fn gamma2<'py>(
        &self,
        py: Python<'py>,
        eps: Option<f64>,
        tolerance: Option<f64>,
        max_dim: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = config(tolerance, max_dim);
        let cert = match eps {
            Some(e) => factor_norms::gamma2_eps(&self.inner, e, &cfg),
            None => factor_norms::gamma2_sign(&self.inner, &cfg),
        }
        .map_err(err)?;
        to_py(py, &cert.to_json())
    }

    fn gdm_bound(&self, eps: &str) -> PyResult<f64> {
        let eps = parse_rational(eps).map_err(err)?;
        Ok(factor_norms::gdm_bound(&self.inner, &eps, &NormConfig::default()).map_err(err)?.value)
    }

    fn __repr__(&self) -> String {
        format!("SignMatrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// Summary of the symmetric polynomial `p_k` on `n` variables.
#[pyfunction]
fn pk_summary(py: Python<'_>, n: usize, k: usize) -> PyResult<Bound<'_, PyAny>> {
    let p = witness_forge::pk_poly(n, k).map_err(err)?;
    to_py(py, &serde_json::to_value(p.summary()).expect("serialisable"))
}

/// Product witness `Psi_k` built from LP witnesses of the given functions.
#[pyfunction]
fn psi_k<'py>(py: Python<'py>, functions: Vec<PyBooleanFunction>, eps: &str, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let eps = parse_rational(eps).map_err(err)?;
    let gs: Vec<_> = functions.into_iter().map(|f| f.inner).collect();
    let psis = gs.iter().map(|g| theorem_bench::unit_witness(g, &eps)).collect::<dpt::Result<Vec<_>>>().map_err(err)?;
    let psi = witness_forge::build_psi_k(&psis, &gs, k, &eps).map_err(err)?;
    to_py(py, &psi.composite.to_json())
}

/// Runs the verification suite and returns the list of reports.
#[pyfunction]
#[pyo3(signature = (seed=7, only=Vec::new(), jobs=1))]
fn run_suite(py: Python<'_>, seed: u64, only: Vec<String>, jobs: usize) -> PyResult<Bound<'_, PyAny>> {
    let cfg = SuiteConfig { seed, only, jobs, norm: NormConfig::default() };
    let report = py.detach(|| theorem_bench::run_suite(&cfg));
    to_py(py, &serde_json::to_value(&report.reports).expect("serialisable"))
}

#[pyfunction]
fn check_ids() -> Vec<String> {
    theorem_bench::catalog_ids()
}

#[pymodule]
fn pydpt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBooleanFunction>()?;
    m.add_class::<PySignMatrix>()?;
    m.add_function(wrap_pyfunction!(pk_summary, m)?)?;
    m.add_function(wrap_pyfunction!(psi_k, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(check_ids, m)?)?;
    Ok(())
}
