// pyo3 0.22 macro expansion converts PyErr into itself
#![allow(clippy::useless_conversion)]

use std::collections::BTreeMap;

use diskscat::norms;
use diskscat::quotients;
use diskscat::resonance;
use diskscat::scatter::{self, FieldKind, FieldTrace, ModeCoefficients, ScatterConfig};
use diskscat::specfun;
use diskscat::verify::{self, CheckParams, SamplingPlan, Statement};
use diskscat::Error;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(diskscat_py, NumericError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Domain(_) | Error::Precondition(_) | Error::Pole { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => NumericError::new_err(e.to_string()),
    }
}

/// Any serialisable value as plain Python objects.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| NumericError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn modes_from(modes: BTreeMap<i64, Complex64>) -> ModeCoefficients {
    ModeCoefficients::explicit(modes)
}

fn incident(modes: Option<BTreeMap<i64, Complex64>>, plane_wave: Option<f64>) -> PyResult<ModeCoefficients> {
    match (modes, plane_wave) {
        (Some(m), None) => Ok(modes_from(m)),
        (None, d) => Ok(ModeCoefficients::plane_wave(d.unwrap_or(0.0), Complex64::new(1.0, 0.0))),
        (Some(_), Some(_)) => Err(PyValueError::new_err("give modes or plane_wave, not both")),
    }
}

/// (J_n, J'_n, Y_n, Y'_n) at x.
#[pyfunction]
fn cylinder(n: u32, x: f64) -> PyResult<(f64, f64, f64, f64)> {
    let v = specfun::eval_cylinder(n, x).map_err(err)?;
    Ok((v.j, v.jp, v.y, v.yp))
}

/// First `count` zeros j_{n,k} and j'_{n,k}, with y_{n,1} and y'_{n,1}.
#[pyfunction]
fn zeros(py: Python<'_>, n: u32, count: usize) -> PyResult<PyObject> {
    let t = specfun::zeros(n, count).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("j", (1..=t.len()).map(|k| t.j(k)).collect::<Vec<_>>())?;
    d.set_item("jp", (1..=t.len()).map(|k| t.jp(k)).collect::<Vec<_>>())?;
    d.set_item("y1", t.y1)?;
    d.set_item("yp1", t.yp1)?;
    Ok(d.into_any().unbind())
}

#[pyfunction]
fn g(n: u32, x: f64) -> PyResult<f64> {
    quotients::g(n, x).map_err(err)
}

#[pyfunction]
fn k(n: u32, x: f64) -> PyResult<f64> {
    quotients::k(n, x).map_err(err)
}

#[pyfunction]
fn phi(n: u32, lam: f64, x: f64) -> PyResult<f64> {
    quotients::phi(n, lam, x).map_err(err)
}

/// R_n at contrast λ and rescaled frequency x.
#[pyfunction]
fn reflection(n: i64, lam: f64, x: f64) -> PyResult<Complex64> {
    scatter::reflection_at(n, lam, x).map_err(err)
}

#[pyfunction]
fn transmission(n: i64, lam: f64, x: f64) -> PyResult<Complex64> {
    scatter::transmission_at(n, lam, x).map_err(err)
}

#[pyfunction]
fn s_ratio(n: i64, lam: f64, x: f64) -> PyResult<Complex64> {
    scatter::s_ratio_at(n, lam, x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, lam, window=None))]
fn quasi_resonances(py: Python<'_>, n: u32, lam: f64, window: Option<(f64, f64)>) -> PyResult<PyObject> {
    to_py(py, &resonance::find_quasi_resonances(n, lam, window).map_err(err)?)
}

#[pyfunction]
fn exclusion_intervals(py: Python<'_>, n: u32, lam: f64, tau: f64) -> PyResult<PyObject> {
    to_py(py, &resonance::exclusion_intervals(n, lam, tau).map_err(err)?)
}

/// Fourier trace of one field on the circle of the given radius.
#[pyclass(module = "diskscat_py")]
struct Trace {
    inner: FieldTrace,
}

#[pymethods]
impl Trace {
    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn truncation(&self) -> u32 {
        self.inner.truncation
    }

    #[getter]
    fn coefficients(&self) -> BTreeMap<i64, Complex64> {
        self.inner.coefficients.clone()
    }

    fn coefficient(&self, n: i64) -> Complex64 {
        self.inner.coefficient(n)
    }

    fn tail_bound(&self) -> f64 {
        self.inner.tail_bound()
    }

    fn h_sigma(&self, sigma: f64) -> PyResult<f64> {
        Ok(norms::h_sigma(&self.inner, sigma).map_err(err)?.value)
    }

    fn h_sigma_star(&self, sigma: f64) -> PyResult<f64> {
        Ok(norms::h_sigma_star(&self.inner, sigma).map_err(err)?.value)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        self.inner.write_csv(&mut out).map_err(err)?;
        String::from_utf8(out).map_err(|e| NumericError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace(kind={}, radius={}, truncation={}, modes={})",
            self.inner.kind,
            self.inner.radius,
            self.inner.truncation,
            self.inner.coefficients.len()
        )
    }
}

/// Lengths are in units of ε, so `radius` is r/ε.
#[pyfunction]
#[pyo3(signature = (kind, lam, oeps, radius, modes=None, plane_wave=None, truncation=None))]
fn field_trace(
    kind: &str,
    lam: f64,
    oeps: f64,
    radius: f64,
    modes: Option<BTreeMap<i64, Complex64>>,
    plane_wave: Option<f64>,
    truncation: Option<u32>,
) -> PyResult<Trace> {
    let kind: FieldKind = kind.parse().map_err(err)?;
    let cfg = ScatterConfig::from_contrast(lam, oeps).map_err(err)?;
    let modes = incident(modes, plane_wave)?;
    let inner = scatter::field_trace(kind, &cfg, &modes, radius, truncation).map_err(err)?;
    Ok(Trace { inner })
}

#[pyfunction]
#[pyo3(signature = (modes, sigma, truncation=None))]
fn n_script(modes: BTreeMap<i64, Complex64>, sigma: f64, truncation: Option<u32>) -> PyResult<f64> {
    Ok(norms::n_script(&modes_from(modes), sigma, truncation).map_err(err)?.value)
}

#[pyfunction]
#[pyo3(signature = (modes, sigma, p, truncation=None))]
fn n_bold(modes: BTreeMap<i64, Complex64>, sigma: f64, p: u32, truncation: Option<u32>) -> PyResult<f64> {
    Ok(norms::n_bold(&modes_from(modes), sigma, p, truncation).map_err(err)?.value)
}

fn statement(id: &str) -> PyResult<Statement> {
    id.parse().map_err(err)
}

/// Ids of every checkable statement.
#[pyfunction]
fn statements() -> Vec<&'static str> {
    Statement::ALL.iter().map(|s| s.id()).collect()
}

/// One bound check; keyword arguments are the CheckParams fields
/// (part, lambda, oeps, eps, radius, sigma, order, p, tau, ..., modes as [(n, [re, im])]).
#[pyfunction]
#[pyo3(signature = (id, **params))]
fn check(py: Python<'_>, id: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<PyObject> {
    let p: CheckParams = match params {
        Some(d) => {
            let text: String = py.import_bound("json")?.call_method1("dumps", (d,))?.extract()?;
            serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("bad parameters: {e}")))?
        }
        None => CheckParams::default(),
    };
    to_py(py, &verify::check(statement(id)?, &p).map_err(err)?)
}

/// Seeded sweep of one statement; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (id, seed=42, samples=None, part=None))]
fn sweep(py: Python<'_>, id: &str, seed: u64, samples: Option<usize>, part: Option<String>) -> PyResult<PyObject> {
    let id = statement(id)?;
    let mut plan = SamplingPlan::default_for(id, seed);
    if let Some(s) = samples {
        plan.samples = s;
    }
    plan.part = part;
    let report = py.allow_threads(|| verify::sweep(id, &plan)).map_err(err)?;
    to_py(py, &report)
}

/// Runs the command-line tool in-process: (exit status, stdout, stderr).
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.allow_threads(|| {
        let mut out = Vec::new();
        let mut errs = Vec::new();
        let argv = std::iter::once("diskscat".to_string()).chain(args);
        let code = diskscat::cli::run(argv, &mut out, &mut errs);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errs).into_owned())
    })
}

#[pymodule]
fn diskscat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("NumericError", m.py().get_type_bound::<NumericError>())?;
    m.add_class::<Trace>()?;
    m.add_function(wrap_pyfunction!(cylinder, m)?)?;
    m.add_function(wrap_pyfunction!(zeros, m)?)?;
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(k, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(reflection, m)?)?;
    m.add_function(wrap_pyfunction!(transmission, m)?)?;
    m.add_function(wrap_pyfunction!(s_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_resonances, m)?)?;
    m.add_function(wrap_pyfunction!(exclusion_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(field_trace, m)?)?;
    m.add_function(wrap_pyfunction!(n_script, m)?)?;
    m.add_function(wrap_pyfunction!(n_bold, m)?)?;
    m.add_function(wrap_pyfunction!(statements, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
