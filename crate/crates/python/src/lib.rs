//! Python bindings: truncated series, the expression parser, certification,
//! flows, Kalman chains and extension templates. Reports are returned as
//! plain dicts with the same layout as the command-line JSON.

use goodbrackets::algebra::TruncSeries;
use goodbrackets::appsys::{kalman_subspaces, scalar_extension, step3_extension, PolyMap, Subspace};
use goodbrackets::certify::{certify_with, iterate_ideal, Candidate, CertifyOptions};
use goodbrackets::cli::run_command;
use goodbrackets::expr::{eval_str, parse_expr};
use goodbrackets::flows::{fast_osc_experiment, flow_endpoint, PiecewiseControl};
use goodbrackets::liecore::{dynkin_project, is_lie_element, HallBasis};
use goodbrackets::moments::psd_decide;
use goodbrackets::rational::{fmt_q, parse_q, Q};
use goodbrackets::Word;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde_json::Value;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Accepts int, str ("p/q") or fractions.Fraction.
fn to_q(obj: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_q(&obj.str()?.to_cow()?).map_err(value_err)
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// An element of the truncated free algebra `A^n` over `a0..ak`.
#[pyclass(name = "Series", module = "goodbrackets", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: TruncSeries,
}

impl PySeries {
    fn wrap(inner: TruncSeries) -> Self {
        PySeries { inner }
    }
}

#[pymethods]
impl PySeries {
    /// Parses an expression such as "a0 + 1/2*[a1,[a1,a0]]".
    #[staticmethod]
    fn parse(src: &str, letters: usize, degree: usize) -> PyResult<Self> {
        eval_str(src, letters, degree).map(Self::wrap).map_err(value_err)
    }

    #[staticmethod]
    fn letter(letters: usize, degree: usize, index: usize) -> PyResult<Self> {
        TruncSeries::letter(letters, degree, index)
            .map(Self::wrap)
            .map_err(value_err)
    }

    #[getter]
    fn letters(&self) -> usize {
        self.inner.alphabet()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree_bound()
    }

    /// Coefficient of a word given as a list of letter indices, as "p/q".
    fn coeff(&self, word: Vec<u8>) -> String {
        fmt_q(&self.inner.coeff(&Word::from_letters(word)))
    }

    /// List of (word, "p/q") pairs.
    fn terms(&self) -> Vec<(Vec<usize>, String)> {
        self.inner
            .terms()
            .map(|(w, c)| (w.letters().iter().map(|&l| l as usize).collect(), fmt_q(c)))
            .collect()
    }

    fn bracket(&self, other: &PySeries) -> PyResult<Self> {
        self.inner.bracket(&other.inner).map(Self::wrap).map_err(value_err)
    }

    fn scale(&self, c: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self::wrap(self.inner.scale(&to_q(c)?)))
    }

    fn exp(&self) -> PyResult<Self> {
        self.inner.exp_trunc().map(Self::wrap).map_err(value_err)
    }

    fn log(&self) -> PyResult<Self> {
        self.inner.log_trunc().map(Self::wrap).map_err(value_err)
    }

    fn dynkin(&self) -> PyResult<Self> {
        dynkin_project(&self.inner).map(Self::wrap).map_err(value_err)
    }

    fn is_lie(&self) -> bool {
        is_lie_element(&self.inner)
    }

    fn __add__(&self, other: &PySeries) -> PyResult<Self> {
        self.inner.try_add(&other.inner).map(Self::wrap).map_err(value_err)
    }

    fn __sub__(&self, other: &PySeries) -> PyResult<Self> {
        self.inner.try_sub(&other.inner).map(Self::wrap).map_err(value_err)
    }

    fn __mul__(&self, other: &PySeries) -> PyResult<Self> {
        self.inner.mul_trunc(&other.inner).map(Self::wrap).map_err(value_err)
    }

    fn __eq__(&self, other: &PySeries) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Series('{}', letters={}, degree={})",
            self.inner,
            self.inner.alphabet(),
            self.inner.degree_bound()
        )
    }
}

/// Canonical printed form of an expression.
#[pyfunction]
fn canonical(src: &str) -> PyResult<String> {
    parse_expr(src).map(|e| e.to_string()).map_err(value_err)
}

#[pyfunction]
fn hall_basis(py: Python<'_>, letters: usize, degree: usize) -> PyResult<Py<PyAny>> {
    let basis = HallBasis::new(letters, degree).map_err(value_err)?;
    to_py(py, &basis.to_json())
}

/// Certification verdict for an expression or a Series.
#[pyfunction]
#[pyo3(signature = (candidate, letters=None, degree=None, cone=false))]
fn certify(
    py: Python<'_>,
    candidate: &Bound<'_, PyAny>,
    letters: Option<usize>,
    degree: Option<usize>,
    cone: bool,
) -> PyResult<Py<PyAny>> {
    let (x, input) = if let Ok(s) = candidate.extract::<PyRef<'_, PySeries>>() {
        (s.inner.clone(), s.inner.to_string())
    } else {
        let src: String = candidate.extract()?;
        let (k, n) = letters
            .zip(degree)
            .ok_or_else(|| PyValueError::new_err("letters and degree are required for a string"))?;
        (eval_str(&src, k, n).map_err(value_err)?, src)
    };
    let c = Candidate::new(x).map_err(value_err)?;
    let v = certify_with(&c, CertifyOptions { cone }).map_err(runtime_err)?;
    to_py(py, &v.to_json(&input))
}

/// Exact PSD decision for a symmetric rational matrix.
#[pyfunction]
fn psd_check(py: Python<'_>, matrix: &Bound<'_, PyList>) -> PyResult<Py<PyAny>> {
    let rows = matrix
        .iter()
        .map(|row| row.try_iter()?.map(|x| to_q(&x?)).collect::<PyResult<Vec<Q>>>())
        .collect::<PyResult<Vec<_>>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    to_py(py, &psd_decide(&rows).to_json())
}

/// Flow endpoint, or the oscillation experiment when `eps` is given.
#[pyfunction]
#[pyo3(signature = (control, degree, letters=1, eps=None, time="1"))]
fn simulate(
    py: Python<'_>,
    control: &str,
    degree: usize,
    letters: usize,
    eps: Option<Vec<Bound<'_, PyAny>>>,
    time: &str,
) -> PyResult<Py<PyAny>> {
    let u = PiecewiseControl::parse(control, letters).map_err(value_err)?;
    match eps {
        None => {
            let r = flow_endpoint(&u, degree).map_err(runtime_err)?;
            let v = serde_json::json!({
                "schema": "goodbrackets/flow/v1",
                "letters": letters,
                "degree": degree,
                "control": control,
                "total_time": fmt_q(&u.total_time()),
                "endpoint": r.endpoint.to_string(),
                "logchart": r.logchart.to_string(),
            });
            to_py(py, &v)
        }
        Some(list) => {
            let eps: Vec<Q> = list.iter().map(to_q).collect::<PyResult<_>>()?;
            let t = parse_q(time).map_err(value_err)?;
            let r = fast_osc_experiment(&u, &t, &eps, degree).map_err(runtime_err)?;
            to_py(py, &r.to_json())
        }
    }
}

/// Kalman chain for `x' = f(x) + u`; `system` is the polynomial-map JSON text.
#[pyfunction]
fn kalman(py: Python<'_>, system: &str, subspace: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Py<PyAny>> {
    let v: Value = serde_json::from_str(system).map_err(value_err)?;
    let f = PolyMap::from_json(&v).map_err(value_err)?;
    let rows: Vec<Vec<Q>> = subspace
        .iter()
        .map(|r| r.iter().map(to_q).collect::<PyResult<_>>())
        .collect::<PyResult<_>>()?;
    let u = Subspace::span(f.dim(), &rows).map_err(value_err)?;
    let chain = kalman_subspaces(&f, &u).map_err(runtime_err)?;
    let last = chain.last().expect("chain is nonempty");
    let report = serde_json::json!({
        "schema": "goodbrackets/kalman/v1",
        "system": f.to_json(),
        "subspace": u.to_json(),
        "chain": chain.iter().map(Subspace::to_json).collect::<Vec<_>>(),
        "final": last.to_json(),
        "full_rank": last.is_full(),
    });
    to_py(py, &report)
}

#[pyfunction]
fn extend_step3(py: Python<'_>, k: usize) -> PyResult<Py<PyAny>> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    to_py(py, &step3_extension(k).to_json())
}

#[pyfunction]
fn extend_scalar(py: Python<'_>, m: usize) -> PyResult<Py<PyAny>> {
    if m == 0 {
        return Err(PyValueError::new_err("m must be at least 1"));
    }
    to_py(py, &scalar_extension(m).to_json())
}

/// Quotient construction for `V`; each `z` is a Lie element `Z` standing for `exp(Z)`.
#[pyfunction]
#[pyo3(signature = (v, letters, degree, m, z=Vec::new()))]
fn quotient(py: Python<'_>, v: &str, letters: usize, degree: usize, m: usize, z: Vec<String>) -> PyResult<Py<PyAny>> {
    let vv = eval_str(v, letters, degree).map_err(value_err)?;
    let zs: Vec<TruncSeries> = if z.is_empty() {
        vec![TruncSeries::one(letters, degree)]
    } else {
        z.iter()
            .map(|s| {
                eval_str(s, letters, degree)
                    .map_err(value_err)?
                    .exp_trunc()
                    .map_err(value_err)
            })
            .collect::<PyResult<_>>()?
    };
    let r = iterate_ideal(&vv, m, &zs).map_err(runtime_err)?;
    to_py(py, &r.to_json())
}

/// Runs the command-line front end; returns (exit code, stdout, stderr).
#[pyfunction]
fn run(argv: Vec<String>) -> (i32, String, String) {
    let o = run_command(std::iter::once("goodbrackets".to_string()).chain(argv));
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
#[pyo3(name = "goodbrackets")]
fn goodbrackets_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(hall_basis, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(psd_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(kalman, m)?)?;
    m.add_function(wrap_pyfunction!(extend_step3, m)?)?;
    m.add_function(wrap_pyfunction!(extend_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(quotient, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
