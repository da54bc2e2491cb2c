//! Python bindings: the `weldkit` extension module.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString, PyTuple};
use serde_json::Value;

use weldkit::equivalence::{search_certificate, verify_certificate, Bounds, Certificate, LongitudeSystem};
use weldkit::moves::{apply_move, enumerate_moves, MoveInstance, MoveKind};
use weldkit::{BraidWord, Word};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => match n.as_u64() {
                Some(u) => u.into_pyobject(py)?.into_any(),
                None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
            },
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let xs = items.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, xs)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

/// A Gauss diagram of a welded link.
#[pyclass(name = "GaussDiagram", module = "weldkit", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDiagram {
    inner: weldkit::GaussDiagram,
}

#[pymethods]
impl PyDiagram {
    /// Parses a Gauss code such as `"t1 h2+ / t2 h1+"`.
    #[new]
    fn new(code: &str) -> PyResult<Self> {
        Ok(PyDiagram { inner: weldkit::parse_gauss_code(code).map_err(value_err)? })
    }

    /// Closure of a braid word like `"s1 s2^-1"` on `strands` strands.
    #[staticmethod]
    fn from_braid(strands: usize, word: &str) -> PyResult<Self> {
        let b = BraidWord::parse(strands, word).map_err(value_err)?;
        Ok(PyDiagram { inner: b.closure() })
    }

    #[staticmethod]
    fn unlink(n: usize) -> Self {
        PyDiagram { inner: weldkit::GaussDiagram::unlink(n) }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn arrow_count(&self) -> usize {
        self.inner.arrow_count()
    }

    fn gauss_code(&self) -> String {
        self.inner.to_gauss_code()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("diagrams serialize")
    }

    fn is_sorted(&self) -> bool {
        self.inner.is_sorted()
    }

    fn self_writhe(&self, circle: usize) -> PyResult<i64> {
        if circle >= self.inner.n() {
            return Err(PyValueError::new_err(format!("no circle {circle}")));
        }
        Ok(self.inner.self_writhe(circle))
    }

    fn canonical_key(&self) -> Vec<u8> {
        self.inner.canonical_key()
    }

    /// Applicable moves as JSON strings; `kinds` takes names like `"R2-add"`.
    #[pyo3(signature = (kinds = None))]
    fn moves(&self, kinds: Option<Vec<String>>) -> PyResult<Vec<String>> {
        let kinds: Vec<MoveKind> = match kinds {
            None => MoveKind::WELDED.to_vec(),
            Some(ks) => ks
                .iter()
                .map(|k| serde_json::from_value(Value::String(k.clone())).map_err(|_| value_err(format!("unknown move kind {k:?}"))))
                .collect::<PyResult<_>>()?,
        };
        Ok(enumerate_moves(&self.inner, &kinds)
            .iter()
            .map(|m| serde_json::to_string(m).expect("moves serialize"))
            .collect())
    }

    /// Applies a move given as JSON, e.g. `{"kind": "SV-del", "arrow": 0}`.
    fn apply(&self, instance: &str) -> PyResult<Self> {
        let m: MoveInstance = serde_json::from_str(instance).map_err(value_err)?;
        Ok(PyDiagram { inner: apply_move(&self.inner, &m).map_err(value_err)? })
    }

    fn __repr__(&self) -> String {
        format!("GaussDiagram({:?})", self.inner.to_gauss_code())
    }

    fn __str__(&self) -> String {
        self.inner.to_gauss_code()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.inner.canonical_key().hash(&mut h);
        h.finish()
    }
}

/// Sorted form and its move trace as JSON lines.
#[pyfunction]
fn sort(d: &PyDiagram) -> PyResult<(PyDiagram, String)> {
    let s = weldkit::sort_diagram(&d.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((PyDiagram { inner: s.diagram }, s.trace.to_json_lines()))
}

/// Longitudes of the reduced peripheral system, as words in `m1..mn`.
#[pyfunction]
fn longitudes(d: &PyDiagram) -> PyResult<Vec<String>> {
    let s = LongitudeSystem::from_diagram(&d.inner).map_err(value_err)?;
    Ok(s.longitudes.iter().map(|w| w.to_string()).collect())
}

/// Milnor invariants as a list of dicts with keys `I`, `j`, `mu`, `delta`, `mubar`.
#[pyfunction]
#[pyo3(signature = (d, max_length = None))]
fn milnor_table<'py>(py: Python<'py>, d: &PyDiagram, max_length: Option<usize>) -> PyResult<Bound<'py, PyList>> {
    let k = max_length.unwrap_or(d.inner.n());
    let t = weldkit::milnor_table(&d.inner, k).map_err(value_err)?;
    let out = PyList::empty(py);
    for e in &t.entries {
        let row = PyDict::new(py);
        row.set_item("I", PyTuple::new(py, &e.i)?)?;
        row.set_item("j", e.j)?;
        row.set_item("mu", &e.mu)?;
        row.set_item("delta", &e.delta)?;
        row.set_item("mubar", &e.mubar)?;
        out.append(row)?;
    }
    Ok(out)
}

/// Reduced Magnus expansion of a word in `m1..mn`: `{indices: coefficient}`
/// with 1-based index tuples and the constant term under `()`.
#[pyfunction]
fn expand<'py>(py: Python<'py>, word: &str, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let w = Word::parse(word).map_err(value_err)?;
    let p = weldkit::expand(&w, n).map_err(value_err)?;
    let out = PyDict::new(py);
    for (m, c) in p.terms() {
        let key = PyTuple::new(py, m.indices().iter().map(|x| x + 1))?;
        out.set_item(key, c)?;
    }
    Ok(out)
}

/// Equality in the reduced free group on `n` generators.
#[pyfunction]
fn rf_equal(u: &str, v: &str, n: usize) -> PyResult<bool> {
    let u = Word::parse(u).map_err(value_err)?;
    let v = Word::parse(v).map_err(value_err)?;
    weldkit::rf_equal(&u, &v, n).map_err(value_err)
}

fn bounds(conj_len: usize, coset_max: usize, depth: usize, max_states: usize, max_length: usize) -> PyResult<Bounds> {
    if conj_len == 0 || coset_max == 0 || depth == 0 || max_states == 0 {
        return Err(PyValueError::new_err("bounds must be positive"));
    }
    Ok(Bounds { conj_len, coset_max, depth, max_states, max_length })
}

/// Verdict as a dict: `{"verdict": "equivalent" | "distinct" | "unknown", ...}`.
#[pyfunction]
#[pyo3(signature = (a, b, conj_len = 4, coset_max = 4, depth = 64, max_states = 20000, max_length = 0))]
#[allow(clippy::too_many_arguments)]
fn compare<'py>(
    py: Python<'py>,
    a: &PyDiagram,
    b: &PyDiagram,
    conj_len: usize,
    coset_max: usize,
    depth: usize,
    max_states: usize,
    max_length: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let bounds = bounds(conj_len, coset_max, depth, max_states, max_length)?;
    let sa = LongitudeSystem::from_diagram(&a.inner).map_err(value_err)?;
    let sb = LongitudeSystem::from_diagram(&b.inner).map_err(value_err)?;
    let v = py.detach(|| search_certificate(&sa, &sb, &bounds)).map_err(value_err)?;
    to_py(py, &serde_json::to_value(&v).expect("verdicts serialize"))
}

/// Checks a certificate (JSON with a `steps` list) taking `b`'s system to `a`'s.
#[pyfunction]
fn verify(a: &PyDiagram, b: &PyDiagram, certificate: &str) -> PyResult<bool> {
    let cert: Certificate = serde_json::from_str(certificate).map_err(value_err)?;
    let sa = LongitudeSystem::from_diagram(&a.inner).map_err(value_err)?;
    let sb = LongitudeSystem::from_diagram(&b.inner).map_err(value_err)?;
    match verify_certificate(&sa, &sb, &cert) {
        Ok(ok) => Ok(ok),
        Err(weldkit::equivalence::EquivalenceError::Malformed { .. }) => Ok(false),
        Err(e) => Err(value_err(e)),
    }
}

/// Largest absolute coefficient in the expansion, for quick sanity checks.
#[pyfunction]
fn max_coefficient(word: &str, n: usize) -> PyResult<BigInt> {
    let w = Word::parse(word).map_err(value_err)?;
    Ok(weldkit::expand(&w, n).map_err(value_err)?.max_abs_coeff())
}

#[pymodule]
#[pyo3(name = "weldkit")]
pub fn weldkit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDiagram>()?;
    m.add_function(wrap_pyfunction!(sort, m)?)?;
    m.add_function(wrap_pyfunction!(longitudes, m)?)?;
    m.add_function(wrap_pyfunction!(milnor_table, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(rf_equal, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(max_coefficient, m)?)?;
    Ok(())
}
