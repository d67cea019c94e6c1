//! Python bindings. Weights are passed as JSON documents in the same schema the CLI reads.

use std::collections::BTreeMap;

use mopuc::io::{parse_weight, WeightDoc};
use mopuc::linalg::{fro, CMat, C64};
use mopuc::moments::{compute_moments, MomentTable};
use mopuc::painleve::{self, DPIICoefficients, DPIIState};
use mopuc::szego::{solve_families, SzegoFamily, VerblunskyLattice};
use mopuc::weights::WeightSpec;
use mopuc::{verify, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

const INITIAL_NODES: usize = 64;

create_exception!(pymopuc, MopucError, PyException, "Base class for pipeline failures.");
create_exception!(pymopuc, QuasiDefiniteError, MopucError, "A truncated moment matrix is singular.");
create_exception!(pymopuc, SingularError, MopucError, "A recurrence step met a singular matrix or resonance.");
create_exception!(pymopuc, SpecMismatchError, MopucError, "Input does not match the requested structure.");
create_exception!(pymopuc, ConvergenceError, MopucError, "A numerical scheme did not reach tolerance.");

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::InvalidSpec(_) | Error::Parse(_) | Error::Domain(_) | Error::Range { .. } => PyValueError::new_err(msg),
        Error::QuasiDefinite { .. } => QuasiDefiniteError::new_err(msg),
        Error::Singular { .. } | Error::Resonance { .. } | Error::Pole(_) => SingularError::new_err(msg),
        Error::SpecMismatch(_) | Error::Constraint { .. } => SpecMismatchError::new_err(msg),
        Error::Convergence { .. } | Error::Integration { .. } | Error::Truncation(_) => ConvergenceError::new_err(msg),
        Error::Io(_) => MopucError::new_err(msg),
    }
}

type PyMatrix = Vec<Vec<C64>>;

fn to_py(m: &CMat) -> PyMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_py(rows: &PyMatrix, n: usize) -> PyResult<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(format!("expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

struct Weight {
    doc: WeightDoc,
    spec: WeightSpec,
}

fn weight(json: &str) -> PyResult<Weight> {
    let doc = parse_weight(json).map_err(py_err)?;
    let spec = doc.to_spec().map_err(py_err)?;
    Ok(Weight { doc, spec })
}

fn check_sizes(n_max: usize, j_max: usize) -> PyResult<()> {
    if n_max == 0 || n_max > j_max {
        return Err(PyValueError::new_err(format!("need 1 <= n_max <= j_max, got n_max = {n_max}, j_max = {j_max}")));
    }
    Ok(())
}

fn pipeline(w: &Weight, n_max: usize, j_max: usize) -> PyResult<(MomentTable, Vec<SzegoFamily>)> {
    check_sizes(n_max, j_max)?;
    let table = compute_moments(&w.spec, j_max, INITIAL_NODES).map_err(py_err)?;
    let families = solve_families(&table, n_max).map_err(py_err)?;
    Ok((table, families))
}

fn coefficients(w: &Weight) -> PyResult<DPIICoefficients> {
    let p = w
        .doc
        .pearson_spec(&w.spec)
        .map_err(py_err)?
        .ok_or_else(|| py_err(Error::SpecMismatch("weight carries no Pearson coefficients".into())))?;
    DPIICoefficients::from_pearson(&p).map_err(py_err)
}

/// Fourier moments `mu_j` for `|j| <= j_max`, keyed by `j`.
#[pyfunction]
fn moments(weight_json: &str, j_max: usize) -> PyResult<BTreeMap<i64, PyMatrix>> {
    let w = weight(weight_json)?;
    let t = compute_moments(&w.spec, j_max, INITIAL_NODES).map_err(py_err)?;
    let j = j_max as i64;
    Ok((-j..=j).map(|k| (k, to_py(t.mu(k)))).collect())
}

/// Verblunsky lattice through degree `n_max`: dict of lists `a_l1`, `a_r2d`, `h_l`, `h_r`.
#[pyfunction]
#[pyo3(signature = (weight_json, n_max, j_max = 64))]
fn lattice<'py>(py: Python<'py>, weight_json: &str, n_max: usize, j_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let w = weight(weight_json)?;
    let (_, families) = pipeline(&w, n_max, j_max)?;
    let lat = VerblunskyLattice::from_families(&families);
    let d = PyDict::new(py);
    let seq = |v: &[CMat]| v.iter().map(to_py).collect::<Vec<_>>();
    d.set_item("a_l1", seq(&lat.a_l1))?;
    d.set_item("a_r2d", seq(&lat.a_r2d))?;
    d.set_item("h_l", seq(&lat.h_l))?;
    d.set_item("h_r", seq(&lat.h_r))?;
    Ok(d)
}

/// `"fuchsian"` or `"nonfuchsian"`, read from the Pearson exponents.
#[pyfunction]
fn dpii_variant(weight_json: &str) -> PyResult<&'static str> {
    Ok(match coefficients(&weight(weight_json)?)? {
        DPIICoefficients::Fuchsian { .. } => "fuchsian",
        DPIICoefficients::NonFuchsian { .. } => "nonfuchsian",
    })
}

/// Relative dPII residuals `(n, |R_1|/s, |R_2|/s)` on the moment-derived lattice, `n = 1..n_max-1`.
#[pyfunction]
#[pyo3(signature = (weight_json, n_max, j_max = 64))]
fn dpii_residuals(weight_json: &str, n_max: usize, j_max: usize) -> PyResult<Vec<(usize, f64, f64)>> {
    let w = weight(weight_json)?;
    let coeffs = coefficients(&w)?;
    let (_, families) = pipeline(&w, n_max, j_max)?;
    let lat = VerblunskyLattice::from_families(&families);
    (1..lat.n_max)
        .map(|n| {
            let (r1, r2) = painleve::dpii_residual(&lat, &coeffs, n)?;
            let s = painleve::term_scale(&lat, &coeffs, n)?;
            Ok((n, fro(&r1) / s, fro(&r2) / s))
        })
        .collect::<mopuc::Result<_>>()
        .map_err(py_err)
}

/// Steps the dPII map from `(a_l1, a_r2d)` at `n = 1`; returns `[(n, a_l1, a_r2d), ...]` for `n = 1..=1+steps`.
#[pyfunction]
fn dpii_propagate(weight_json: &str, a_l1: PyMatrix, a_r2d: PyMatrix, steps: usize) -> PyResult<Vec<(usize, PyMatrix, PyMatrix)>> {
    let w = weight(weight_json)?;
    let coeffs = coefficients(&w)?;
    let n = coeffs.n_dim();
    let state = DPIIState::initial(from_py(&a_l1, n)?, from_py(&a_r2d, n)?);
    let (_, traj) = painleve::propagate(&state, &coeffs, steps).map_err(py_err)?;
    Ok(traj.iter().map(|r| (r.n, to_py(&r.a_l1), to_py(&r.a_r2d))).collect())
}

/// Scalar dPII residual for the coefficient sequence `alpha` (with `alpha[0] = 1`) at site `n`.
#[pyfunction]
fn scalar_dpii_residual(alpha: Vec<C64>, k: C64, n: usize) -> PyResult<C64> {
    painleve::scalar_dpii_residual(&alpha, k, n).map_err(py_err)
}

/// Full check suite; each record is a dict with `check`, `n`, `z`, `residual`, `threshold`, `pass`, `error`.
#[pyfunction]
#[pyo3(signature = (weight_json, n_max, j_max = 64, tolerances = None))]
fn verify_weight<'py>(
    py: Python<'py>,
    weight_json: &str,
    n_max: usize,
    j_max: usize,
    tolerances: Option<BTreeMap<String, f64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let w = weight(weight_json)?;
    let tol = verify::tolerances(&tolerances.unwrap_or_default()).map_err(py_err)?;
    let (table, families) = pipeline(&w, n_max, j_max)?;
    let pearson = w.doc.pearson_spec(&w.spec).map_err(py_err)?;
    let records = verify::verify_all(&w.spec, &table, &families, pearson.as_ref(), &tol).map_err(py_err)?;
    records
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("check", r.check)?;
            d.set_item("n", r.n)?;
            d.set_item("z", r.z.map(|z| C64::new(z[0], z[1])))?;
            d.set_item("residual", r.residual)?;
            d.set_item("threshold", r.threshold)?;
            d.set_item("pass", r.pass)?;
            d.set_item("error", r.error)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pymopuc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("MopucError", py.get_type::<MopucError>())?;
    m.add("QuasiDefiniteError", py.get_type::<QuasiDefiniteError>())?;
    m.add("SingularError", py.get_type::<SingularError>())?;
    m.add("SpecMismatchError", py.get_type::<SpecMismatchError>())?;
    m.add("ConvergenceError", py.get_type::<ConvergenceError>())?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(lattice, m)?)?;
    m.add_function(wrap_pyfunction!(dpii_variant, m)?)?;
    m.add_function(wrap_pyfunction!(dpii_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(dpii_propagate, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_dpii_residual, m)?)?;
    m.add_function(wrap_pyfunction!(verify_weight, m)?)?;
    Ok(())
}
