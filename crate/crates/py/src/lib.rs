//! Python bindings: the folding plan as a class, plus thin functions over
//! the Markov engine, the model maps and the Monte Carlo estimators.
//! Structured results come back as plain dicts and lists; exact rationals
//! stay `"p/q"` strings.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;
use squeeze_core::folding::{self, Point4};
use squeeze_core::markov::{self, qstr::parse_rational, FitResult, MarkovTriple};
use squeeze_core::measure::{self, JacobianMode};
use squeeze_core::model::{self, CotangentPoint, C64};

fn err(e: squeeze_core::Error) -> PyErr {
    match e {
        squeeze_core::Error::Domain(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => PyList::new(py, a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?)?.into_any(),
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn pyobj<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn rational(s: &str) -> PyResult<markov::Q> {
    parse_rational(s).map_err(PyValueError::new_err)
}

/// Lipschitz-controlled symplectic folding of the cube `[-R, R]^4`.
#[pyclass(name = "FoldingPlan", frozen)]
struct PyFoldingPlan {
    inner: folding::FoldingPlan,
}

#[pymethods]
impl PyFoldingPlan {
    #[new]
    #[pyo3(signature = (r, lipschitz))]
    fn new(r: f64, lipschitz: f64) -> PyResult<Self> {
        Ok(PyFoldingPlan { inner: folding::compose_plan(r, lipschitz).map_err(err)? })
    }

    #[getter]
    fn cells(&self) -> usize {
        self.inner.cells
    }

    #[getter]
    fn stretch_constant(&self) -> f64 {
        self.inner.stretch.c
    }

    fn stages(&self) -> Vec<&'static str> {
        self.inner.stack.iter().map(|m| m.name()).collect()
    }

    fn eval(&self, p: Point4) -> PyResult<Point4> {
        self.inner.eval(p).map_err(err)
    }

    /// Jacobian as a row-major 4x4 list.
    fn jacobian(&self, p: Point4) -> PyResult<Vec<Vec<f64>>> {
        let (_, j) = self.inner.eval_with_jacobian(p).map_err(err)?;
        Ok((0..4).map(|i| (0..4).map(|k| j[(i, k)]).collect()).collect())
    }

    /// `max |J^T Ω J - Ω|` at `p`; `finite_difference` selects the
    /// stagewise central-difference Jacobian.
    #[pyo3(signature = (p, finite_difference = false))]
    fn symplectic_residual(&self, p: Point4, finite_difference: bool) -> PyResult<f64> {
        let mode = if finite_difference { JacobianMode::FiniteDifference } else { JacobianMode::Analytic };
        measure::symplecticity_residual(&self.inner, p, mode).map_err(err)
    }

    fn block_index(&self, p: Point4) -> PyResult<Option<(usize, usize)>> {
        self.inner.block_index(p).map_err(err)
    }

    #[pyo3(signature = (r = 1.0, n = 100_000, seed = 0))]
    fn defect_volume<'py>(&self, py: Python<'py>, r: f64, n: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let est = py.detach(|| measure::defect_volume(&self.inner, r, n, seed)).map_err(err)?;
        pyobj(py, &est)
    }

    #[pyo3(signature = (n = 10_000, seed = 0))]
    fn lipschitz_estimate<'py>(&self, py: Python<'py>, n: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let region = measure::cube(self.inner.r);
        let rep = py.detach(|| measure::lipschitz_estimate(&self.inner, &region, n, seed)).map_err(err)?;
        pyobj(py, &rep)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

/// Markov triples with largest entry at most `max_entry`.
#[pyfunction]
fn enumerate_tree(max_entry: BigInt) -> PyResult<Vec<(BigInt, BigInt, BigInt)>> {
    Ok(markov::enumerate_tree(&max_entry)
        .map_err(err)?
        .into_iter()
        .map(|t| {
            let [a, b, c] = t.entries().clone();
            (a, b, c)
        })
        .collect())
}

#[pyfunction]
fn branch_sequence(n: usize) -> Vec<BigInt> {
    markov::branch_sequence(n)
}

#[pyfunction]
fn is_markov(a: BigInt, b: BigInt, c: BigInt) -> PyResult<bool> {
    markov::is_markov(&a, &b, &c).map_err(err)
}

/// Fit result for `alpha` (a `"p/q"` string) as a dict with `kind` equal
/// to `"Fit"` or `"NoFit"`.
#[pyfunction]
fn find_fitting_triple<'py>(py: Python<'py>, alpha: &str) -> PyResult<Bound<'py, PyAny>> {
    let result: FitResult = markov::find_fitting_triple(&rational(alpha)?).map_err(err)?;
    pyobj(py, &result)
}

/// Exact area, affine perimeter and edge lengths of the Markov triangle.
#[pyfunction]
fn markov_triangle<'py>(py: Python<'py>, a: BigInt, b: BigInt, c: BigInt, alpha: &str) -> PyResult<Bound<'py, PyAny>> {
    let t = MarkovTriple::new(a, b, c).map_err(err)?;
    let tri = markov::build_triangle(&t, &rational(alpha)?).map_err(err)?;
    let r = &tri.realization;
    let d = PyDict::new(py);
    d.set_item("triangle", pyobj(py, &tri)?)?;
    d.set_item("area", r.area().to_string())?;
    d.set_item("affine_perimeter", r.affine_perimeter().to_string())?;
    d.set_item("edge_affine_lengths", r.edge_affine_lengths().iter().map(|q| q.to_string()).collect::<Vec<_>>())?;
    Ok(d.into_any())
}

#[pyfunction]
fn ou_f(x: f64) -> PyResult<f64> {
    model::ou_f(x).map_err(err)
}

/// Normalized homogeneous coordinates of the image of `(q, p)` in `CP^2`.
#[pyfunction]
fn ou_map(q: [f64; 3], p: [f64; 3]) -> PyResult<Vec<C64>> {
    let cp = CotangentPoint::new(q, p).map_err(err)?;
    Ok(model::ou_map(&cp).map_err(err)?.coords().to_vec())
}

#[pyfunction]
#[pyo3(signature = (n = 1000, rotations = 100, h = 1e-5, seed = 0))]
fn ou_check<'py>(py: Python<'py>, n: usize, rotations: usize, h: f64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let rep = model::ou_check(n, rotations, h, seed).map_err(err)?;
    pyobj(py, &rep)
}

#[pyfunction]
fn toric_coords(x: [f64; 2], theta: [f64; 2]) -> PyResult<[f64; 4]> {
    model::toric_coords(x, theta).map_err(err)
}

#[pyfunction]
fn moment_map(z: [f64; 4]) -> [f64; 2] {
    model::moment_map(z)
}

/// Sample the torus fibres over the half-strip fit for `alpha`.
#[pyfunction]
#[pyo3(signature = (alpha, n = 10_000, seed = 0))]
fn triangle_torus_containment<'py>(py: Python<'py>, alpha: &str, n: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let FitResult::Fit { fit, .. } = markov::find_fitting_triple(&rational(alpha)?).map_err(err)? else {
        return Err(PyValueError::new_err(format!("alpha = {alpha} has no half-strip fit")));
    };
    let rep = model::triangle_torus_containment(&fit, n, seed).map_err(err)?;
    pyobj(py, &rep)
}

/// Tube volumes of the Lagrangian disk of radius `radius` and the fitted
/// Minkowski dimension and content.
#[pyfunction]
#[pyo3(signature = (t_values, radius = std::f64::consts::SQRT_2, n = 1_000_000, seed = 0))]
fn disk_minkowski_curve<'py>(py: Python<'py>, t_values: Vec<f64>, radius: f64, n: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let (_, curve) = py
        .detach(|| {
            measure::neighborhood_curve(
                |p| model::lagrangian_disk_distance(*p, radius),
                |t| measure::disk_neighborhood_box(radius, t),
                &t_values,
                n,
                seed,
            )
        })
        .map_err(err)?;
    pyobj(py, &curve)
}

#[pyfunction]
fn disk_tube_volume(radius: f64, t: f64) -> f64 {
    model::disk_tube_volume(radius, t)
}

#[pymodule]
fn squeeze(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFoldingPlan>()?;
    m.add_function(wrap_pyfunction!(enumerate_tree, m)?)?;
    m.add_function(wrap_pyfunction!(branch_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(is_markov, m)?)?;
    m.add_function(wrap_pyfunction!(find_fitting_triple, m)?)?;
    m.add_function(wrap_pyfunction!(markov_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(ou_f, m)?)?;
    m.add_function(wrap_pyfunction!(ou_map, m)?)?;
    m.add_function(wrap_pyfunction!(ou_check, m)?)?;
    m.add_function(wrap_pyfunction!(toric_coords, m)?)?;
    m.add_function(wrap_pyfunction!(moment_map, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_torus_containment, m)?)?;
    m.add_function(wrap_pyfunction!(disk_minkowski_curve, m)?)?;
    m.add_function(wrap_pyfunction!(disk_tube_volume, m)?)?;
    Ok(())
}
