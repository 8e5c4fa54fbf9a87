//! Python bindings for the `nopa_bell` library.

use ::nopa_bell::bell::{self, BellKind, BellReport};
use ::nopa_bell::bits::{self, BitIndex, NumberBasis};
use ::nopa_bell::correlations::{self, CorrelationQuery};
use ::nopa_bell::pseudospin::{self, AlgebraReport, SpinAxis};
use ::nopa_bell::sampler::{self, EstimateRequest};
use ::nopa_bell::{TruncatedFockSpace, Truncation, C64};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: ::nopa_bell::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code()))
}

fn space_for(dim: usize) -> PyResult<TruncatedFockSpace> {
    TruncatedFockSpace::with_dimension(dim).map_err(py_err)
}

fn resolve_space(depth: u32, r: f64) -> PyResult<TruncatedFockSpace> {
    if depth == 0 {
        TruncatedFockSpace::auto_for_squeezing(r)
    } else {
        TruncatedFockSpace::new(depth)
    }
    .map_err(py_err)
}

fn parse_axis(axis: &str, theta: Option<f64>) -> PyResult<SpinAxis> {
    Ok(match (axis, theta) {
        ("z", _) => SpinAxis::Z,
        ("x", _) => SpinAxis::X,
        ("y", _) => SpinAxis::Y,
        ("+" | "plus", _) => SpinAxis::Plus,
        ("-" | "minus", _) => SpinAxis::Minus,
        ("theta", Some(t)) => SpinAxis::Theta(t),
        ("theta", None) => return Err(PyValueError::new_err("axis 'theta' needs theta=")),
        (other, _) => return Err(PyValueError::new_err(format!("unknown axis '{other}'"))),
    })
}

fn parse_kind(
    kind: &str,
    d: Option<u32>,
    k: Option<u32>,
    weights: Option<Vec<f64>>,
) -> PyResult<BellKind> {
    let kind = match kind {
        "chsh" => BellKind::Chsh {
            d: d.unwrap_or(1) as usize,
        },
        "bit" => BellKind::BitXor { k: k.unwrap_or(0) },
        "number" => BellKind::NumberXor { d: d.unwrap_or(2) },
        "hamming" => BellKind::Hamming { d: d.unwrap_or(2) },
        "weighted" => BellKind::Weighted {
            weights: weights
                .ok_or_else(|| PyValueError::new_err("kind 'weighted' needs weights="))?,
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown Bell kind '{other}'"
            )))
        }
    };
    kind.validate().map_err(py_err)?;
    Ok(kind)
}

/// Sparse complex operator on a truncated Fock space.
#[pyclass(
    name = "SparseOperator",
    module = "nopa_bell_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PySparseOperator {
    inner: ::nopa_bell::SparseOperator,
}

#[pymethods]
impl PySparseOperator {
    #[staticmethod]
    fn identity(dim: usize) -> Self {
        Self {
            inner: ::nopa_bell::SparseOperator::identity(dim),
        }
    }

    #[staticmethod]
    fn from_triplets(dim: usize, triplets: Vec<(usize, usize, C64)>) -> PyResult<Self> {
        let inner = ::nopa_bell::SparseOperator::from_triplets(dim, triplets).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn entries(&self) -> Vec<(usize, usize, C64)> {
        self.inner.entries().to_vec()
    }

    fn to_dense(&self) -> Vec<Vec<C64>> {
        self.inner.to_dense()
    }

    fn get(&self, row: usize, col: usize) -> C64 {
        self.inner.get(row, col)
    }

    fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    fn matmul(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.matmul(&other.inner).map_err(py_err)?,
        })
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.matmul(other)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.add(&other.inner).map_err(py_err)?,
        })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.sub(&other.inner).map_err(py_err)?,
        })
    }

    fn scale(&self, factor: C64) -> Self {
        Self {
            inner: self.inner.scale(factor),
        }
    }

    fn commutator(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.commutator(&other.inner).map_err(py_err)?,
        })
    }

    fn kron(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kron(&other.inner),
        }
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    #[pyo3(signature = (tol = 1e-12))]
    fn is_hermitian(&self, tol: f64) -> bool {
        self.inner.is_hermitian(tol)
    }

    fn __repr__(&self) -> String {
        format!(
            "SparseOperator(dim={}, nnz={})",
            self.inner.dim(),
            self.inner.nnz()
        )
    }
}

/// Truncated two-mode state `sum_n c_n |n>|n>`.
#[pyclass(
    name = "SchmidtState",
    module = "nopa_bell_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PySchmidtState {
    inner: ::nopa_bell::SchmidtState,
}

#[pymethods]
impl PySchmidtState {
    #[staticmethod]
    fn from_coefficients(coefficients: Vec<f64>) -> PyResult<Self> {
        let space = space_for(coefficients.len())?;
        let inner =
            ::nopa_bell::SchmidtState::from_coefficients(space, coefficients).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.coefficients().to_vec()
    }

    #[getter]
    fn squeezing(&self) -> f64 {
        self.inner.squeezing()
    }

    #[getter]
    fn tail_weight(&self) -> f64 {
        self.inner.tail_weight()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.space().dim()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn expectation(&self, a: &PySparseOperator, b: &PySparseOperator) -> PyResult<C64> {
        ::nopa_bell::schmidt_expectation(&self.inner, &a.inner, &b.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SchmidtState(dim={}, r={}, tail_weight={:e})",
            self.inner.space().dim(),
            self.inner.squeezing(),
            self.inner.tail_weight()
        )
    }
}

/// Two-mode squeezed vacuum truncated at `2^depth` (0 picks the depth from `r`).
#[pyfunction]
#[pyo3(signature = (r, depth = 0, raw = false))]
fn nopa_state(r: f64, depth: u32, raw: bool) -> PyResult<PySchmidtState> {
    let mode = if raw {
        Truncation::Raw
    } else {
        Truncation::Renormalized
    };
    let inner =
        ::nopa_bell::nopa_coefficients(r, resolve_space(depth, r)?, mode).map_err(py_err)?;
    Ok(PySchmidtState { inner })
}

/// Pseudospin `s_(axis, d)` on a space of dimension `dim`. Axes: x, y, z,
/// plus, minus, theta.
#[pyfunction]
#[pyo3(signature = (axis, d, dim, theta = None))]
fn build_spin(axis: &str, d: usize, dim: usize, theta: Option<f64>) -> PyResult<PySparseOperator> {
    let inner =
        pseudospin::build_spin(parse_axis(axis, theta)?, d, space_for(dim)?).map_err(py_err)?;
    Ok(PySparseOperator { inner })
}

/// Bit projector `(I - s_(basis, 2^k)) / 2`.
#[pyfunction]
#[pyo3(signature = (basis, k, dim, theta = None))]
fn bit_operator(basis: &str, k: u32, dim: usize, theta: Option<f64>) -> PyResult<PySparseOperator> {
    let basis = match (basis, theta) {
        ("z", _) => NumberBasis::Z,
        ("x", _) => NumberBasis::X,
        ("y", _) => NumberBasis::Y,
        ("theta", Some(t)) => NumberBasis::Theta(t),
        _ => return Err(PyValueError::new_err(format!("bad basis '{basis}'"))),
    };
    let inner = bits::bit_operator(basis, BitIndex(k), space_for(dim)?).map_err(py_err)?;
    Ok(PySparseOperator { inner })
}

fn algebra_dict<'py>(py: Python<'py>, rep: &AlgebraReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("passed", rep.passed())?;
    out.set_item("max_residual", rep.max_residual())?;
    out.set_item("pairs_checked", rep.pairs_checked)?;
    let checks: Vec<(String, f64)> = rep
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.residual))
        .collect();
    out.set_item("checks", checks)?;
    Ok(out)
}

#[pyfunction]
fn verify_spin_algebra(py: Python<'_>, d: usize, dim: usize) -> PyResult<Bound<'_, PyDict>> {
    let rep = pseudospin::verify_spin_algebra(d, space_for(dim)?).map_err(py_err)?;
    algebra_dict(py, &rep)
}

#[pyfunction]
fn verify_hierarchy(py: Python<'_>, max_k: u32, dim: usize) -> PyResult<Bound<'_, PyDict>> {
    let rep = pseudospin::verify_hierarchy(max_k, space_for(dim)?).map_err(py_err)?;
    algebra_dict(py, &rep)
}

#[pyfunction]
fn squeeze_k(r: f64) -> f64 {
    correlations::squeeze_k(r)
}

#[pyfunction]
fn squeeze_kd(r: f64, d: usize) -> f64 {
    correlations::squeeze_kd(r, d)
}

/// Closed-form `<s_(alpha,d) s'_(beta,d)>`.
#[pyfunction]
fn analytic_correlation(alpha: f64, beta: f64, d: usize, r: f64) -> PyResult<f64> {
    let q = CorrelationQuery::new(alpha, beta, d, r).map_err(py_err)?;
    Ok(correlations::analytic_correlation(&q))
}

/// Returns `(numeric, analytic, abs_err, tail_weight)`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, d, r, depth = 0, raw = false))]
fn numeric_correlation(
    alpha: f64,
    beta: f64,
    d: usize,
    r: f64,
    depth: u32,
    raw: bool,
) -> PyResult<(f64, f64, f64, f64)> {
    let q = CorrelationQuery::new(alpha, beta, d, r).map_err(py_err)?;
    let mode = if raw {
        Truncation::Raw
    } else {
        Truncation::Renormalized
    };
    let n =
        correlations::numeric_correlation(&q, resolve_space(depth, r)?, mode).map_err(py_err)?;
    Ok((n.numeric, n.analytic, n.abs_err, n.tail_weight))
}

fn report_dict<'py>(py: Python<'py>, rep: &BellReport) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("kind", rep.kind.label())?;
    out.set_item("lhs", rep.lhs_value)?;
    out.set_item("bound", rep.classical_bound)?;
    out.set_item("violation", rep.violation)?;
    out.set_item("std_err", rep.standard_error)?;
    out.set_item("warnings", rep.warnings.clone())?;
    Ok(out)
}

/// Closed-form Bell functional at settings `(0, pi/2)` against `(gamma, -gamma)`.
/// `kind` is one of chsh, bit, number, hamming, weighted. The result also
/// carries the optimum over gamma.
#[pyfunction]
#[pyo3(name = "nopa_bell", signature = (kind, gamma, r, d = None, k = None, weights = None))]
fn closed_form_bell<'py>(
    py: Python<'py>,
    kind: &str,
    gamma: f64,
    r: f64,
    d: Option<u32>,
    k: Option<u32>,
    weights: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_kind(kind, d, k, weights)?;
    let ev = bell::nopa_bell(&kind, gamma, r).map_err(py_err)?;
    let out = report_dict(py, &ev.report)?;
    out.set_item("gamma", ev.gamma)?;
    out.set_item("gamma_opt", ev.optimum.gamma)?;
    out.set_item("max_lhs", ev.optimum.max_lhs)?;
    Ok(out)
}

/// `(gamma*, max lhs)` of CHSH with level-`d` pseudospins.
#[pyfunction]
fn optimal_gamma(d: usize, r: f64) -> PyResult<(f64, f64)> {
    let opt = bell::optimal_gamma(d, r).map_err(py_err)?;
    Ok((opt.gamma, opt.max_lhs))
}

/// Bell functional evaluated on a truncated state with sparse operators.
#[pyfunction]
#[pyo3(signature = (state, kind, gamma, d = None, k = None, weights = None))]
fn numeric_bell<'py>(
    py: Python<'py>,
    state: &PySchmidtState,
    kind: &str,
    gamma: f64,
    d: Option<u32>,
    k: Option<u32>,
    weights: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_kind(kind, d, k, weights)?;
    let rep = bell::numeric_nopa_bell(&kind, gamma, &state.inner).map_err(py_err)?;
    report_dict(py, &rep)
}

/// Monte Carlo estimate of a Bell functional. Releases the GIL while sampling.
#[pyfunction]
#[pyo3(signature = (kind, gamma, r, shots, seed, depth = 0, d = None, k = None, weights = None))]
#[allow(clippy::too_many_arguments)]
fn estimate_bell<'py>(
    py: Python<'py>,
    kind: &str,
    gamma: f64,
    r: f64,
    shots: u64,
    seed: u64,
    depth: u32,
    d: Option<u32>,
    k: Option<u32>,
    weights: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_kind(kind, d, k, weights)?;
    let req = EstimateRequest {
        gamma,
        r,
        space: resolve_space(depth, r)?,
        shots,
        seed,
        target_standard_error: None,
    };
    let est = py
        .detach(|| sampler::estimate_bell(&kind, &req))
        .map_err(py_err)?;
    let out = report_dict(py, &est.report)?;
    out.set_item("analytic_lhs", est.analytic_lhs)?;
    out.set_item("z_score", est.z_score())?;
    Ok(out)
}

/// Sawtooth hidden-variable CHSH run: `(exact, empirical, std_err)`.
#[pyfunction]
fn lhv_estimate(
    py: Python<'_>,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    shots: u64,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let angles = bell::AngleSet {
        alpha,
        beta,
        gamma,
        delta,
    };
    let est = py
        .detach(|| sampler::lhv_estimate(&angles, shots, seed))
        .map_err(py_err)?;
    Ok((
        est.exact_lhs,
        est.report.lhs_value,
        est.report.standard_error.unwrap_or(f64::NAN),
    ))
}

/// `(strategies, max bit lhs, max chsh lhs)` over deterministic local strategies.
#[pyfunction]
fn enumerate_local_strategies() -> (usize, f64, f64) {
    let rep = bell::enumerate_local_strategies();
    (rep.strategies, rep.max_bit_lhs, rep.max_chsh_lhs)
}

#[pymodule]
fn nopa_bell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySparseOperator>()?;
    m.add_class::<PySchmidtState>()?;
    m.add_function(wrap_pyfunction!(nopa_state, m)?)?;
    m.add_function(wrap_pyfunction!(build_spin, m)?)?;
    m.add_function(wrap_pyfunction!(bit_operator, m)?)?;
    m.add_function(wrap_pyfunction!(verify_spin_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(verify_hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(squeeze_k, m)?)?;
    m.add_function(wrap_pyfunction!(squeeze_kd, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_bell, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_bell, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_bell, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_local_strategies, m)?)?;
    Ok(())
}
