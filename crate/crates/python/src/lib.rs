//! Python bindings: `import bratu`.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use bratu_core::analytic;
use bratu_core::continuation::{self, ContinuationConfig, CriticalKind};
use bratu_core::scan::{self, ScanForm};
use bratu_core::{BratuError, DiscreteState, Grid, Scheme};

create_exception!(bratu, NumericalError, PyException);

fn to_py(e: BratuError) -> PyErr {
    match e {
        BratuError::Domain(_) | BratuError::InvalidConfig(_) | BratuError::Dimension(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => NumericalError::new_err(other.to_string()),
    }
}

fn scheme_from(name: &str, fe_quad: usize) -> PyResult<Scheme> {
    match name {
        "fd" => Ok(Scheme::finite_difference()),
        "fe" => Scheme::finite_element(fe_quad).map_err(to_py),
        other => Err(PyValueError::new_err(format!("scheme must be 'fd' or 'fe', got {other:?}"))),
    }
}

fn form_from(name: &str) -> PyResult<ScanForm> {
    match name {
        "original" => Ok(ScanForm::OriginalX),
        "legendre" => Ok(ScanForm::LegendreT),
        "original-exact" => Ok(ScanForm::OriginalExact),
        other => Err(PyValueError::new_err(format!(
            "form must be 'original', 'legendre' or 'original-exact', got {other:?}"
        ))),
    }
}

/// Continuation settings; keyword arguments mirror the Rust field names.
#[pyclass(name = "ContinuationConfig", get_all, set_all, from_py_object)]
#[derive(Clone)]
pub struct PyConfig {
    ds_initial: f64,
    ds_min: f64,
    ds_max: f64,
    newton_tol: f64,
    newton_max_iters: usize,
    target_u_star: f64,
    theta: f64,
    critical_bisection_tol: f64,
    lambda_floor: f64,
    max_steps: usize,
}

impl From<ContinuationConfig> for PyConfig {
    fn from(c: ContinuationConfig) -> Self {
        Self {
            ds_initial: c.ds_initial,
            ds_min: c.ds_min,
            ds_max: c.ds_max,
            newton_tol: c.newton_tol,
            newton_max_iters: c.newton_max_iters,
            target_u_star: c.target_u_star,
            theta: c.theta,
            critical_bisection_tol: c.critical_bisection_tol,
            lambda_floor: c.lambda_floor,
            max_steps: c.max_steps,
        }
    }
}

impl PyConfig {
    fn inner(&self) -> ContinuationConfig {
        ContinuationConfig {
            ds_initial: self.ds_initial,
            ds_min: self.ds_min,
            ds_max: self.ds_max,
            newton_tol: self.newton_tol,
            newton_max_iters: self.newton_max_iters,
            target_u_star: self.target_u_star,
            theta: self.theta,
            critical_bisection_tol: self.critical_bisection_tol,
            lambda_floor: self.lambda_floor,
            max_steps: self.max_steps,
        }
    }
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (target_u_star = 10.0, ds_initial = 0.05, ds_max = 0.5, theta = 0.5))]
    fn new(target_u_star: f64, ds_initial: f64, ds_max: f64, theta: f64) -> PyResult<Self> {
        let c = ContinuationConfig {
            target_u_star,
            ds_initial,
            ds_max,
            theta,
            ..ContinuationConfig::default()
        };
        c.validate().map_err(to_py)?;
        Ok(c.into())
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner())
    }
}

/// One accepted point of a traced branch.
#[pyclass(name = "BranchPoint", frozen, get_all)]
pub struct PyBranchPoint {
    s: f64,
    #[pyo3(name = "lambda_")]
    lambda: f64,
    u_star: f64,
    mu_min: f64,
    neg_count: usize,
    newton_iters: usize,
    u: Vec<f64>,
}

impl From<&continuation::BranchPoint> for PyBranchPoint {
    fn from(p: &continuation::BranchPoint) -> Self {
        Self {
            s: p.s,
            lambda: p.state.lambda,
            u_star: p.u_star,
            mu_min: p.mu_min,
            neg_count: p.neg_count,
            newton_iters: p.newton_iters,
            u: p.state.u.clone(),
        }
    }
}

#[pymethods]
impl PyBranchPoint {
    fn __repr__(&self) -> String {
        format!(
            "BranchPoint(s={}, lambda_={}, u_star={}, neg_count={})",
            self.s, self.lambda, self.u_star, self.neg_count
        )
    }
}

/// A located and classified critical point.
#[pyclass(name = "CriticalPoint", frozen, get_all)]
pub struct PyCriticalPoint {
    /// "LimitPoint" or "Bifurcation".
    kind: String,
    s: f64,
    #[pyo3(name = "lambda_")]
    lambda: f64,
    u_star: f64,
    mu: f64,
    psi: Vec<f64>,
    sigma_hat: f64,
    antisymmetry_index: f64,
    sawtooth_fraction: f64,
    ambiguous: bool,
}

impl From<&continuation::CriticalPoint> for PyCriticalPoint {
    fn from(p: &continuation::CriticalPoint) -> Self {
        Self {
            kind: match p.kind {
                CriticalKind::LimitPoint => "LimitPoint",
                CriticalKind::Bifurcation => "Bifurcation",
            }
            .to_string(),
            s: p.s,
            lambda: p.lambda,
            u_star: p.u_star,
            mu: p.mu,
            psi: p.psi.clone(),
            sigma_hat: p.sigma_hat,
            antisymmetry_index: p.antisymmetry_index,
            sawtooth_fraction: p.sawtooth_fraction,
            ambiguous: p.ambiguous,
        }
    }
}

#[pymethods]
impl PyCriticalPoint {
    fn __repr__(&self) -> String {
        format!(
            "CriticalPoint(kind={}, lambda_={}, u_star={}, sigma_hat={:e})",
            self.kind, self.lambda, self.u_star, self.sigma_hat
        )
    }
}

/// Iterator over accepted branch points, starting at `(0, 0)`.
#[pyclass(name = "BranchTracer")]
pub struct PyBranchTracer {
    inner: continuation::BranchTracer,
}

#[pymethods]
impl PyBranchTracer {
    #[new]
    #[pyo3(signature = (n, scheme = "fd", config = None, fe_quad = 3))]
    fn new(n: usize, scheme: &str, config: Option<PyConfig>, fe_quad: usize) -> PyResult<Self> {
        let grid = Arc::new(Grid::new(n).map_err(to_py)?);
        let config = config.map(|c| c.inner()).unwrap_or_default();
        let inner = continuation::BranchTracer::new(scheme_from(scheme, fe_quad)?, grid, config).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> PyResult<Option<PyBranchPoint>> {
        Ok(self.inner.next_point().map_err(to_py)?.as_ref().map(PyBranchPoint::from))
    }
}

#[pyclass(name = "ScanResult", frozen, get_all)]
pub struct PyScanResult {
    form: String,
    n_elements: usize,
    alpha_grid: Vec<f64>,
    indicator: Vec<f64>,
    roots: Vec<f64>,
}

/// Branch points from `(0, 0)` until `config.target_u_star`.
#[pyfunction]
#[pyo3(signature = (n, scheme = "fd", config = None, fe_quad = 3))]
fn trace_branch(n: usize, scheme: &str, config: Option<PyConfig>, fe_quad: usize) -> PyResult<Vec<PyBranchPoint>> {
    let grid = Arc::new(Grid::new(n).map_err(to_py)?);
    let config = config.map(|c| c.inner()).unwrap_or_default();
    let trace = continuation::trace_branch(&scheme_from(scheme, fe_quad)?, grid, &config).map_err(to_py)?;
    Ok(trace.iter().map(PyBranchPoint::from).collect())
}

/// Critical points along the branch. With `target_u_star=None`, tracing
/// stops at the first bifurcation (or u* = 200).
#[pyfunction]
#[pyo3(signature = (n, scheme = "fd", target_u_star = None, fe_quad = 3))]
fn critical_points(n: usize, scheme: &str, target_u_star: Option<f64>, fe_quad: usize) -> PyResult<Vec<PyCriticalPoint>> {
    let scheme = scheme_from(scheme, fe_quad)?;
    let grid = Arc::new(Grid::new(n).map_err(to_py)?);
    let points = match target_u_star {
        None => {
            let search = continuation::trace_to_first_bifurcation(&scheme, grid, &ContinuationConfig::with_target(200.0))
                .map_err(to_py)?;
            if let Some(e) = search.error {
                return Err(to_py(e));
            }
            search.critical.points
        }
        Some(t) => {
            let config = ContinuationConfig::with_target(t);
            let trace = continuation::trace_branch(&scheme, grid, &config).map_err(to_py)?;
            continuation::locate_critical_points(&trace, &scheme, &config).points
        }
    };
    Ok(points.iter().map(PyCriticalPoint::from).collect())
}

/// `(lambda0, u_star)` of the exact branch at `alpha`.
#[pyfunction]
fn exact_branch(alpha: f64) -> PyResult<(f64, f64)> {
    let p = analytic::exact_branch(alpha).map_err(to_py)?;
    Ok((p.lambda0, p.u_star))
}

/// `(alpha_bar, lambda_bar, u_star_bar, inner_product)` at the fold.
#[pyfunction]
fn limit_point() -> (f64, f64, f64, f64) {
    let r = analytic::find_alpha_bar();
    (r.alpha_bar, r.lambda_bar, r.u_star_bar, r.inner_product)
}

#[pyfunction]
fn alpha_from_ustar(u_star: f64) -> PyResult<f64> {
    analytic::alpha_from_ustar(u_star).map_err(to_py)
}

/// Discrete residual of the scheme at interior values `u`.
#[pyfunction]
#[pyo3(signature = (n, u, lambda_, scheme = "fd", fe_quad = 3))]
fn residual(n: usize, u: Vec<f64>, lambda_: f64, scheme: &str, fe_quad: usize) -> PyResult<Vec<f64>> {
    let grid = Arc::new(Grid::new(n).map_err(to_py)?);
    let state = DiscreteState::new(grid, u, lambda_).map_err(to_py)?;
    scheme_from(scheme, fe_quad)?.residual(&state).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (form, n, alpha_min = 0.1, alpha_max = 15.0, steps = scan::DEFAULT_STEPS))]
fn scan_alpha(form: &str, n: usize, alpha_min: f64, alpha_max: f64, steps: usize) -> PyResult<PyScanResult> {
    let f = form_from(form)?;
    let r = scan::scan_alpha(f, n, alpha_min, alpha_max, steps).map_err(to_py)?;
    Ok(PyScanResult {
        form: f.name().to_string(),
        n_elements: r.n_elements,
        roots: r.roots.iter().map(|x| x.alpha).collect(),
        alpha_grid: r.alpha_grid,
        indicator: r.indicator,
    })
}

#[pyfunction]
fn kernel_vector(form: &str, n: usize, alpha: f64) -> PyResult<Vec<f64>> {
    scan::kernel_vector(form_from(form)?, n, alpha).map_err(to_py)
}

/// `(antisymmetry_index, sawtooth_fraction)`.
#[pyfunction]
fn classify_symmetry(psi: Vec<f64>) -> (f64, f64) {
    continuation::classify_symmetry(&psi)
}

#[pymodule]
fn bratu(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyBranchPoint>()?;
    m.add_class::<PyCriticalPoint>()?;
    m.add_class::<PyBranchTracer>()?;
    m.add_class::<PyScanResult>()?;
    m.add_function(wrap_pyfunction!(trace_branch, m)?)?;
    m.add_function(wrap_pyfunction!(critical_points, m)?)?;
    m.add_function(wrap_pyfunction!(exact_branch, m)?)?;
    m.add_function(wrap_pyfunction!(limit_point, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_from_ustar, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(scan_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_vector, m)?)?;
    m.add_function(wrap_pyfunction!(classify_symmetry, m)?)?;
    Ok(())
}
