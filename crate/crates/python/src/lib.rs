//! Python bindings. Reals are floats; exact spline values are
//! `fractions.Fraction`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sinclp::{PiecewisePoly, QuadratureConfig};

type Fraction = Ratio<BigInt>;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(tol: Option<f64>, max_lobes: Option<usize>) -> PyResult<QuadratureConfig> {
    let mut cfg = tol.map_or_else(QuadratureConfig::default, QuadratureConfig::with_tol);
    if let Some(m) = max_lobes {
        cfg.max_lobes = m;
    }
    cfg.validate().map_err(value_error)?;
    Ok(cfg)
}

/// Outcome of `sinc_lp_integral`.
#[pyclass(
    name = "SincNorm",
    module = "sinclp_py",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone)]
struct PySincNorm {
    p: f64,
    value: f64,
    quad_error: f64,
    tail_bound: f64,
    cutoff: f64,
    total_error: f64,
}

impl From<sinclp::SincNormResult> for PySincNorm {
    fn from(r: sinclp::SincNormResult) -> Self {
        Self {
            p: r.p,
            value: r.value,
            quad_error: r.quad_error,
            tail_bound: r.tail_bound,
            cutoff: r.cutoff,
            total_error: r.total_error,
        }
    }
}

#[pymethods]
impl PySincNorm {
    fn __repr__(&self) -> String {
        format!(
            "SincNorm(p={}, value={}, total_error={:e})",
            self.p, self.value, self.total_error
        )
    }
}

/// The integral at `p` together with every bound evaluated there.
#[pyclass(name = "BoundReport", module = "sinclp_py", frozen, get_all)]
struct PyBoundReport {
    p: f64,
    integral: PySincNorm,
    ball_bound: f64,
    c_p: f64,
    improved_bound: f64,
    margin_ball: f64,
    margin_improved: f64,
    asymptotic_ratio: f64,
}

#[pymethods]
impl PyBoundReport {
    fn __repr__(&self) -> String {
        format!(
            "BoundReport(p={}, integral={}, ball_bound={}, improved_bound={})",
            self.p, self.integral.value, self.ball_bound, self.improved_bound
        )
    }
}

/// Result of `verify_suite`. `failures` holds `(check, p, observed, required)`.
#[pyclass(name = "VerificationSummary", module = "sinclp_py", frozen, get_all)]
struct PyVerificationSummary {
    grid: Vec<f64>,
    checks_run: usize,
    failures: Vec<(String, f64, f64, f64)>,
    passed: bool,
}

#[pymethods]
impl PyVerificationSummary {
    fn __repr__(&self) -> String {
        format!(
            "VerificationSummary(checks_run={}, failures={}, passed={})",
            self.checks_run,
            self.failures.len(),
            if self.passed { "True" } else { "False" }
        )
    }

    fn __bool__(&self) -> bool {
        self.passed
    }
}

/// Exact symmetric B-spline of degree `n`.
#[pyclass(name = "BSpline", module = "sinclp_py", frozen)]
struct PyBSpline {
    inner: Arc<PiecewisePoly>,
}

#[pymethods]
impl PyBSpline {
    #[new]
    fn new(n: usize) -> Self {
        Self {
            inner: sinclp::bspline(n),
        }
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn breakpoints(&self) -> Vec<Fraction> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn support(&self) -> (Fraction, Fraction) {
        let (a, b) = self.inner.support();
        (a.clone(), b.clone())
    }

    fn __call__(&self, x: Fraction) -> Fraction {
        self.inner.eval(&x)
    }

    fn integral(&self) -> Fraction {
        self.inner.integral()
    }

    fn integral_of_square(&self) -> Fraction {
        self.inner.integral_of_square()
    }

    fn is_smooth_to_order(&self, order: usize) -> bool {
        self.inner.is_smooth_to_order(order)
    }

    fn __repr__(&self) -> String {
        format!("BSpline({})", self.inner.degree())
    }
}

#[pyfunction]
#[pyo3(signature = (p, *, tol = None, max_lobes = None))]
fn sinc_lp_integral(p: f64, tol: Option<f64>, max_lobes: Option<usize>) -> PyResult<PySincNorm> {
    let cfg = config(tol, max_lobes)?;
    sinclp::sinc_lp_integral(p, &cfg)
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (p, *, tol = None))]
fn central_integral(p: f64, tol: Option<f64>) -> PyResult<f64> {
    sinclp::central_integral(p, &config(tol, None)?).map_err(value_error)
}

#[pyfunction]
fn sinc_pow_integrand(t: f64, p: f64) -> PyResult<f64> {
    sinclp::sinc_pow_integrand(t, p).map_err(value_error)
}

#[pyfunction]
fn tail_bound(p: f64, cutoff: f64) -> PyResult<f64> {
    sinclp::tail_bound(p, cutoff).map_err(value_error)
}

#[pyfunction]
fn choose_cutoff(p: f64, tol: f64) -> PyResult<f64> {
    sinclp::choose_cutoff(p, tol).map_err(value_error)
}

#[pyfunction]
fn ball_bound(p: f64) -> PyResult<f64> {
    sinclp::ball_bound(p).map_err(value_error)
}

#[pyfunction]
fn c_of_p(p: f64) -> PyResult<f64> {
    sinclp::c_of_p(p).map_err(value_error)
}

#[pyfunction]
fn improved_bound(p: f64) -> PyResult<f64> {
    sinclp::improved_bound(p).map_err(value_error)
}

#[pyfunction]
fn p0() -> f64 {
    sinclp::p0()
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-14))]
fn solve_p0(tol: f64) -> PyResult<f64> {
    sinclp::solve_p0(tol).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (p, *, tol = None))]
fn asymptotic_ratio(p: f64, tol: Option<f64>) -> PyResult<f64> {
    sinclp::asymptotic_ratio(p, &config(tol, None)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (p, *, tol = None))]
fn sandwich_check(p: f64, tol: Option<f64>) -> PyResult<bool> {
    sinclp::sandwich_check(p, &config(tol, None)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (p, *, tol = None))]
fn bound_report(p: f64, tol: Option<f64>) -> PyResult<PyBoundReport> {
    let r = sinclp::bound_report(p, &config(tol, None)?).map_err(value_error)?;
    Ok(PyBoundReport {
        p: r.p,
        integral: r.integral.into(),
        ball_bound: r.ball_bound,
        c_p: r.c_p,
        improved_bound: r.improved_bound,
        margin_ball: r.margin_ball,
        margin_improved: r.margin_improved,
        asymptotic_ratio: r.asymptotic_ratio,
    })
}

/// Runs every check on `grid` (the default grid when omitted).
#[pyfunction]
#[pyo3(signature = (grid = None, *, tol = None))]
fn verify_suite(
    py: Python<'_>,
    grid: Option<Vec<f64>>,
    tol: Option<f64>,
) -> PyResult<PyVerificationSummary> {
    let cfg = config(tol, None)?;
    let grid = grid.unwrap_or_else(sinclp::bounds::default_grid);
    let s = py.detach(|| sinclp::verify_suite(&grid, &cfg));
    Ok(PyVerificationSummary {
        grid: s.grid,
        checks_run: s.checks_run,
        failures: s
            .failures
            .into_iter()
            .map(|f| (f.check, f.p, f.observed, f.required))
            .collect(),
        passed: s.passed,
    })
}

/// `beta^n(x)` by recursion.
#[pyfunction]
fn bspline_eval(n: usize, x: Fraction) -> Fraction {
    sinclp::bspline(n).eval(&x)
}

/// `beta^n(x)` by the truncated-power formula.
#[pyfunction]
fn closed_form_eval(n: usize, x: Fraction) -> Fraction {
    sinclp::closed_form_eval(n, &x)
}

#[pyfunction]
fn central(n: usize) -> Fraction {
    sinclp::central(n)
}

/// Exact `I(p)` for integer `p >= 1`.
#[pyfunction]
fn exact_lp_integer(p: usize) -> PyResult<Fraction> {
    if p == 0 {
        return Err(PyValueError::new_err("p must be at least 1"));
    }
    Ok(sinclp::exact_lp_integer(p))
}

#[pyfunction]
fn autocorrelation_check(n: usize) -> bool {
    sinclp::autocorrelation_check(n)
}

#[pyfunction]
fn gaussian_profile_deviation(n: usize, grid: Vec<f64>) -> f64 {
    sinclp::gaussian_profile_deviation(n, &grid)
}

#[pymodule]
fn sinclp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySincNorm>()?;
    m.add_class::<PyBoundReport>()?;
    m.add_class::<PyVerificationSummary>()?;
    m.add_class::<PyBSpline>()?;
    m.add_function(wrap_pyfunction!(sinc_lp_integral, m)?)?;
    m.add_function(wrap_pyfunction!(central_integral, m)?)?;
    m.add_function(wrap_pyfunction!(sinc_pow_integrand, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(choose_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(ball_bound, m)?)?;
    m.add_function(wrap_pyfunction!(c_of_p, m)?)?;
    m.add_function(wrap_pyfunction!(improved_bound, m)?)?;
    m.add_function(wrap_pyfunction!(p0, m)?)?;
    m.add_function(wrap_pyfunction!(solve_p0, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_check, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(bspline_eval, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_eval, m)?)?;
    m.add_function(wrap_pyfunction!(central, m)?)?;
    m.add_function(wrap_pyfunction!(exact_lp_integer, m)?)?;
    m.add_function(wrap_pyfunction!(autocorrelation_check, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_profile_deviation, m)?)?;
    Ok(())
}
