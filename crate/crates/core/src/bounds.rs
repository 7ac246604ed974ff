//! Ball's bound, the improved constant `C(p)` and a grid verification suite.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::bspline::exact_lp_integer;
use crate::piecewise::to_f64;
use crate::quadrature::QuadratureConfig;
use crate::sinc_norm::{
    ball_cutoff, central_integral_with_error, sinc_lp_integral, tail_bound, SincNormError,
    SincNormResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("p = {0} is outside the supported domain (requires p >= 1)")]
    Domain(f64),
    #[error(
        "p0 bracket [{lo}, {hi}] does not straddle the root (g - target = {f_lo:e}, {f_hi:e})"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("invalid tolerance {0}")]
    Tolerance(f64),
    #[error(transparent)]
    Integral(#[from] SincNormError),
}

fn check_domain(p: f64) -> Result<(), BoundsError> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::Domain(p))
    }
}

/// `sqrt(3 / pi)`, the limiting constant of `sqrt(p) I(p)`.
pub fn sqrt_3_over_pi() -> f64 {
    (3.0 / PI).sqrt()
}

/// `1 / sqrt(p)`.
pub fn ball_bound(p: f64) -> Result<f64, BoundsError> {
    check_domain(p)?;
    Ok(1.0 / p.sqrt())
}

/// `g(p) = (sqrt 5 / 6)^{2p-1} / (sqrt p - 1/(2 sqrt p))`, the left side of
/// the equation defining `p0`.
pub fn p0_lhs(p: f64) -> f64 {
    let r = 5f64.sqrt() / 6.0;
    let s = p.sqrt();
    r.powf(2.0 * p - 1.0) / (s - 0.5 / s)
}

/// `(1 - sqrt(3/pi)) pi`.
pub fn p0_rhs() -> f64 {
    (1.0 - sqrt_3_over_pi()) * PI
}

pub fn p0_residual(p: f64) -> f64 {
    p0_lhs(p) - p0_rhs()
}

/// Root of `g(p) = (1 - sqrt(3/pi)) pi` by bisection on `[1, 3]`.
///
/// Bisection continues past `tol` until the midpoint no longer moves, so the
/// residual is at rounding level; `tol` bounds the final bracket width.
pub fn solve_p0(tol: f64) -> Result<f64, BoundsError> {
    if !(tol > 0.0) {
        return Err(BoundsError::Tolerance(tol));
    }
    let (mut lo, mut hi) = (1.0f64, 3.0f64);
    let (f_lo, f_hi) = (p0_residual(lo), p0_residual(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(BoundsError::Bracket { lo, hi, f_lo, f_hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = p0_residual(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    debug_assert!(hi - lo <= tol.max(f64::EPSILON * hi));
    // Endpoint with the smaller residual.
    Ok(if p0_residual(lo).abs() <= p0_residual(hi).abs() {
        lo
    } else {
        hi
    })
}

/// `p0`, computed once to full precision.
pub fn p0() -> f64 {
    static P0: OnceLock<f64> = OnceLock::new();
    *P0.get_or_init(|| solve_p0(1e-12).expect("p0 bracket is valid"))
}

/// `1 + g(p) / sqrt(3 pi)`, the second branch of `C(p)`.
pub fn c_second_branch(p: f64) -> f64 {
    1.0 + p0_lhs(p) / (3.0 * PI).sqrt()
}

pub fn c_of_p(p: f64) -> Result<f64, BoundsError> {
    check_domain(p)?;
    if p <= p0() {
        Ok((PI / 3.0).sqrt())
    } else {
        Ok(c_second_branch(p))
    }
}

/// `C(p) sqrt(3/pi) / sqrt(p)`.
pub fn improved_bound(p: f64) -> Result<f64, BoundsError> {
    Ok(c_of_p(p)? * sqrt_3_over_pi() / p.sqrt())
}

fn sandwich_holds(r: &SincNormResult) -> bool {
    let floor = r.p.floor() as usize;
    let upper = to_f64(&exact_lp_integer(floor));
    let lower = to_f64(&exact_lp_integer(floor + 1));
    lower <= r.value + r.total_error && r.value - r.total_error <= upper
}

/// `I(floor p + 1) <= I(p) <= I(floor p)`, outer terms exact.
pub fn sandwich_check(p: f64, cfg: &QuadratureConfig) -> Result<bool, BoundsError> {
    check_domain(p)?;
    Ok(sandwich_holds(&sinc_lp_integral(p, cfg)?))
}

fn ratio_of(value: f64, p: f64) -> f64 {
    value * p.sqrt() / sqrt_3_over_pi()
}

/// `I(p) sqrt(p) / sqrt(3/pi)`; exact rational oracle at integer `p`.
pub fn asymptotic_ratio(p: f64, cfg: &QuadratureConfig) -> Result<f64, BoundsError> {
    check_domain(p)?;
    if p.fract() == 0.0 && p <= u32::MAX as f64 {
        let exact = to_f64(&exact_lp_integer(p as usize));
        return Ok(ratio_of(exact, p));
    }
    Ok(ratio_of(sinc_lp_integral(p, cfg)?.value, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub p: f64,
    pub integral: SincNormResult,
    pub ball_bound: f64,
    pub c_p: f64,
    pub improved_bound: f64,
    pub margin_ball: f64,
    pub margin_improved: f64,
    pub asymptotic_ratio: f64,
}

pub fn bound_report(p: f64, cfg: &QuadratureConfig) -> Result<BoundReport, BoundsError> {
    check_domain(p)?;
    let integral = sinc_lp_integral(p, cfg)?;
    let ball = ball_bound(p)?;
    let c_p = c_of_p(p)?;
    let improved = improved_bound(p)?;
    Ok(BoundReport {
        p,
        ball_bound: ball,
        c_p,
        improved_bound: improved,
        margin_ball: ball - integral.value,
        margin_improved: improved - integral.value,
        asymptotic_ratio: ratio_of(integral.value, p),
        integral,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub check: String,
    pub p: f64,
    pub observed: f64,
    pub required: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationSummary {
    pub grid: Vec<f64>,
    pub checks_run: usize,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// `{1, 1.1, ..., 10} ∪ {15, 20, ..., 100}`.
pub fn default_grid() -> Vec<f64> {
    (10..=100)
        .map(|k| k as f64 / 10.0)
        .chain((3..=20).map(|k| 5.0 * k as f64))
        .collect()
}

/// Slack for `C(p) sqrt(3/pi)/sqrt(p) <= 1/sqrt(p)`.
pub const IMPROVED_VS_BALL_SLACK: f64 = 1e-15;
/// Slack for the equality clause at `p = 1`.
pub const EQUALITY_SLACK: f64 = 1e-10;
/// Strict Ball margin is required from this `p` on.
pub const STRICT_BALL_FROM: f64 = 1.1;

struct Checker {
    run: usize,
    failures: Vec<Failure>,
}

impl Checker {
    /// Records a check that passes when `observed <= required`.
    fn le(&mut self, check: &str, p: f64, observed: f64, required: f64) {
        self.run += 1;
        if !(observed <= required) {
            self.fail(check, p, observed, required);
        }
    }

    fn lt(&mut self, check: &str, p: f64, observed: f64, required: f64) {
        self.run += 1;
        if !(observed < required) {
            self.fail(check, p, observed, required);
        }
    }

    fn fail(&mut self, check: &str, p: f64, observed: f64, required: f64) {
        self.failures.push(Failure {
            check: check.to_string(),
            p,
            observed,
            required,
        });
    }
}

struct PointData {
    p: f64,
    integral: SincNormResult,
    central: f64,
    central_error: f64,
}

fn evaluate_point(p: f64, cfg: &QuadratureConfig) -> Result<PointData, BoundsError> {
    check_domain(p)?;
    let integral = sinc_lp_integral(p, cfg)?;
    let (central, central_error) = central_integral_with_error(p, cfg)?;
    Ok(PointData {
        p,
        integral,
        central,
        central_error,
    })
}

fn check_point(c: &mut Checker, d: &PointData, cfg: &QuadratureConfig) {
    let p = d.p;
    let r = &d.integral;
    let lower = r.value - r.total_error;
    let ball = 1.0 / p.sqrt();
    let improved = improved_bound(p).unwrap_or(f64::NAN);
    let asym = sqrt_3_over_pi() / p.sqrt();

    c.le("ball", p, lower, ball);
    if p >= STRICT_BALL_FROM {
        c.lt("ball_strict", p, r.value + r.total_error, ball);
    }
    c.le("improved", p, lower, improved);
    c.le(
        "improved_vs_ball",
        p,
        improved,
        ball + IMPROVED_VS_BALL_SLACK,
    );
    c.le("central_estimate", p, d.central - d.central_error, asym);

    let ball_tail = tail_bound(p, ball_cutoff()).unwrap_or(f64::NAN);
    c.le(
        "decomposition",
        p,
        lower,
        d.central + d.central_error + ball_tail + cfg.abs_tol,
    );

    let reproduced = ball_tail * PI * (p - 0.5);
    let paper_form = (5f64.sqrt() / 6.0).powf(2.0 * p - 1.0);
    c.le(
        "tail_reproduction",
        p,
        (reproduced - paper_form).abs(),
        1e-15 * paper_form,
    );

    let second = c_second_branch(p);
    let first = (PI / 3.0).sqrt();
    if p <= p0() {
        c.le("c_branch", p, first, second + 1e-15);
    } else {
        c.le("c_branch", p, second, first + 1e-15);
    }

    if p == 1.0 {
        c.le("equality_p1", p, (r.value - 1.0).abs(), EQUALITY_SLACK);
        c.le(
            "equality_p1_improved",
            p,
            (improved - r.value).abs(),
            EQUALITY_SLACK,
        );
    }

    if p.fract() == 0.0 {
        let exact = to_f64(&exact_lp_integer(p as usize));
        c.le(
            "integer_exact",
            p,
            (r.value - exact).abs(),
            r.total_error + 1e-12,
        );
    }

    let floor = p.floor() as usize;
    let upper = to_f64(&exact_lp_integer(floor));
    let under = to_f64(&exact_lp_integer(floor + 1));
    c.le("sandwich_lower", p, under, r.value + r.total_error);
    c.le("sandwich_upper", p, lower, upper);
}

fn check_global(c: &mut Checker, cfg: &QuadratureConfig) {
    let root = p0();
    c.le("p0_residual", root, p0_residual(root).abs(), 1e-12);
    c.le(
        "p0_continuity",
        root,
        (c_second_branch(root) - (PI / 3.0).sqrt()).abs(),
        EQUALITY_SLACK,
    );
    let rounded = (root * 1e4).round() / 1e4;
    c.le("p0_four_decimals", root, (rounded - 1.8414).abs(), 1e-12);

    let mut previous = f64::INFINITY;
    for k in 1..=6 {
        let p = (1u32 << k) as f64;
        let dev = match asymptotic_ratio(p, cfg) {
            Ok(ratio) => (ratio - 1.0).abs(),
            Err(_) => f64::NAN,
        };
        c.lt("asymptotic_convergence", p, dev, previous);
        previous = dev;
    }
}

/// Runs every bound check on every grid point. Failures are returned as data.
pub fn verify_suite(grid: &[f64], cfg: &QuadratureConfig) -> VerificationSummary {
    let mut checker = Checker {
        run: 0,
        failures: Vec::new(),
    };
    if grid.is_empty() {
        checker.fail("empty_grid", f64::NAN, 0.0, 1.0);
    }

    let points: Vec<Result<PointData, BoundsError>> =
        grid.par_iter().map(|&p| evaluate_point(p, cfg)).collect();

    let mut evaluated: Vec<&PointData> = Vec::new();
    for (res, &p) in points.iter().zip(grid) {
        match res {
            Ok(d) => {
                check_point(&mut checker, d, cfg);
                evaluated.push(d);
            }
            Err(_) => {
                checker.run += 1;
                checker.fail("evaluation", p, f64::NAN, f64::NAN);
            }
        }
    }

    evaluated.sort_by(|a, b| a.p.total_cmp(&b.p));
    for w in evaluated.windows(2) {
        let (a, b) = (&w[0].integral, &w[1].integral);
        if a.p == b.p {
            continue;
        }
        c_monotone(&mut checker, a, b);
    }

    check_global(&mut checker, cfg);

    let passed = checker.failures.is_empty();
    VerificationSummary {
        grid: grid.to_vec(),
        checks_run: checker.run,
        failures: checker.failures,
        passed,
    }
}

fn c_monotone(c: &mut Checker, a: &SincNormResult, b: &SincNormResult) {
    c.lt(
        "monotone",
        b.p,
        b.value + b.total_error,
        a.value - a.total_error,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_values() {
        assert_eq!(ball_bound(1.0).unwrap(), 1.0);
        assert_eq!(ball_bound(4.0).unwrap(), 0.5);
        assert!((ball_bound(2.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 2e-16);
        assert_eq!(ball_bound(0.9), Err(BoundsError::Domain(0.9)));
    }

    #[test]
    fn c_of_p_branches() {
        assert!((c_of_p(1.0).unwrap() - 1.023_326_7).abs() < 1e-7);
        let root = p0();
        assert!((c_second_branch(root) - (PI / 3.0).sqrt()).abs() < 1e-10);
        let c3 = c_of_p(3.0).unwrap();
        let expected = 1.0
            + (5f64.sqrt() / 6.0).powi(5)
                / (3f64.sqrt() - 1.0 / (2.0 * 3f64.sqrt()))
                / (3.0 * PI).sqrt();
        assert!((c3 - expected).abs() < 1e-15);
        assert!((c3 - 1.001_624).abs() < 2e-6, "{c3}");
        assert!(c_of_p(0.0).is_err());
    }

    #[test]
    fn improved_bound_values() {
        assert!((improved_bound(1.0).unwrap() - 1.0).abs() < 1e-15);
        for &p in &[1.0, 1.3, 1.8] {
            assert!((improved_bound(p).unwrap() - 1.0 / p.sqrt()).abs() < 1e-15);
        }
        assert!((improved_bound(3.0).unwrap() - 0.5651).abs() < 1e-4);
    }

    #[test]
    fn p0_solution() {
        let root = solve_p0(1e-6).unwrap();
        assert_eq!((root * 1e4).round() / 1e4, 1.8414);
        assert!(p0_residual(root).abs() <= 1e-12);
        assert!((p0_rhs() - 0.0716).abs() < 1e-4);
        assert!(p0_lhs(1.0) > p0_rhs() && p0_rhs() > p0_lhs(3.0));
        assert!(solve_p0(0.0).is_err());
    }

    #[test]
    fn ratio_at_small_integers() {
        let cfg = QuadratureConfig::default();
        assert!((asymptotic_ratio(1.0, &cfg).unwrap() - 1.02333).abs() < 1e-5);
        assert!((asymptotic_ratio(2.0, &cfg).unwrap() - 0.96480).abs() < 1e-5);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 91 + 18);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[1], 1.1);
        assert_eq!(g[90], 10.0);
        assert_eq!(*g.last().unwrap(), 100.0);
    }

    #[test]
    fn report_at_one_and_two() {
        let cfg = QuadratureConfig::default();
        let r = bound_report(1.0, &cfg).unwrap();
        assert!(r.margin_ball.abs() < 1e-10);
        assert!(r.margin_improved.abs() < 1e-10);
        let r = bound_report(2.0, &cfg).unwrap();
        assert!(r.margin_improved > 0.0);
        assert!(r.margin_improved <= r.margin_ball);
        let r = bound_report(10.0, &cfg).unwrap();
        assert!(r.margin_ball > 0.0 && r.margin_improved > 0.0);
    }

    #[test]
    fn suite_on_single_point() {
        let s = verify_suite(&[1.0], &QuadratureConfig::default());
        assert!(s.passed, "{:?}", s.failures);
        assert!(s.checks_run > 10);
    }

    #[test]
    fn suite_with_p0_on_grid() {
        let s = verify_suite(&[1.5, p0(), 2.0], &QuadratureConfig::default());
        assert!(s.passed, "{:?}", s.failures);
    }

    #[test]
    fn empty_grid_fails() {
        let s = verify_suite(&[], &QuadratureConfig::default());
        assert!(!s.passed);
    }
}
