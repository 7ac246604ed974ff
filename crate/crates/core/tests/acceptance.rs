//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p sinclp --test acceptance -- --nocapture` to see them.

// `!(a < b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::process::Command;

use sinclp::bounds::{default_grid, p0_residual, sqrt_3_over_pi};
use sinclp::piecewise::{rat, Rational};
use sinclp::sinc_norm::ball_cutoff;
use sinclp::{
    asymptotic_ratio, autocorrelation_check, bspline, central, central_integral, closed_form_eval,
    gaussian_profile_deviation, improved_bound, sandwich_check, sinc_lp_integral, solve_p0,
    tail_bound, QuadratureConfig, SincNormResult,
};

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!(
        "criterion {id:>2} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn grid_integrals() -> Vec<SincNormResult> {
    let cfg = QuadratureConfig::default();
    default_grid()
        .into_iter()
        .map(|p| sinc_lp_integral(p, &cfg).expect("integral evaluates"))
        .collect()
}

#[test]
fn criterion_01_equality_at_one() {
    let r = sinc_lp_integral(1.0, &QuadratureConfig::default()).unwrap();
    let dev = (r.value - 1.0).abs();
    report(
        1,
        "I(1) = 1",
        dev <= 1e-10,
        format!("|I(1) - 1| = {dev:e} (<= 1e-10)"),
    );
}

#[test]
fn criterion_02_ball_inequality() {
    let mut worst_margin = f64::INFINITY;
    let mut bad = Vec::new();
    for r in grid_integrals() {
        let ball = 1.0 / r.p.sqrt();
        if !(r.value - r.total_error <= ball) {
            bad.push(r.p);
        }
        if r.p >= 1.1 {
            let margin = ball - r.value;
            worst_margin = worst_margin.min(margin);
            if !(margin > 0.0) {
                bad.push(r.p);
            }
        }
    }
    report(
        2,
        "Ball's inequality on the grid",
        bad.is_empty(),
        format!("violations at {bad:?}; smallest margin for p >= 1.1: {worst_margin:e}"),
    );
}

#[test]
fn criterion_03_improved_bound() {
    let mut bad = Vec::new();
    for r in grid_integrals() {
        let improved = improved_bound(r.p).unwrap();
        let ball = 1.0 / r.p.sqrt();
        if !(r.value - r.total_error <= improved && improved <= ball + 1e-15) {
            bad.push(r.p);
        }
    }
    report(
        3,
        "I(p) <= C(p) sqrt(3/pi)/sqrt(p) <= 1/sqrt(p)",
        bad.is_empty(),
        format!("violations at {bad:?}"),
    );
}

#[test]
fn criterion_04_p0() {
    let root = solve_p0(1e-6).unwrap();
    let rounded = (root * 1e4).round() / 1e4;
    let residual = p0_residual(root).abs();
    report(
        4,
        "p0 = 1.8414",
        rounded == 1.8414 && residual <= 1e-12,
        format!("p0 = {root:.12}, residual = {residual:e}"),
    );
}

#[test]
fn criterion_05_plancherel() {
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 1..=15 {
        let r = sinc_lp_integral(n as f64, &cfg).unwrap();
        let exact = central(2 * n - 1);
        let diff = (r.value - sinclp::piecewise::to_f64(&exact)).abs();
        worst = worst.max(diff);
        ok &= diff <= r.total_error + 1e-12;
    }
    ok &= central(1) == rat(1, 1) && central(3) == rat(2, 3) && central(5) == rat(11, 20);
    report(
        5,
        "I(n) = beta^{2n-1}(0), n = 1..15",
        ok,
        format!("max |quadrature - exact| = {worst:e}"),
    );
}

fn sample_points(n: usize) -> Vec<Rational> {
    let half = n as i64 + 1;
    (0..25i64)
        .map(|i| {
            // Evenly spaced across the support, odd points nudged off the knots.
            let base = rat(half * (2 * i - 24), 48);
            if i % 2 == 1 {
                base + rat(1, 31)
            } else {
                base
            }
        })
        .collect()
}

#[test]
fn criterion_06_dual_spline_oracle() {
    let mut mismatches = Vec::new();
    for n in 0..=12 {
        let spline = bspline(n);
        for x in sample_points(n) {
            if spline.eval(&x) != closed_form_eval(n, &x) {
                mismatches.push((n, x.to_string()));
            }
        }
    }
    let auto: Vec<usize> = (0..=8).filter(|&n| !autocorrelation_check(n)).collect();
    report(
        6,
        "recursion = closed form (n <= 12), autocorrelation (n <= 8)",
        mismatches.is_empty() && auto.is_empty(),
        format!("value mismatches {mismatches:?}, autocorrelation failures {auto:?}"),
    );
}

#[test]
fn criterion_07_tail_estimate() {
    let mut worst = 0.0f64;
    for p in [1.0, 2.0, 5.0, 10.0] {
        let t = tail_bound(p, ball_cutoff()).unwrap();
        let paper_form = (5f64.sqrt() / 6.0).powf(2.0 * p - 1.0) / (p - 0.5) / PI;
        worst = worst.max((t - paper_form).abs() / paper_form);
    }
    report(
        7,
        "tail bound at 6/sqrt(5)",
        worst <= 1e-15,
        format!("max relative difference {worst:e}"),
    );
}

#[test]
fn criterion_08_central_estimate() {
    let cfg = QuadratureConfig::default();
    let bad: Vec<f64> = default_grid()
        .into_iter()
        .filter(|&p| central_integral(p, &cfg).unwrap() > sqrt_3_over_pi() / p.sqrt())
        .collect();
    report(
        8,
        "central integral <= sqrt(3/pi)/sqrt(p)",
        bad.is_empty(),
        format!("violations at {bad:?}"),
    );
}

/// |sqrt(500) beta^999(0) / sqrt(3/pi) - 1| from an independent exact
/// evaluation: 1.500116e-4.
const RATIO_500_TOLERANCE: f64 = 1.65e-4;

#[test]
fn criterion_09_asymptotic_limit() {
    let cfg = QuadratureConfig::default();
    let devs: Vec<f64> = (1..=6)
        .map(|k| (asymptotic_ratio((1u32 << k) as f64, &cfg).unwrap() - 1.0).abs())
        .collect();
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let d500 = (asymptotic_ratio(500.0, &cfg).unwrap() - 1.0).abs();
    report(
        9,
        "sqrt(p) I(p) / sqrt(3/pi) -> 1",
        decreasing && d500 <= RATIO_500_TOLERANCE,
        format!("deviations at 2^k: {devs:?}; at 500: {d500:e} (<= {RATIO_500_TOLERANCE:e})"),
    );
}

#[test]
fn criterion_10_monotonicity() {
    let rs = grid_integrals();
    let bad: Vec<f64> = rs
        .windows(2)
        .filter(|w| !(w[1].value + w[1].total_error < w[0].value - w[0].total_error))
        .map(|w| w[1].p)
        .collect();
    let cfg = QuadratureConfig::default();
    let sandwich = [1.3, 2.5, 7.7].map(|p| sandwich_check(p, &cfg).unwrap());
    report(
        10,
        "I decreasing, sandwich at 1.3, 2.5, 7.7",
        bad.is_empty() && sandwich.iter().all(|&s| s),
        format!("non-decreasing at {bad:?}; sandwich {sandwich:?}"),
    );
}

#[test]
fn criterion_11_gaussian_profile() {
    let grid: Vec<f64> = (-30..=30).map(|k| k as f64 / 10.0).collect();
    let devs = [10, 20, 40].map(|n| gaussian_profile_deviation(n, &grid));
    report(
        11,
        "Gaussian profile deviation decreasing in n",
        devs[1] < devs[0] && devs[2] < devs[1],
        format!("n = 10, 20, 40: {devs:?}"),
    );
}

fn sinclp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sinclp"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_12_cli_contract() {
    let verify = sinclp(&["verify", "--grid", "1:100:0.5"]);
    let verify_ok = verify.status.code() == Some(0);

    let table = sinclp(&["table", "--grid", "1:2:0.5", "--format", "csv"]);
    let stdout = String::from_utf8_lossy(&table.stdout).to_string();
    let header_ok = stdout.lines().next()
        == Some("p,integral,total_error,ball_bound,c_p,improved_bound,margin_ball,margin_improved,asymptotic_ratio");

    let again = sinclp(&["table", "--grid", "1:2:0.5", "--format", "csv"]);
    let identical = again.stdout == table.stdout
        && sinclp(&["verify", "--grid", "1:100:0.5"]).stdout == verify.stdout;

    report(
        12,
        "CLI contract",
        verify_ok && header_ok && identical,
        format!(
            "verify exit {:?}, header ok {header_ok}, byte-identical {identical}",
            verify.status.code()
        ),
    );
}
