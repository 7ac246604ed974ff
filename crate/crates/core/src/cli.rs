//! The `sinclp` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification or cross-check fails,
//! 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{Map, Number, Value};

use crate::bounds::{
    bound_report, p0, p0_residual, sqrt_3_over_pi, verify_suite, BoundReport, VerificationSummary,
};
use crate::bspline::{bspline, closed_form_eval, exact_lp_integer, gaussian_profile_deviation};
use crate::piecewise::{to_f64, Rational};
use crate::quadrature::QuadratureConfig;
use crate::sinc_norm::{sinc_lp_integral, SincNormResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Header of every bound table, byte for byte.
pub const BOUNDS_CSV_HEADER: &str =
    "p,integral,total_error,ball_bound,c_p,improved_bound,margin_ball,margin_improved,asymptotic_ratio";

const INTEGRAL_FIELDS: [&str; 6] = [
    "p",
    "value",
    "quad_error",
    "tail_bound",
    "cutoff",
    "total_error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

/// `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    /// Ascending grid points `start + i step <= stop`, snapped to 12 decimals
    /// so that e.g. `1 + 0.1` is the double nearest to `1.1`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| {
                let x = self.start + i as f64 * self.step;
                let snapped = (x * 1e12).round() / 1e12;
                if (snapped - x).abs() <= 1e-9 * self.step {
                    snapped
                } else {
                    x
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got {s:?}"));
        }
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{x:?} is not a finite number"))
        };
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if !(step > 0.0) {
            return Err(format!("step must be positive, got {step}"));
        }
        if start < 1.0 {
            return Err(format!("start must be at least 1, got {start}"));
        }
        if stop < start {
            return Err(format!("stop {stop} is below start {start}"));
        }
        Ok(Self { start, stop, step })
    }
}

fn parse_p(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !p.is_finite() || p < 1.0 {
        return Err(format!("p must be a finite number >= 1, got {s}"));
    }
    Ok(p)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(format!("tolerance must be positive, got {s}"));
    }
    Ok(t)
}

fn parse_n_max(s: &str) -> Result<usize, String> {
    let n: usize = s
        .parse()
        .map_err(|_| format!("{s:?} is not a non-negative integer"))?;
    if n < 1 {
        return Err("n-max must be at least 1".into());
    }
    Ok(n)
}

/// Parses `a/b`, an integer, or a finite decimal such as `-0.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Ok(r) = Rational::from_str(s) {
        return Ok(r);
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body
        .split_once('.')
        .ok_or_else(|| format!("{s:?} is not a rational literal"))?;
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{s:?} is not a rational literal"));
    }
    let numer = BigInt::from_str(&digits).map_err(|e| e.to_string())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if negative { -r } else { r })
}

#[derive(Debug, Parser)]
#[command(
    name = "sinclp",
    version,
    about = "L_p norms of the sinc function, exact B-splines and Ball-type bounds"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub format: OutputFormat,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, default_value = "1e-12", value_parser = parse_tol, global = true)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// I(p) with its error budget.
    Integral {
        #[arg(long, value_parser = parse_p, allow_hyphen_values = true)]
        p: f64,
    },
    /// Ball's bound, C(p) and the improved bound at one p.
    Bounds {
        #[arg(long, value_parser = parse_p, allow_hyphen_values = true)]
        p: f64,
    },
    /// The branch point p0 of C(p).
    P0,
    /// Bound reports over a grid.
    Table {
        #[arg(long)]
        grid: GridSpec,
    },
    /// Exact value of the symmetric B-spline of degree n at x.
    Bspline {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        x: Rational,
    },
    /// Runs the full verification suite over a grid.
    Verify {
        #[arg(long, default_value = "1:100:0.5")]
        grid: GridSpec,
    },
    /// Exact asymptotic ratios at p = 2^k and Gaussian profile deviations.
    Asymptote {
        #[arg(long = "n-max", value_parser = parse_n_max)]
        n_max: usize,
    },
}

/// Formats `x` with `digits` significant digits, positional when the
/// exponent is moderate and scientific otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn real(x: f64) -> String {
    fmt_sig(x, 17)
}

fn short(x: f64) -> String {
    fmt_sig(x, 6)
}

fn json_real(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&real(x)).expect("valid JSON number"))
    } else {
        Value::Null
    }
}

fn rational_text(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn integral_values(r: &SincNormResult) -> [f64; 6] {
    [
        r.p,
        r.value,
        r.quad_error,
        r.tail_bound,
        r.cutoff,
        r.total_error,
    ]
}

fn report_values(r: &BoundReport) -> [f64; 9] {
    [
        r.p,
        r.integral.value,
        r.integral.total_error,
        r.ball_bound,
        r.c_p,
        r.improved_bound,
        r.margin_ball,
        r.margin_improved,
        r.asymptotic_ratio,
    ]
}

fn report_keys() -> Vec<&'static str> {
    BOUNDS_CSV_HEADER.split(',').collect()
}

fn json_object(keys: &[&str], values: &[f64]) -> Value {
    let mut m = Map::new();
    for (k, v) in keys.iter().zip(values) {
        m.insert((*k).to_string(), json_real(*v));
    }
    Value::Object(m)
}

fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| real(*v))
        .collect::<Vec<_>>()
        .join(",")
}

fn key_value_text(keys: &[&str], values: &[f64]) -> String {
    let width = keys.iter().map(|k| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in keys.iter().zip(values) {
        let _ = writeln!(s, "{k:<width$}  {}", short(*v));
    }
    s
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn config(tol: f64) -> QuadratureConfig {
    QuadratureConfig::with_tol(tol)
}

/// Output of one command: text for stdout, text for stderr, exit code.
struct Outcome {
    stdout: String,
    stderr: String,
    code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn error(message: String) -> Self {
        Self {
            stdout: String::new(),
            stderr: message,
            code: EXIT_FAILURE,
        }
    }
}

fn cmd_integral(p: f64, format: OutputFormat, tol: f64) -> Outcome {
    let r = match sinc_lp_integral(p, &config(tol)) {
        Ok(r) => r,
        Err(e) => return Outcome::error(format!("error: {e}\n")),
    };
    let values = integral_values(&r);
    Outcome::ok(match format {
        OutputFormat::Text => key_value_text(&INTEGRAL_FIELDS, &values),
        OutputFormat::Csv => format!("{}\n{}\n", INTEGRAL_FIELDS.join(","), csv_row(&values)),
        OutputFormat::Json => json_line(&json_object(&INTEGRAL_FIELDS, &values)),
    })
}

fn render_reports(reports: &[BoundReport], format: OutputFormat) -> String {
    let keys = report_keys();
    match format {
        OutputFormat::Csv => {
            let mut s = format!("{BOUNDS_CSV_HEADER}\n");
            for r in reports {
                s.push_str(&csv_row(&report_values(r)));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| json_object(&keys, &report_values(r)))
                .collect();
            json_line(&Value::Array(rows))
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{}",
                keys.iter().map(|k| format!("{k:>18}")).collect::<String>()
            );
            for r in reports {
                let _ = writeln!(
                    s,
                    "{}",
                    report_values(r)
                        .iter()
                        .map(|v| format!("{:>18}", short(*v)))
                        .collect::<String>()
                );
            }
            s
        }
    }
}

fn cmd_bounds(p: f64, format: OutputFormat, tol: f64) -> Outcome {
    let r = match bound_report(p, &config(tol)) {
        Ok(r) => r,
        Err(e) => return Outcome::error(format!("error: {e}\n")),
    };
    match format {
        OutputFormat::Text => Outcome::ok(key_value_text(&report_keys(), &report_values(&r))),
        OutputFormat::Json => {
            Outcome::ok(json_line(&json_object(&report_keys(), &report_values(&r))))
        }
        OutputFormat::Csv => Outcome::ok(render_reports(&[r], format)),
    }
}

fn cmd_p0(format: OutputFormat) -> Outcome {
    let root = p0();
    let residual = p0_residual(root);
    Outcome::ok(match format {
        OutputFormat::Text => format!(
            "p0        {}\nresidual  {}\n",
            fmt_sig(root, 12),
            short(residual)
        ),
        OutputFormat::Csv => format!("p0,residual\n{},{}\n", real(root), real(residual)),
        OutputFormat::Json => json_line(&json_object(&["p0", "residual"], &[root, residual])),
    })
}

fn cmd_table(grid: &GridSpec, format: OutputFormat, tol: f64) -> Outcome {
    let cfg = config(tol);
    let reports: Result<Vec<BoundReport>, _> = grid
        .points()
        .par_iter()
        .map(|&p| bound_report(p, &cfg))
        .collect();
    match reports {
        Ok(r) => Outcome::ok(render_reports(&r, format)),
        Err(e) => Outcome::error(format!("error: {e}\n")),
    }
}

fn cmd_bspline(n: usize, x: &Rational, format: OutputFormat) -> Outcome {
    let recursion = bspline(n).eval(x);
    let closed = closed_form_eval(n, x);
    if recursion != closed {
        return Outcome::error(format!(
            "error: recursion gives {} but the closed form gives {}\n",
            rational_text(&recursion),
            rational_text(&closed)
        ));
    }
    let decimal = to_f64(&recursion);
    Outcome::ok(match format {
        OutputFormat::Text => format!(
            "n        {n}\nx        {}\nvalue    {}\ndecimal  {}\n",
            rational_text(x),
            rational_text(&recursion),
            real(decimal)
        ),
        OutputFormat::Csv => format!(
            "n,x,value,decimal\n{n},{},{},{}\n",
            rational_text(x),
            rational_text(&recursion),
            real(decimal)
        ),
        OutputFormat::Json => {
            let mut m = Map::new();
            m.insert("n".into(), Value::from(n));
            m.insert("x".into(), Value::from(rational_text(x)));
            m.insert("value".into(), Value::from(rational_text(&recursion)));
            m.insert(
                "numerator".into(),
                Value::from(recursion.numer().to_string()),
            );
            m.insert(
                "denominator".into(),
                Value::from(recursion.denom().to_string()),
            );
            m.insert("decimal".into(), json_real(decimal));
            json_line(&Value::Object(m))
        }
    })
}

fn render_summary(s: &VerificationSummary, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let failures: Vec<Value> = s
                .failures
                .iter()
                .map(|f| {
                    let mut m = Map::new();
                    m.insert("check".into(), Value::from(f.check.clone()));
                    m.insert("p".into(), json_real(f.p));
                    m.insert("observed".into(), json_real(f.observed));
                    m.insert("required".into(), json_real(f.required));
                    Value::Object(m)
                })
                .collect();
            let mut m = Map::new();
            m.insert("passed".into(), Value::from(s.passed));
            m.insert("grid_points".into(), Value::from(s.grid.len()));
            m.insert("checks_run".into(), Value::from(s.checks_run));
            m.insert("failures".into(), Value::Array(failures));
            json_line(&Value::Object(m))
        }
        _ => {
            let mut out = String::new();
            for f in &s.failures {
                let _ = writeln!(
                    out,
                    "{} {} {} {}",
                    f.check,
                    real(f.p),
                    real(f.observed),
                    real(f.required)
                );
            }
            let _ = writeln!(
                out,
                "{} checks on {} grid points: {}",
                s.checks_run,
                s.grid.len(),
                if s.passed { "PASS" } else { "FAIL" }
            );
            out
        }
    }
}

fn cmd_verify(grid: &GridSpec, format: OutputFormat, tol: f64) -> Outcome {
    let summary = verify_suite(&grid.points(), &config(tol));
    Outcome {
        stdout: render_summary(&summary, format),
        stderr: String::new(),
        code: if summary.passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        },
    }
}

/// `{-3, -2.9, ..., 3}`.
pub fn gaussian_grid() -> Vec<f64> {
    (-30..=30).map(|k| k as f64 / 10.0).collect()
}

fn cmd_asymptote(n_max: usize, format: OutputFormat) -> Outcome {
    let mut ratios = Vec::new();
    let mut p = 1usize;
    while p <= n_max {
        let exact = exact_lp_integer(p);
        let value = to_f64(&exact);
        let asym = sqrt_3_over_pi() / (p as f64).sqrt();
        ratios.push((p, exact, value, asym, value / asym));
        p = match p.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    let profiles: Vec<(usize, f64)> = [10usize, 20, 40]
        .into_iter()
        .filter(|&n| n <= n_max)
        .map(|n| (n, gaussian_profile_deviation(n, &gaussian_grid())))
        .collect();

    let out = match format {
        OutputFormat::Text => {
            let mut s = format!(
                "{:>8}{:>16}{:>16}{:>16}\n",
                "p", "integral", "asymptote", "ratio"
            );
            for (p, _, v, a, r) in &ratios {
                let _ = writeln!(
                    s,
                    "{p:>8}{:>16}{:>16}{:>16}",
                    short(*v),
                    short(*a),
                    short(*r)
                );
            }
            if !profiles.is_empty() {
                let _ = writeln!(s, "\n{:>8}{:>16}", "n", "deviation");
                for (n, d) in &profiles {
                    let _ = writeln!(s, "{n:>8}{:>16}", short(*d));
                }
            }
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("p,exact,integral,asymptote,ratio\n");
            for (p, e, v, a, r) in &ratios {
                let _ = writeln!(
                    s,
                    "{p},{},{},{},{}",
                    rational_text(e),
                    real(*v),
                    real(*a),
                    real(*r)
                );
            }
            if !profiles.is_empty() {
                s.push_str("\nn,deviation\n");
                for (n, d) in &profiles {
                    let _ = writeln!(s, "{n},{}", real(*d));
                }
            }
            s
        }
        OutputFormat::Json => {
            let ratio_rows: Vec<Value> = ratios
                .iter()
                .map(|(p, e, v, a, r)| {
                    let mut m = Map::new();
                    m.insert("p".into(), Value::from(*p));
                    m.insert("exact".into(), Value::from(rational_text(e)));
                    m.insert("integral".into(), json_real(*v));
                    m.insert("asymptote".into(), json_real(*a));
                    m.insert("ratio".into(), json_real(*r));
                    Value::Object(m)
                })
                .collect();
            let profile_rows: Vec<Value> = profiles
                .iter()
                .map(|(n, d)| {
                    let mut m = Map::new();
                    m.insert("n".into(), Value::from(*n));
                    m.insert("deviation".into(), json_real(*d));
                    Value::Object(m)
                })
                .collect();
            let mut m = Map::new();
            m.insert("ratios".into(), Value::Array(ratio_rows));
            m.insert("gaussian_profile".into(), Value::Array(profile_rows));
            json_line(&Value::Object(m))
        }
    };
    Outcome::ok(out)
}

fn execute(cli: &Cli) -> Outcome {
    let (format, tol) = (cli.format, cli.tol);
    match &cli.command {
        Command::Integral { p } => cmd_integral(*p, format, tol),
        Command::Bounds { p } => cmd_bounds(*p, format, tol),
        Command::P0 => cmd_p0(format),
        Command::Table { grid } => cmd_table(grid, format, tol),
        Command::Bspline { n, x } => cmd_bspline(*n, x, format),
        Command::Verify { grid } => cmd_verify(grid, format, tol),
        Command::Asymptote { n_max } => cmd_asymptote(*n_max, format),
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let outcome = execute(&cli);
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    let _ = stderr.write_all(outcome.stderr.as_bytes());
    outcome.code
}
