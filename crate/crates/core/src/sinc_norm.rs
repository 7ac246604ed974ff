//! Evaluation of `I(p) = (1/pi) integral_R (sin^2 t / t^2)^p dt` for `p >= 1`.
//!
//! The integrand is even, so only `t >= 0` is integrated, lobe by lobe over
//! `[k pi, (k+1) pi]`. Lobes close to the origin use adaptive Gauss-Kronrod
//! panels. Far lobes, where `t^{-2p}` is nearly flat across the lobe, use a
//! Taylor expansion of `t^{-2p}` about the lobe centre against precomputed
//! moments of `cos^{2p}`. Beyond the cutoff `T` the discarded mass is bounded
//! analytically using `|sin t| <= 1`.
//!
//! When the crude tail bound would need more than `max_lobes` lobes, the
//! cutoff is capped and the mean value `c_p T^{1-2p} / (2p-1)` of the tail
//! (with `c_p` the period mean of `sin^{2p}`) is added to the value. The
//! remaining oscillatory part is bounded by one integration by parts:
//! `|integral_T^inf (sin^{2p} t - c_p) t^{-2p} dt| <= pi c_p (1 - c_p) T^{-2p}`.

use std::f64::consts::{FRAC_2_PI, PI};

use thiserror::Error;

use crate::quadrature::{integrate_partitioned, QuadratureConfig, QuadratureError};

/// Left edge of Ball's central interval, `6 / sqrt(5)`.
pub fn ball_cutoff() -> f64 {
    6.0 / 5f64.sqrt()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SincNormError {
    #[error("p = {p} is outside the supported domain (requires p >= {min})")]
    Domain { p: f64, min: f64 },
    #[error("tail integral diverges for p = {p} (requires p > 1/2)")]
    Divergent { p: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature on lobe {lobe} did not converge (error estimate {error_estimate:e})")]
    LobeNotConverged { lobe: u64, error_estimate: f64 },
    #[error("quadrature over the central interval did not converge (error estimate {0:e})")]
    CentralNotConverged(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SincNormResult {
    pub p: f64,
    /// Estimate of I(p).
    pub value: f64,
    pub quad_error: f64,
    /// Bound on the mass beyond the cutoff not accounted for in `value`.
    pub tail_bound: f64,
    pub cutoff: f64,
    /// `quad_error + tail_bound`.
    pub total_error: f64,
}

// ln(sin t / t) = sum_n A_n t^{2n}
#[allow(clippy::excessive_precision)]
const LN_SINC_SERIES: [f64; 11] = [
    -1.0 / 6.0,
    -1.0 / 180.0,
    -1.0 / 2835.0,
    -1.0 / 37800.0,
    -1.0 / 467775.0,
    -691.0 / 3831077250.0,
    -2.0 / 127702575.0,
    -3617.0 / 2605132530000.0,
    -43867.0 / 350813659321125.0,
    -174611.0 / 15313294652906250.0,
    -155366.0 / 147926426347074375.0,
];

fn ln_sinc_small(t: f64) -> f64 {
    let t2 = t * t;
    LN_SINC_SERIES.iter().rev().fold(0.0, |acc, a| acc * t2 + a) * t2
}

fn integrand(t: f64, p: f64) -> f64 {
    let t = t.abs();
    if t == 0.0 {
        return 1.0;
    }
    if t < 0.5 {
        return (2.0 * p * ln_sinc_small(t)).exp();
    }
    let s = t.sin().abs();
    if s == 0.0 {
        return 0.0;
    }
    (2.0 * p * (s.ln() - t.ln())).exp()
}

/// `|sin t / t|^{2p}`, equal to 1 at `t = 0`.
pub fn sinc_pow_integrand(t: f64, p: f64) -> Result<f64, SincNormError> {
    if !(p >= 0.5) || !p.is_finite() {
        return Err(SincNormError::Domain { p, min: 0.5 });
    }
    if !t.is_finite() {
        return Err(SincNormError::InvalidArgument(format!(
            "t = {t} is not finite"
        )));
    }
    Ok(integrand(t, p))
}

/// `(2/pi) integral_T^inf t^{-2p} dt = (2/pi) T^{1-2p} / (2p - 1)`.
pub fn tail_bound(p: f64, cutoff: f64) -> Result<f64, SincNormError> {
    if !(p > 0.5) {
        return Err(SincNormError::Divergent { p });
    }
    if !(cutoff > 0.0) {
        return Err(SincNormError::InvalidArgument(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    Ok(raw_tail(p, cutoff))
}

fn raw_tail(p: f64, cutoff: f64) -> f64 {
    let e = 2.0 * p - 1.0;
    // At Ball's cutoff, power the exact reciprocal sqrt(5)/6 rather than the
    // rounded 6/sqrt(5).
    let decay = if cutoff == ball_cutoff() {
        (5f64.sqrt() / 6.0).powf(e)
    } else {
        cutoff.powf(-e)
    };
    FRAC_2_PI * decay / e
}

/// Number of lobes `k` in the smallest admissible cutoff `k pi`.
fn cutoff_lobes(p: f64, tol: f64) -> f64 {
    let target = 0.5 * tol;
    let e = 2.0 * p - 1.0;
    // T^{2p-1} >= 4 / (pi (2p-1) tol)
    let t_min = ((4.0 / (PI * e * tol)).ln() / e).exp();
    let mut k = (t_min / PI).ceil().max(1.0);
    if !k.is_finite() {
        return f64::INFINITY;
    }
    while k > 1.0 && raw_tail(p, (k - 1.0) * PI) <= target {
        k -= 1.0;
    }
    while raw_tail(p, k * PI) > target {
        k += 1.0;
    }
    k
}

/// Smallest `T = k pi >= 6/sqrt(5)` with `tail_bound(p, T) <= tol / 2`.
pub fn choose_cutoff(p: f64, tol: f64) -> Result<f64, SincNormError> {
    if !(p > 0.5) {
        return Err(SincNormError::Divergent { p });
    }
    if !(tol > 0.0) {
        return Err(SincNormError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    // pi already exceeds 6/sqrt(5), so k = 1 is admissible.
    Ok(cutoff_lobes(p, tol) * PI)
}

/// Initial partition of `[0, b]` that resolves the peak of width `~1/sqrt(p)`.
fn peak_partition(p: f64, b: f64) -> Vec<f64> {
    let mut points = vec![0.0];
    let mut x = (1.0 / p.sqrt()).min(0.5 * b);
    while x < b {
        points.push(x);
        x *= 2.0;
    }
    points.push(b);
    points
}

/// Order of the far-lobe Taylor expansion.
const MOMENT_TERMS: usize = 12;

/// Even moments `m_j = integral_{-pi/2}^{pi/2} cos^{2p}(v) v^{2j} dv`, with
/// their quadrature error estimates.
struct CosMoments {
    values: Vec<f64>,
    errors: Vec<f64>,
}

impl CosMoments {
    fn compute(p: f64, cfg: &QuadratureConfig) -> Result<Self, SincNormError> {
        let local = QuadratureConfig {
            abs_tol: 1e-300,
            rel_tol: cfg.rel_tol.clamp(1e-15, 1e-13),
            max_subdivisions: cfg.max_subdivisions.max(500),
            ..cfg.clone()
        };
        let mut values = Vec::with_capacity(MOMENT_TERMS + 1);
        let mut errors = Vec::with_capacity(MOMENT_TERMS + 1);
        for j in 0..=MOMENT_TERMS {
            let power = 2 * j as i32;
            let r = integrate_partitioned(
                |v: f64| v.cos().max(0.0).powf(2.0 * p) * v.powi(power),
                &peak_partition(p, 0.5 * PI),
                &local,
            )?;
            if !r.converged {
                return Err(SincNormError::LobeNotConverged {
                    lobe: u64::MAX,
                    error_estimate: r.error_estimate,
                });
            }
            values.push(2.0 * r.value);
            errors.push(2.0 * r.error_estimate);
        }
        Ok(Self { values, errors })
    }

    /// Period mean of `sin^{2p}`.
    fn mean(&self) -> f64 {
        self.values[0] / PI
    }

    /// `integral_{k pi}^{(k+1) pi} (sin t / t)^{2p} dt` and its error estimate.
    fn lobe(&self, p: f64, k: f64) -> (f64, f64) {
        let c = (k + 0.5) * PI;
        let inv_c2 = 1.0 / (c * c);
        let mut coeff = (-2.0 * p * c.ln()).exp();
        let mut value = 0.0;
        let mut error = 0.0;
        for j in 0..MOMENT_TERMS {
            value += self.values[j] * coeff;
            error += self.errors[j] * coeff;
            let jj = (j + 1) as f64;
            coeff *= (2.0 * p + 2.0 * jj - 2.0) * (2.0 * p + 2.0 * jj - 1.0)
                / ((2.0 * jj - 1.0) * (2.0 * jj))
                * inv_c2;
        }
        error += self.values[MOMENT_TERMS] * coeff;
        (value, error)
    }
}

/// First lobe index whose Taylor expansion converges fast enough.
fn moment_threshold(p: f64) -> f64 {
    // (2p + 2J) / (2k + 1) <= 0.1
    ((10.0 * (2.0 * p + 2.0 * MOMENT_TERMS as f64) - 1.0) / 2.0).ceil()
}

/// Kahan-Babuska compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `I(p)` with a decomposed error budget.
pub fn sinc_lp_integral(p: f64, cfg: &QuadratureConfig) -> Result<SincNormResult, SincNormError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(SincNormError::Domain { p, min: 1.0 });
    }
    cfg.validate()?;

    let crude_lobes = cutoff_lobes(p, cfg.abs_tol);
    let max_lobes = cfg.max_lobes as f64;
    let capped = crude_lobes > max_lobes;
    let lobes = if capped { max_lobes } else { crude_lobes };
    let cutoff = lobes * PI;

    let threshold = moment_threshold(p).min(lobes);
    let adaptive_lobes = threshold as u64;
    let lobe_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol / adaptive_lobes.max(1) as f64,
        ..cfg.clone()
    };

    let mut value = CompensatedSum::default();
    let mut error = CompensatedSum::default();
    let f = |t: f64| integrand(t, p);

    let moments = if capped || threshold < lobes {
        Some(CosMoments::compute(p, cfg)?)
    } else {
        None
    };

    // Far lobes first so the compensated sum adds small terms first.
    if let Some(m) = &moments {
        let mut k = lobes - 1.0;
        while k >= threshold {
            let (v, e) = m.lobe(p, k);
            value.add(v);
            error.add(e);
            k -= 1.0;
        }
    }

    for lobe in (0..adaptive_lobes).rev() {
        let a = lobe as f64 * PI;
        let b = a + PI;
        let points = if lobe == 0 {
            peak_partition(p, PI)
        } else {
            vec![a, b]
        };
        let r = integrate_partitioned(f, &points, &lobe_cfg)?;
        if !r.converged {
            return Err(SincNormError::LobeNotConverged {
                lobe,
                error_estimate: r.error_estimate,
            });
        }
        value.add(r.value);
        error.add(r.error_estimate);
    }

    let (tail_estimate, tail) = match (&moments, capped) {
        (Some(m), true) => {
            let c = m.mean();
            let e = 2.0 * p - 1.0;
            let mean_tail = c * (-e * cutoff.ln()).exp() / e;
            error.add(m.errors[0] / PI * (-e * cutoff.ln()).exp() / e);
            let oscillation = PI * c * (1.0 - c) * (-2.0 * p * cutoff.ln()).exp();
            (mean_tail, FRAC_2_PI * oscillation)
        }
        _ => (0.0, raw_tail(p, cutoff)),
    };
    value.add(tail_estimate);

    let value = FRAC_2_PI * value.total();
    let quad_error = FRAC_2_PI * error.total();
    Ok(SincNormResult {
        p,
        value,
        quad_error,
        tail_bound: tail,
        cutoff,
        total_error: quad_error + tail,
    })
}

/// `(1/pi) integral_{-6/sqrt 5}^{6/sqrt 5} (sin^2 t / t^2)^p dt` with its
/// quadrature error estimate.
pub fn central_integral_with_error(
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), SincNormError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(SincNormError::Domain { p, min: 1.0 });
    }
    let r = integrate_partitioned(|t| integrand(t, p), &peak_partition(p, ball_cutoff()), cfg)?;
    if !r.converged {
        return Err(SincNormError::CentralNotConverged(r.error_estimate));
    }
    Ok((FRAC_2_PI * r.value, FRAC_2_PI * r.error_estimate))
}

pub fn central_integral(p: f64, cfg: &QuadratureConfig) -> Result<f64, SincNormError> {
    central_integral_with_error(p, cfg).map(|(v, _)| v)
}
