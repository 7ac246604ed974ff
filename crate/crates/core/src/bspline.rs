//! Symmetric B-splines in exact rational arithmetic.
//!
//! `beta^0` is the indicator of `[-1/2, 1/2)` and `beta^n = beta^{n-1} * beta^0`,
//! so `beta^n` is the `(n+1)`-fold self-convolution of the unit box: degree `n`,
//! support `[-(n+1)/2, (n+1)/2]`, integral one. Two independent routes are
//! provided: the convolution recursion ([`bspline`]) and the truncated-power
//! closed form ([`closed_form_eval`]).

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::piecewise::{from_f64, int, rat, to_f64, PiecewisePoly, Rational};

/// `beta^0`, the indicator of `[-1/2, 1/2)`.
pub fn make_box() -> PiecewisePoly {
    PiecewisePoly::default()
}

pub fn convolve_box(f: &PiecewisePoly) -> PiecewisePoly {
    f.convolve_box()
}

fn cache() -> &'static Mutex<Vec<Arc<PiecewisePoly>>> {
    static CACHE: OnceLock<Mutex<Vec<Arc<PiecewisePoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Arc::new(make_box())]))
}

/// `beta^n` built by `n` box convolutions, memoized by degree.
pub fn bspline(n: usize) -> Arc<PiecewisePoly> {
    let mut splines = cache().lock().unwrap_or_else(|e| e.into_inner());
    while splines.len() <= n {
        let next = splines[splines.len() - 1].convolve_box();
        splines.push(Arc::new(next));
    }
    Arc::clone(&splines[n])
}

pub fn eval(f: &PiecewisePoly, x: &Rational) -> Rational {
    f.eval(x)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(y)_+^n`, with `(y)_+^0 = 1` for `y >= 0` so that `beta^0` is
/// right-open at `1/2`.
fn truncated_power(y: &Rational, n: usize) -> Rational {
    if y.is_negative() || (n > 0 && y.is_zero()) {
        Rational::zero()
    } else {
        y.pow(n as i32)
    }
}

/// `beta^n(x) = (1/n!) sum_{k=0}^{n+1} (-1)^k C(n+1, k) (x + (n+1)/2 - k)_+^n`.
///
/// Independent of the recursion cache.
pub fn closed_form_eval(n: usize, x: &Rational) -> Rational {
    let shift = rat(n as i64 + 1, 2);
    let base = x + shift;
    let mut sum = Rational::zero();
    for k in 0..=n + 1 {
        let term = truncated_power(&(&base - int(k as i64)), n);
        if term.is_zero() {
            // Arguments decrease with k, so later terms vanish too.
            break;
        }
        let c = Rational::from_integer(binomial(BigInt::from(n + 1), BigInt::from(k)));
        if k % 2 == 0 {
            sum += c * term;
        } else {
            sum -= c * term;
        }
    }
    sum / Rational::from_integer(factorial(n))
}

/// `beta^n(0)` via the closed form, without building the piecewise object.
pub fn central(n: usize) -> Rational {
    closed_form_eval(n, &Rational::zero())
}

/// `(1/pi) integral (sin^2 t / t^2)^p dt` for integer `p >= 1`, which equals
/// `beta^{2p-1}(0)`.
pub fn exact_lp_integer(p: usize) -> Rational {
    assert!(p >= 1, "exact_lp_integer requires p >= 1");
    central(2 * p - 1)
}

/// Compares `integral beta^n(s)^2 ds` (exact piecewise square) with `beta^{2n+1}(0)`.
pub fn autocorrelation_check(n: usize) -> bool {
    bspline(n).integral_of_square() == central(2 * n + 1)
}

/// Both sides of the autocorrelation identity, for reporting.
pub fn autocorrelation_sides(n: usize) -> (Rational, Rational) {
    (bspline(n).integral_of_square(), central(2 * n + 1))
}

/// `sup_x |sqrt(pi (n+1)/6) beta^n(sigma_n x) - exp(-x^2/2)|` over `grid`,
/// with `sigma_n = sqrt((n+1)/12)`.
///
/// Spline arguments are the exact binary values of `sigma_n x`.
pub fn gaussian_profile_deviation(n: usize, grid: &[f64]) -> f64 {
    let spline = bspline(n);
    let m = (n + 1) as f64;
    let sigma = (m / 12.0).sqrt();
    let scale = (std::f64::consts::PI * m / 6.0).sqrt();
    grid.iter()
        .map(|&x| {
            let y = sigma * x;
            let spline_value = from_f64(y).map(|r| to_f64(&spline.eval(&r))).unwrap_or(0.0);
            (scale * spline_value - (-0.5 * x * x).exp()).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_basics() {
        let b = make_box();
        assert_eq!(eval(&b, &int(0)), int(1));
        assert_eq!(eval(&b, &int(1)), int(0));
        assert_eq!(b.integral(), int(1));
    }

    #[test]
    fn low_order_recursion_values() {
        let hat = convolve_box(&make_box());
        assert_eq!(hat.eval(&int(0)), int(1));
        assert_eq!(hat.eval(&rat(1, 2)), rat(1, 2));
        let quad = convolve_box(&hat);
        assert_eq!(quad.eval(&int(0)), rat(3, 4));
        assert_eq!(convolve_box(&quad).eval(&int(0)), rat(2, 3));
    }

    #[test]
    fn cubic_and_quintic() {
        let b3 = bspline(3);
        assert_eq!(b3.support(), (&int(-2), &int(2)));
        assert_eq!(b3.eval(&int(0)), rat(2, 3));
        assert_eq!(b3.eval(&int(1)), rat(1, 6));
        assert_eq!(b3.eval(&int(-1)), rat(1, 6));
        assert_eq!(bspline(5).eval(&int(0)), rat(11, 20));
        assert_eq!(bspline(2).eval(&int(2)), int(0));
        assert_eq!(bspline(1).eval(&rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_eval(1, &int(0)), int(1));
        assert_eq!(closed_form_eval(2, &rat(1, 2)), rat(1, 2));
        assert_eq!(closed_form_eval(4, &int(0)), rat(115, 192));
        assert_eq!(closed_form_eval(3, &int(7)), int(0));
        assert_eq!(closed_form_eval(3, &int(-7)), int(0));
    }

    #[test]
    fn closed_form_degree_zero_convention() {
        assert_eq!(closed_form_eval(0, &rat(-1, 2)), int(1));
        assert_eq!(closed_form_eval(0, &rat(1, 2)), int(0));
        assert_eq!(closed_form_eval(0, &int(0)), int(1));
    }

    #[test]
    fn central_values() {
        assert_eq!(central(1), int(1));
        assert_eq!(central(3), rat(2, 3));
        assert_eq!(central(5), rat(11, 20));
        assert_eq!(exact_lp_integer(1), int(1));
        assert_eq!(exact_lp_integer(2), rat(2, 3));
        assert_eq!(exact_lp_integer(3), rat(11, 20));
    }

    #[test]
    fn autocorrelation_small() {
        assert!(autocorrelation_check(0));
        assert!(autocorrelation_check(1));
        assert_eq!(bspline(1).integral_of_square(), rat(2, 3));
        assert!(autocorrelation_check(4));
    }

    #[test]
    fn gaussian_profile_at_origin() {
        let d = gaussian_profile_deviation(1, &[0.0]);
        assert!((d - ((std::f64::consts::PI / 3.0).sqrt() - 1.0)).abs() < 1e-15);
        assert!((d - 0.0233).abs() < 1e-4);
        assert!(gaussian_profile_deviation(40, &[0.0]) < gaussian_profile_deviation(10, &[0.0]));
        let far = 50.0;
        let d = gaussian_profile_deviation(3, &[far]);
        assert_eq!(d, (-0.5 * far * far).exp());
    }
}
