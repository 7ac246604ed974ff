//! Certified evaluation of `I(p) = (1/pi) integral (sin^2 t / t^2)^p dt`,
//! exact symmetric B-splines, and numerical verification of Ball's
//! inequality `I(p) <= 1/sqrt(p)` together with its sharpened form
//! `I(p) <= C(p) sqrt(3/pi) / sqrt(p)`.

// `!(a < b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bspline;
pub mod cli;
pub mod piecewise;
pub mod quadrature;
pub mod sinc_norm;

pub use bounds::{
    asymptotic_ratio, ball_bound, bound_report, c_of_p, improved_bound, p0, sandwich_check,
    solve_p0, verify_suite, BoundReport, BoundsError, VerificationSummary,
};
pub use bspline::{
    autocorrelation_check, bspline, central, closed_form_eval, convolve_box, exact_lp_integer,
    gaussian_profile_deviation, make_box,
};
pub use piecewise::{PiecewisePoly, Rational};
pub use quadrature::{integrate_adaptive, QuadratureConfig, QuadratureError, QuadratureResult};
pub use sinc_norm::{
    central_integral, choose_cutoff, sinc_lp_integral, sinc_pow_integrand, tail_bound,
    SincNormError, SincNormResult,
};
