//! Compactly supported piecewise polynomials with exact rational data.
//!
//! Each piece is stored in the shifted monomial basis about the left end of
//! its interval: on `[x_i, x_{i+1})` the value is `sum_j c_j (x - x_i)^j`.
//! Outside `[x_0, x_m)` the function is zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational scalar. Always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Converts an exact rational to the nearest `f64`.
pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        if x.is_zero() {
            0.0
        } else if (x.numer() < &BigInt::zero()) == (x.denom() < &BigInt::zero()) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Exact rational equal to the binary value of `x`.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Evaluates `sum_j c_j s^j` by Horner's rule.
pub fn horner(coeffs: &[Rational], s: &Rational) -> Rational {
    coeffs
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * s + c)
}

/// Coefficients of `q(s) = p(s + delta)` for `p` given by `coeffs`.
pub fn taylor_shift(coeffs: &[Rational], delta: &Rational) -> Vec<Rational> {
    let mut out = coeffs.to_vec();
    if delta.is_zero() {
        return out;
    }
    let n = out.len();
    // Repeated synthetic division by (s - delta).
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &out[j + 1] * delta;
            out[j] += t;
        }
    }
    out
}

pub fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Antiderivative vanishing at `s = 0`.
pub fn poly_integral(coeffs: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(Rational::zero());
    for (j, c) in coeffs.iter().enumerate() {
        out.push(c / int(j as i64 + 1));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
    degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PiecewiseError {
    #[error("expected {expected} pieces for {knots} breakpoints, got {got}")]
    PieceCount {
        knots: usize,
        expected: usize,
        got: usize,
    },
    #[error("breakpoints must be strictly increasing")]
    NotIncreasing,
    #[error("piece {0} has more coefficients than degree + 1")]
    DegreeExceeded(usize),
}

impl PiecewisePoly {
    pub fn new(
        breakpoints: Vec<Rational>,
        mut pieces: Vec<Vec<Rational>>,
        degree: usize,
    ) -> Result<Self, PiecewiseError> {
        if breakpoints.len() < 2 || pieces.len() != breakpoints.len() - 1 {
            return Err(PiecewiseError::PieceCount {
                knots: breakpoints.len(),
                expected: breakpoints.len().saturating_sub(1),
                got: pieces.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PiecewiseError::NotIncreasing);
        }
        for (i, p) in pieces.iter_mut().enumerate() {
            if p.len() > degree + 1 {
                return Err(PiecewiseError::DegreeExceeded(i));
            }
            p.resize(degree + 1, Rational::zero());
        }
        Ok(Self {
            breakpoints,
            pieces,
            degree,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        (
            &self.breakpoints[0],
            &self.breakpoints[self.breakpoints.len() - 1],
        )
    }

    /// Index of the piece containing `x` (half-open intervals), if any.
    fn locate(&self, x: &Rational) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return None;
        }
        // Last breakpoint <= x.
        let idx = self.breakpoints.partition_point(|b| b <= x);
        Some(idx - 1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self.locate(x) {
            Some(i) => horner(&self.pieces[i], &(x - &self.breakpoints[i])),
            None => Rational::zero(),
        }
    }

    /// Exact integral over the whole real line.
    pub fn integral(&self) -> Rational {
        self.piece_integrals().into_iter().sum()
    }

    fn piece_integrals(&self) -> Vec<Rational> {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(c, w)| horner(&poly_integral(c), &(&w[1] - &w[0])))
            .collect()
    }

    /// Exact antiderivative `F(x) = integral_{-inf}^x f`, returned as the
    /// per-piece coefficients plus the constant value beyond the support.
    fn antiderivative(&self) -> (Vec<Vec<Rational>>, Rational) {
        let mut running = Rational::zero();
        let mut out = Vec::with_capacity(self.pieces.len());
        for (c, w) in self.pieces.iter().zip(self.breakpoints.windows(2)) {
            let mut anti = poly_integral(c);
            anti[0] = running.clone();
            running = horner(&anti, &(&w[1] - &w[0]));
            out.push(anti);
        }
        (out, running)
    }

    /// Polynomial (in `s = x - left`) representing `F(x + offset)` on an
    /// interval `[left, ...)` lying inside a single piece of `F`, or outside
    /// the support.
    fn shifted_antiderivative(
        &self,
        anti: &[Vec<Rational>],
        total: &Rational,
        left: &Rational,
        offset: &Rational,
    ) -> Vec<Rational> {
        let y = left + offset;
        let (lo, hi) = self.support();
        if &y < lo {
            return vec![Rational::zero()];
        }
        if &y >= hi {
            return vec![total.clone()];
        }
        let i = self.locate(&y).expect("inside support");
        taylor_shift(&anti[i], &(&y - &self.breakpoints[i]))
    }

    /// `x -> integral_{x-1/2}^{x+1/2} f(t) dt`, exactly.
    pub fn convolve_box(&self) -> PiecewisePoly {
        let half = rat(1, 2);
        let (anti, total) = self.antiderivative();

        let mut knots: Vec<Rational> = self
            .breakpoints
            .iter()
            .flat_map(|b| [b - &half, b + &half])
            .collect();
        knots.sort();
        knots.dedup();

        let degree = self.degree + 1;
        let pieces = knots
            .windows(2)
            .map(|w| {
                let upper = self.shifted_antiderivative(&anti, &total, &w[0], &half);
                let lower = self.shifted_antiderivative(&anti, &total, &w[0], &-&half);
                let mut c = vec![Rational::zero(); degree + 1];
                for (j, u) in upper.into_iter().enumerate() {
                    c[j] += u;
                }
                for (j, l) in lower.into_iter().enumerate() {
                    c[j] -= l;
                }
                c
            })
            .collect();
        PiecewisePoly::new(knots, pieces, degree).expect("knots are strictly increasing")
    }

    /// Exact `integral f(x)^2 dx`.
    pub fn integral_of_square(&self) -> Rational {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(c, w)| horner(&poly_integral(&poly_mul(c, c)), &(&w[1] - &w[0])))
            .sum()
    }

    /// Checks that derivatives `0..order` of adjacent pieces agree at every
    /// interior knot, and that the function is continuous at its support ends
    /// if `order > 0`.
    pub fn is_smooth_to_order(&self, order: usize) -> bool {
        let zero_piece = vec![Rational::zero(); self.degree + 1];
        let m = self.pieces.len();
        // Right-end Taylor data of piece i, and left-end data of piece i + 1.
        for k in 0..=m {
            let left_data = if k == 0 {
                zero_piece.clone()
            } else {
                let w = &self.breakpoints[k] - &self.breakpoints[k - 1];
                taylor_shift(&self.pieces[k - 1], &w)
            };
            let right_data = if k == m { &zero_piece } else { &self.pieces[k] };
            if left_data
                .iter()
                .zip(right_data)
                .take(order)
                .any(|(a, b)| a != b)
            {
                return false;
            }
        }
        true
    }
}

impl Default for PiecewisePoly {
    fn default() -> Self {
        Self::new(vec![rat(-1, 2), rat(1, 2)], vec![vec![Rational::one()]], 0).expect("valid box")
    }
}
