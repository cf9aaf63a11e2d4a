//! Parametric payoff functions `u(s)`: a node's value for receiving split `s`
//! on one particular edge.
//!
//! Every kind is strictly increasing and continuous on all of ℝ with
//! `u(0) = 0`. Kinds whose natural domain is `s >= 0` are extended to
//! negative splits: `log1p` by a linear tail with its slope at zero, `power`
//! by odd reflection `u(-s) = -u(s)` (its slope at zero is 0 or ∞ unless the
//! exponent is 1). Piecewise-linear functions already cover ℝ through their
//! outermost slopes.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Doublings allowed while bracketing a target value.
const BRACKET_EXPANSIONS: usize = 128;
/// Bisection step limit.
pub const BISECTION_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum PayoffFn<T> {
    /// `u(s) = a*s + b`; valid only with `a > 0` and `b = 0`.
    Linear { a: T, b: T },
    /// `u(s) = scale * s^exponent` for `s >= 0`, reflected for `s < 0`.
    Power { exponent: T, scale: T },
    /// `u(s) = scale * ln(1 + s)` for `s >= 0`, `scale * s` below zero.
    Log1p { scale: T },
    PiecewiseLinear(PiecewiseLinear<T>),
}

/// Continuous piecewise-linear function anchored at `u(0) = 0`.
///
/// `slopes[0]` applies left of `breakpoints[0]`, `slopes[k]` between
/// `breakpoints[k-1]` and `breakpoints[k]`, and the last slope right of the
/// last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<T> {
    breakpoints: Vec<T>,
    slopes: Vec<T>,
    /// `u` evaluated at each breakpoint.
    knot_values: Vec<T>,
}

impl<T: Scalar> PiecewiseLinear<T> {
    pub fn new(breakpoints: Vec<T>, slopes: Vec<T>) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::Parse(format!(
                "piecewise_linear needs {} slopes for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                slopes.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parse(
                "piecewise_linear breakpoints must be strictly increasing".into(),
            ));
        }
        let mut f = PiecewiseLinear {
            breakpoints,
            slopes,
            knot_values: Vec::new(),
        };
        f.knot_values = f.breakpoints.iter().map(|&b| f.integrate_from_zero(b)).collect();
        Ok(f)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    /// Signed integral of the slope function over `[0, s]`.
    fn integrate_from_zero(&self, s: T) -> T {
        let (lo, hi, sign) = if s >= T::zero() {
            (T::zero(), s, T::one())
        } else {
            (s, T::zero(), -T::one())
        };
        let mut total = T::zero();
        for (k, &slope) in self.slopes.iter().enumerate() {
            let seg_lo = if k == 0 {
                T::neg_infinity()
            } else {
                self.breakpoints[k - 1]
            };
            let seg_hi = if k == self.breakpoints.len() {
                T::infinity()
            } else {
                self.breakpoints[k]
            };
            let a = if seg_lo > lo { seg_lo } else { lo };
            let b = if seg_hi < hi { seg_hi } else { hi };
            if b > a {
                total = total + slope * (b - a);
            }
        }
        sign * total
    }

    fn eval(&self, s: T) -> T {
        self.integrate_from_zero(s)
    }

    fn invert(&self, v: T) -> T {
        let n = self.breakpoints.len();
        if n == 0 {
            return v / self.slopes[0];
        }
        // Segment k is bounded by knots k-1 and k.
        let k = self.knot_values.iter().take_while(|&&kv| kv <= v).count();
        if k == 0 {
            self.breakpoints[0] + (v - self.knot_values[0]) / self.slopes[0]
        } else {
            self.breakpoints[k - 1] + (v - self.knot_values[k - 1]) / self.slopes[k]
        }
    }
}

impl<T: Scalar> PayoffFn<T> {
    pub fn identity() -> Self {
        PayoffFn::Linear {
            a: T::one(),
            b: T::zero(),
        }
    }

    pub fn linear(a: T) -> Self {
        PayoffFn::Linear { a, b: T::zero() }
    }

    pub fn power(exponent: T, scale: T) -> Self {
        PayoffFn::Power { exponent, scale }
    }

    pub fn log1p(scale: T) -> Self {
        PayoffFn::Log1p { scale }
    }

    pub fn piecewise(breakpoints: Vec<T>, slopes: Vec<T>) -> Result<Self> {
        PiecewiseLinear::new(breakpoints, slopes).map(PayoffFn::PiecewiseLinear)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PayoffFn::Linear { .. } => "linear",
            PayoffFn::Power { .. } => "power",
            PayoffFn::Log1p { .. } => "log1p",
            PayoffFn::PiecewiseLinear(_) => "piecewise_linear",
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, PayoffFn::Linear { a, b } if *a == T::one() && *b == T::zero())
    }

    /// Payoff `u(s)` for split `s`.
    pub fn eval(&self, s: T) -> T {
        match self {
            PayoffFn::Linear { a, b } => *a * s + *b,
            PayoffFn::Power { exponent, scale } => {
                if s >= T::zero() {
                    *scale * s.powf(*exponent)
                } else {
                    -*scale * (-s).powf(*exponent)
                }
            }
            PayoffFn::Log1p { scale } => {
                if s >= T::zero() {
                    *scale * s.ln_1p()
                } else {
                    *scale * s
                }
            }
            PayoffFn::PiecewiseLinear(p) => p.eval(s),
        }
    }

    /// Split `s` with `u(s) = v`. Closed form for every built-in kind; falls
    /// back to bisection if the closed form is not finite.
    pub fn invert(&self, v: T) -> Result<T> {
        let s = self.invert_closed_form(v);
        if s.is_finite() {
            Ok(s)
        } else {
            self.invert_by_bisection(v, T::lit(T::EPS_INV), BISECTION_MAX_ITERS)
        }
    }

    fn invert_closed_form(&self, v: T) -> T {
        match self {
            PayoffFn::Linear { a, b } => (v - *b) / *a,
            PayoffFn::Power { exponent, scale } => {
                let inv = T::one() / *exponent;
                if v >= T::zero() {
                    (v / *scale).powf(inv)
                } else {
                    -(-v / *scale).powf(inv)
                }
            }
            PayoffFn::Log1p { scale } => {
                if v >= T::zero() {
                    (v / *scale).exp_m1()
                } else {
                    v / *scale
                }
            }
            PayoffFn::PiecewiseLinear(p) => p.invert(v),
        }
    }

    /// Bracketed bisection: the bracket starts at `[-1, 1]` and doubles until
    /// it contains `v`, then halves until `|u(s) - v| <= tol` or the bracket
    /// collapses to machine resolution.
    pub fn invert_by_bisection(&self, v: T, tol: T, max_iters: usize) -> Result<T> {
        let fail = || Error::NonConvergence { value: v.as_f64() };
        if !v.is_finite() {
            return Err(fail());
        }
        let two = T::lit(2.0);
        let mut lo = -T::one();
        let mut hi = T::one();
        let mut expansions = 0;
        while self.eval(lo) > v {
            lo = lo * two;
            expansions += 1;
            if expansions > BRACKET_EXPANSIONS || !lo.is_finite() {
                return Err(fail());
            }
        }
        while self.eval(hi) < v {
            hi = hi * two;
            expansions += 1;
            if expansions > BRACKET_EXPANSIONS || !hi.is_finite() {
                return Err(fail());
            }
        }
        for _ in 0..max_iters {
            let mid = lo + (hi - lo) / two;
            let fm = self.eval(mid);
            if (fm - v).abs() <= tol {
                return Ok(mid);
            }
            let resolution = T::epsilon() * T::lit(4.0) * T::one().max(mid.abs());
            if hi - lo <= resolution {
                return Ok(mid);
            }
            if fm < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(fail())
    }

    /// Parameter problems, as human-readable messages. Empty means the
    /// parameters describe a strictly increasing, normalized function.
    pub fn parameter_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let finite = |x: T| x.is_finite();
        match self {
            PayoffFn::Linear { a, b } => {
                if !finite(*a) || !finite(*b) {
                    issues.push("non-finite parameter".into());
                } else {
                    if *a <= T::zero() {
                        issues.push("not strictly increasing (linear slope <= 0)".into());
                    }
                    if *b != T::zero() {
                        issues.push("not normalized (u(0) != 0)".into());
                    }
                }
            }
            PayoffFn::Power { exponent, scale } => {
                if !finite(*exponent) || !finite(*scale) {
                    issues.push("non-finite parameter".into());
                } else if *exponent <= T::zero() || *scale <= T::zero() {
                    issues.push("not strictly increasing (power exponent and scale must be > 0)".into());
                }
            }
            PayoffFn::Log1p { scale } => {
                if !finite(*scale) {
                    issues.push("non-finite parameter".into());
                } else if *scale <= T::zero() {
                    issues.push("not strictly increasing (log1p scale <= 0)".into());
                }
            }
            PayoffFn::PiecewiseLinear(p) => {
                if p.breakpoints.iter().chain(p.slopes.iter()).any(|x| !x.is_finite()) {
                    issues.push("non-finite parameter".into());
                } else if p.slopes.iter().any(|&k| k <= T::zero()) {
                    issues.push("not strictly increasing (piecewise slope <= 0)".into());
                }
            }
        }
        issues
    }

    /// Converts the parameters to another scalar type.
    pub fn cast<U: Scalar>(&self) -> PayoffFn<U> {
        let c = |x: T| U::lit(x.as_f64());
        match self {
            PayoffFn::Linear { a, b } => PayoffFn::Linear { a: c(*a), b: c(*b) },
            PayoffFn::Power { exponent, scale } => PayoffFn::Power {
                exponent: c(*exponent),
                scale: c(*scale),
            },
            PayoffFn::Log1p { scale } => PayoffFn::Log1p { scale: c(*scale) },
            PayoffFn::PiecewiseLinear(p) => PayoffFn::PiecewiseLinear(
                PiecewiseLinear::new(
                    p.breakpoints.iter().map(|&x| c(x)).collect(),
                    p.slopes.iter().map(|&x| c(x)).collect(),
                )
                .expect("cast preserves piecewise shape"),
            ),
        }
    }
}
