//! Sensitivity law, admissible parameter ranges and the exponent calculus
//! behind the `L^r` decay estimate near `t = 0`.

mod exponents;

use serde::Serialize;
use thiserror::Error;

pub use exponents::{
    decay_plan, select_exponents, sobolev_conjugate, verify_exponent_properties, DecayPlan, ExponentChecks,
    ExponentSelection,
};

/// Margin `eta` in `alpha_eff = min(alpha, 1/2 - eta)`.
pub const ALPHA_CLAMP_MARGIN: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("space dimension must be at least 1, got {0}")]
    Dimension(usize),
    #[error("sensitivity needs k_f > 0 and alpha > 0, got k_f={k_f}, alpha={alpha}")]
    Sensitivity { k_f: f64, alpha: f64 },
    #[error("sensitivity argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("alpha = {alpha} must exceed the threshold {threshold} for n = {n}")]
    BelowThreshold { n: usize, alpha: f64, threshold: f64 },
    #[error("q = {q} outside the admissible interval {interval}")]
    QOutOfRange { q: f64, interval: Interval },
    #[error("r = {r} outside the admissible interval {interval}")]
    ROutOfRange { r: String, interval: Interval },
    #[error("{what} interval {interval} is empty")]
    EmptyInterval { what: &'static str, interval: Interval },
    #[error("exponent construction violated {0}")]
    Inconsistent(String),
}

/// Chemotactic sensitivity `f(xi) = k_f (1 + xi)^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    k_f: f64,
    alpha: f64,
}

impl Sensitivity {
    pub fn new(k_f: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(k_f > 0.0 && k_f.is_finite() && alpha > 0.0 && alpha.is_finite()) {
            return Err(ModelError::Sensitivity { k_f, alpha });
        }
        Ok(Self { k_f, alpha })
    }

    /// `k_f = 0`: chemotaxis switched off, used for pure-diffusion control runs.
    pub fn control(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ModelError::Sensitivity { k_f: 0.0, alpha });
        }
        Ok(Self { k_f: 0.0, alpha })
    }

    pub fn k_f(&self) -> f64 {
        self.k_f
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, xi: f64) -> Result<f64, ModelError> {
        if !(xi >= 0.0) {
            return Err(ModelError::NegativeArgument(xi));
        }
        Ok(self.eval_unchecked(xi))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, xi: f64) -> f64 {
        self.k_f * (1.0 + xi).powf(-self.alpha)
    }
}

/// `f(xi)` for the given sensitivity.
pub fn f_eval(sens: &Sensitivity, xi: f64) -> Result<f64, ModelError> {
    sens.eval(xi)
}

/// Lower bound on `alpha` for global solvability: `0` for `n <= 2`,
/// `(n - 2) / (2 (n - 1))` otherwise.
pub fn alpha_threshold(n: usize) -> Result<f64, ModelError> {
    match n {
        0 => Err(ModelError::Dimension(0)),
        1 => Ok(0.0),
        _ => Ok((n as f64 - 2.0) / (2.0 * (n as f64 - 1.0))),
    }
}

/// `min(alpha, 1/2 - eta)`.
pub fn alpha_clamp(alpha: f64) -> f64 {
    alpha.min(0.5 - ALPHA_CLAMP_MARGIN)
}

/// An interval `(lower, upper)` or `(lower, upper]`; `upper` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub upper_closed: bool,
}

impl Interval {
    pub fn open(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            upper_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && (x < self.upper || (self.upper_closed && x == self.upper))
    }

    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let up = if self.upper.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", self.upper)
        };
        write!(f, "({}, {}{}", self.lower, up, if self.upper_closed { "]" } else { ")" })
    }
}

fn check_alpha(n: usize, alpha: f64) -> Result<(), ModelError> {
    let threshold = alpha_threshold(n)?;
    if !(alpha > threshold && alpha.is_finite()) {
        return Err(ModelError::BelowThreshold { n, alpha, threshold });
    }
    Ok(())
}

/// Admissible range for the `W^{1,q}` exponent of the initial signal:
/// `(max{1, (1 - 2 alpha) n}, inf)` for `n = 1`, with upper end `n / (n - 1)`
/// for `n >= 2`.
pub fn admissible_q_interval(n: usize, alpha: f64) -> Result<Interval, ModelError> {
    check_alpha(n, alpha)?;
    let lower = 1f64.max((1.0 - 2.0 * alpha) * n as f64);
    let upper = if n == 1 {
        f64::INFINITY
    } else {
        n as f64 / (n as f64 - 1.0)
    };
    let interval = Interval::open(lower, upper);
    if interval.is_empty() {
        return Err(ModelError::EmptyInterval { what: "q", interval });
    }
    Ok(interval)
}

/// Admissible range for `r`: lower end `q / (q - 1 + 2 alpha_eff)`; upper
/// end `inf` (closed for `n = 1`) when `n <= 2`, `n / (n - 2)` when `n >= 3`.
pub fn admissible_r_interval(n: usize, alpha: f64, q: f64) -> Result<Interval, ModelError> {
    let qi = admissible_q_interval(n, alpha)?;
    if !qi.contains(q) {
        return Err(ModelError::QOutOfRange { q, interval: qi });
    }
    let a = alpha_clamp(alpha);
    let lower = q / (q - 1.0 + 2.0 * a);
    let interval = match n {
        1 => Interval {
            lower,
            upper: f64::INFINITY,
            upper_closed: true,
        },
        2 => Interval::open(lower, f64::INFINITY),
        _ => Interval::open(lower, n as f64 / (n as f64 - 2.0)),
    };
    if interval.is_empty() {
        return Err(ModelError::EmptyInterval { what: "r", interval });
    }
    Ok(interval)
}
