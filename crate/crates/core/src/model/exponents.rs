use serde::Serialize;

use super::{admissible_q_interval, admissible_r_interval, alpha_clamp, alpha_threshold, ModelError};
use crate::domain::LpExponent;

/// Exponents produced by the constructive selection for given `(n, alpha, q, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSelection {
    pub n: usize,
    pub alpha: f64,
    pub alpha_eff: f64,
    pub q: f64,
    pub r: LpExponent,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub s1: f64,
    pub s2: f64,
    pub s: f64,
    pub theta: f64,
    pub gamma: LpExponent,
}

/// Truth values of the five selection properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentChecks {
    /// `1/s - 1/r < 1/n`
    pub i: bool,
    /// `s < s1 < r`
    pub ii: bool,
    /// `s2 (1 - 2 alpha) in (0, q]`
    pub iii: bool,
    /// `1/s = 1/s1 + 1/s2`
    pub iv: bool,
    /// `1 - 1/s1 < 2/n`
    pub v: bool,
}

impl ExponentChecks {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii && self.iv && self.v
    }

    pub fn failed(&self) -> Vec<&'static str> {
        [("i", self.i), ("ii", self.ii), ("iii", self.iii), ("iv", self.iv), ("v", self.v)]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name)
            .collect()
    }
}

// Relative slack for the two relations that hold with equality by construction.
const EQ_TOL: f64 = 1e-12;

/// Constructs `s, s1, s2, theta` for an admissible tuple.
///
/// `delta3 = min(delta1, delta2) / 2` unless that breaks
/// `delta1 + delta2 - delta3 > 1/n`, in which case half of the available
/// excess `(delta1 + delta2 - 1/n) / 2` is used instead.
pub fn select_exponents(
    n: usize,
    alpha: f64,
    q: f64,
    r: impl Into<LpExponent>,
) -> Result<ExponentSelection, ModelError> {
    let r = r.into();
    let ri = admissible_r_interval(n, alpha, q)?;
    if !ri.contains(r.to_f64()) {
        return Err(ModelError::ROutOfRange {
            r: r.to_string(),
            interval: ri,
        });
    }
    let nf = n as f64;
    let a = alpha_clamp(alpha);
    let delta1 = 1.0 / nf - (1.0 - 2.0 * a) / q;
    let delta2 = 1.0 - r.recip();
    let excess = delta1 + delta2 - 1.0 / nf;
    if !(delta1 > 0.0 && excess > 0.0) {
        return Err(ModelError::Inconsistent(format!(
            "delta1 = {delta1} and delta1 + delta2 - 1/n = {excess} must be positive"
        )));
    }
    let mut delta3 = 0.5 * delta1.min(delta2);
    if !(delta1 + delta2 - delta3 > 1.0 / nf) {
        delta3 = 0.5 * excess;
    }
    let s1 = 1.0 / (r.recip() + delta3);
    let s2 = q / (1.0 - 2.0 * a);
    let s = s1 * s2 / (s1 + s2);
    let theta = (s1 - 1.0) / ((1.0 - r.recip()) * s1);
    let sel = ExponentSelection {
        n,
        alpha,
        alpha_eff: a,
        q,
        r,
        delta1,
        delta2,
        delta3,
        s1,
        s2,
        s,
        theta,
        gamma: r,
    };
    let checks = verify_exponent_properties(&sel);
    if !checks.all() {
        return Err(ModelError::Inconsistent(format!("properties {:?}", checks.failed())));
    }
    if !(delta3 > 0.0 && delta3 < delta1.min(delta2) && s > 1.0 && theta > 0.0 && theta < 1.0) {
        return Err(ModelError::Inconsistent(format!(
            "slack/interpolation bounds (delta3 = {delta3}, s = {s}, theta = {theta})"
        )));
    }
    Ok(sel)
}

/// Evaluates the five properties literally on `sel`.
pub fn verify_exponent_properties(sel: &ExponentSelection) -> ExponentChecks {
    let nf = sel.n as f64;
    let inv_r = sel.r.recip();
    let r = sel.r.to_f64();
    let prod = sel.s2 * (1.0 - 2.0 * sel.alpha_eff);
    let inv_s = 1.0 / sel.s;
    ExponentChecks {
        i: inv_s - inv_r < 1.0 / nf,
        ii: sel.s < sel.s1 && sel.s1 < r,
        iii: prod > 0.0 && prod <= sel.q * (1.0 + EQ_TOL),
        iv: (inv_s - (1.0 / sel.s1 + 1.0 / sel.s2)).abs() <= EQ_TOL * inv_s,
        v: 1.0 - 1.0 / sel.s1 < 2.0 / nf,
    }
}

/// Sobolev conjugate: `1/q* = 1/q - order/n` when positive, otherwise infinite.
pub fn sobolev_conjugate(q: f64, n: usize, order: u32) -> LpExponent {
    let inv = 1.0 / q - order as f64 / n as f64;
    if inv > 0.0 {
        LpExponent::Finite(1.0 / inv)
    } else {
        LpExponent::Infinity
    }
}

/// Decay exponent base `gamma` for an `L^r` smoothing bound, with the
/// selection it comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPlan {
    pub r: LpExponent,
    pub gamma: LpExponent,
    /// True when `r` itself was admissible and `gamma = r`.
    pub direct: bool,
    pub selection: ExponentSelection,
    /// `-(n/2)(1 - 1/gamma)`: the power of `t` bounding `||u(t)||_{L^r}`.
    pub predicted_exponent: f64,
}

/// Picks `gamma` for any `r` in the range of the decay estimate:
/// `gamma = r` when `r` is admissible for the selection; otherwise `gamma`
/// is the midpoint of the admissible `r` interval (or its lower end plus one
/// when unbounded), and the `L^r` norm is dominated by the `L^gamma` norm.
pub fn decay_plan(n: usize, alpha: f64, q: f64, r: impl Into<LpExponent>) -> Result<DecayPlan, ModelError> {
    let r = r.into();
    let threshold = alpha_threshold(n)?;
    if alpha <= threshold {
        return Err(ModelError::BelowThreshold { n, alpha, threshold });
    }
    let qi = admissible_q_interval(n, alpha)?;
    if !qi.contains(q) {
        return Err(ModelError::QOutOfRange { q, interval: qi });
    }
    let ri = admissible_r_interval(n, alpha, q)?;
    let rv = r.to_f64();
    let upper_ok = if n >= 3 { rv < n as f64 / (n as f64 - 2.0) } else { n == 1 || rv.is_finite() };
    if !(rv > 1.0 && upper_ok) {
        return Err(ModelError::ROutOfRange {
            r: r.to_string(),
            interval: ri,
        });
    }
    let (gamma, direct) = if ri.contains(rv) {
        (r, true)
    } else {
        let g = if ri.is_bounded() {
            0.5 * (ri.lower + ri.upper)
        } else {
            ri.lower + 1.0
        };
        (LpExponent::Finite(g), false)
    };
    let mut selection = select_exponents(n, alpha, q, gamma)?;
    selection.gamma = gamma;
    Ok(DecayPlan {
        r,
        gamma,
        direct,
        selection,
        predicted_exponent: -0.5 * n as f64 * (1.0 - gamma.recip()),
    })
}
