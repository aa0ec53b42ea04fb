use rand::Rng;
use serde::Serialize;

use crate::domain::{lr_norm, DomainError, Field, Grid, LpExponent};
use crate::model::ExponentSelection;

/// `lhs <= rhs` with the multiplicative slack reported as `ratio = lhs / rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
        Self { lhs, rhs, ratio }
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.ratio <= 1.0 + slack
    }
}

/// `||u||_{s1} <= ||u||_1^{1 - theta} ||u||_r^theta`, the interpolation step
/// with `1/s1 = (1 - theta) + theta/r`.
pub fn interpolation_inequality(u: &Field, sel: &ExponentSelection) -> Result<InequalityCheck, DomainError> {
    let lhs = lr_norm(u, sel.s1)?;
    let l1 = lr_norm(u, 1.0)?;
    let lr = lr_norm(u, sel.r)?;
    Ok(InequalityCheck::new(lhs, l1.powf(1.0 - sel.theta) * lr.powf(sel.theta)))
}

/// `||u g||_s <= ||u||_{s1} ||g||_{s2}` with `1/s = 1/s1 + 1/s2`.
pub fn holder_inequality(u: &Field, g: &Field, sel: &ExponentSelection) -> Result<InequalityCheck, DomainError> {
    let ug = u.zip_map(g, |a, b| a * b)?;
    let lhs = lr_norm(&ug, sel.s)?;
    let rhs = lr_norm(u, sel.s1)? * lr_norm(g, LpExponent::Finite(sel.s2))?;
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Nonnegative field with log-normal magnitudes over six decades, a random
/// fraction of exact zeros, and occasional isolated spikes.
pub fn random_nonnegative_field<R: Rng>(grid: &Grid, rng: &mut R) -> Field {
    let zero_fraction: f64 = rng.random_range(0.0..0.5);
    let spike_fraction: f64 = rng.random_range(0.0..0.02);
    let values = (0..grid.len())
        .map(|_| {
            let p: f64 = rng.random();
            if p < zero_fraction {
                0.0
            } else if p < zero_fraction + spike_fraction {
                10f64.powf(rng.random_range(2.0..4.0))
            } else {
                10f64.powf(rng.random_range(-3.0..3.0))
            }
        })
        .collect();
    Field::new(*grid, values).expect("finite values")
}
