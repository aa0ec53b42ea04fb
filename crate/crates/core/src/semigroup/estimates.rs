//! Duhamel solver and empirical checks of the Neumann semigroup estimates.

use serde::Serialize;

use super::{SemigroupError, SpectralOperator, Symbol};
use crate::domain::{divergence, gradient, integrate, lr_norm, product, Field, LpExponent, VectorField};

/// Solves `z_t = Delta z - z + w(t)` with Neumann data by the variation of
/// constants formula, using the composite midpoint rule with `panels`
/// panels for the time convolution.
pub fn duhamel_solve(
    z0: &Field,
    w: impl Fn(f64) -> Field,
    t: f64,
    panels: usize,
) -> Result<Field, SemigroupError> {
    let op = SpectralOperator::new(*z0.grid(), Symbol::Continuous);
    duhamel_solve_with(&op, z0, w, t, panels)
}

pub fn duhamel_solve_with(
    op: &SpectralOperator,
    z0: &Field,
    w: impl Fn(f64) -> Field,
    t: f64,
    panels: usize,
) -> Result<Field, SemigroupError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SemigroupError::NegativeTime(t));
    }
    if panels == 0 {
        return Err(SemigroupError::Panels);
    }
    let width = t / panels as f64;
    let mut acc = op.damped(z0, t)?.into_values();
    for j in 0..panels {
        let sigma = (j as f64 + 0.5) * width;
        let src = w(sigma);
        let prop = op.damped(&src, t - sigma)?;
        for (a, b) in acc.iter_mut().zip(prop.values()) {
            *a += width * b;
        }
    }
    Ok(Field::new(*z0.grid(), acc)?)
}

/// Lanczos-approximated Gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gamma_argument: f64,
    pub gamma_value: f64,
    pub source_sup: f64,
    pub holds: bool,
}

/// Relative slack allowed for discretization error in the gradient bound.
pub const GRADIENT_BOUND_SLACK: f64 = 0.05;

fn check_pair(n: usize, p: LpExponent, q: f64) -> Result<(), SemigroupError> {
    let p_val = p.to_f64();
    let ok = q >= 1.0 && q <= p_val && (1.0 / q - p.recip()) < 1.0 / n as f64;
    if ok {
        Ok(())
    } else {
        Err(SemigroupError::Inadmissible(format!(
            "need 1 <= q <= p <= inf and 1/q - 1/p < 1/n (n={n}, p={p}, q={q})"
        )))
    }
}

/// Compares `||grad z(t)||_p` against
/// `e^{-t} ||grad z0||_p + Gamma(1/2 - n/2 (1/q - 1/p)) sup_s ||w(s)||_q`.
pub fn validate_gradient_bound(
    z0: &Field,
    w: impl Fn(f64) -> Field,
    t: f64,
    p: impl Into<LpExponent>,
    q: f64,
    panels: usize,
) -> Result<GradientBoundReport, SemigroupError> {
    let p = p.into();
    let n = z0.grid().dim();
    check_pair(n, p, q)?;
    let z = duhamel_solve(z0, &w, t, panels)?;
    let lhs = lr_norm(&gradient(&z).magnitude(), p)?;
    let width = t / panels as f64;
    let mut source_sup = 0.0f64;
    let nodes = std::iter::once(0.0)
        .chain((0..panels).map(|j| (j as f64 + 0.5) * width))
        .chain(std::iter::once(t));
    for s in nodes {
        source_sup = source_sup.max(lr_norm(&w(s), q)?);
    }
    let gamma_argument = 0.5 - 0.5 * n as f64 * (1.0 / q - p.recip());
    let gamma_value = gamma(gamma_argument);
    let rhs = (-t).exp() * lr_norm(&gradient(z0).magnitude(), p)? + gamma_value * source_sup;
    Ok(GradientBoundReport {
        lhs,
        rhs,
        gamma_argument,
        gamma_value,
        source_sup,
        holds: lhs <= rhs * (1.0 + GRADIENT_BOUND_SLACK),
    })
}

/// Input for one of the three smoothing estimates.
#[derive(Debug, Clone)]
pub enum SmoothingInput {
    /// `||e^{t Delta} w||_p` for mean-free `w`; the input is mean-normalized first.
    MeanFree(Field),
    /// `||grad e^{t Delta} w||_p`.
    Gradient(Field),
    /// `||e^{t Delta} div w||_p` for a vector field `w`.
    Divergence(VectorField),
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingReport {
    pub item: &'static str,
    /// Power `a` in `(1 + t^{-a})`.
    pub exponent: f64,
    pub lambda1: f64,
    /// `(t, C(t))` with `C(t) = lhs / ((1 + t^{-a}) e^{-lambda1 t} ||w||_q)`.
    pub constants: Vec<(f64, f64)>,
    pub sup_constant: f64,
}

/// Estimates the constant in one of the smoothing estimates on a time grid.
/// Only boundedness of the returned supremum is meaningful.
pub fn validate_smoothing_estimates(
    input: &SmoothingInput,
    times: &[f64],
    p: impl Into<LpExponent>,
    q: f64,
) -> Result<SmoothingReport, SemigroupError> {
    let p = p.into();
    let p_val = p.to_f64();
    let grid = match input {
        SmoothingInput::MeanFree(f) | SmoothingInput::Gradient(f) => *f.grid(),
        SmoothingInput::Divergence(w) => *w.grid(),
    };
    let n = grid.dim() as f64;
    let base = 0.5 * n * (1.0 / q - p.recip());
    let (item, exponent) = match input {
        SmoothingInput::MeanFree(_) => ("i", base),
        SmoothingInput::Gradient(_) => ("ii", 0.5 + base),
        SmoothingInput::Divergence(_) => ("iii", 0.5 + base),
    };
    let admissible = match input {
        SmoothingInput::Divergence(_) => q > 1.0 && (q <= p_val && p_val < f64::INFINITY || q < p_val),
        _ => q >= 1.0 && q <= p_val,
    };
    if !admissible {
        return Err(SemigroupError::Inadmissible(format!(
            "exponents p={p}, q={q} not admissible for item ({item})"
        )));
    }
    let op = SpectralOperator::new(grid, Symbol::Continuous);
    let (source, w_norm) = match input {
        SmoothingInput::MeanFree(f) => {
            let centered = f.map(|v| v - f.mean())?;
            let norm = lr_norm(&centered, q)?;
            (centered, norm)
        }
        SmoothingInput::Gradient(f) => (f.clone(), lr_norm(f, q)?),
        SmoothingInput::Divergence(w) => (divergence(w), lr_norm(&w.magnitude(), q)?),
    };
    let mut constants = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0) {
            return Err(SemigroupError::NegativeTime(t));
        }
        let evolved = op.heat(&source, t)?;
        let lhs = match input {
            SmoothingInput::Gradient(_) => lr_norm(&gradient(&evolved).magnitude(), p)?,
            _ => lr_norm(&evolved, p)?,
        };
        let denom = (1.0 + t.powf(-exponent)) * (-op.lambda1() * t).exp() * w_norm;
        let c = if denom > 0.0 { lhs / denom } else { 0.0 };
        constants.push((t, c));
    }
    let sup_constant = constants.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(SmoothingReport {
        item,
        exponent,
        lambda1: op.lambda1(),
        constants,
        sup_constant,
    })
}

/// `|int (e^{t Delta} div w) phi + int w . grad(e^{t Delta} phi)|`; zero up to
/// roundoff because the propagator is symmetric and the divergence is the
/// negative adjoint of the gradient.
pub fn divergence_adjoint_residual(w: &VectorField, phi: &Field, t: f64) -> Result<f64, SemigroupError> {
    let op = SpectralOperator::new(*w.grid(), Symbol::Continuous);
    let lhs = integrate(&product(&op.heat(&divergence(w), t)?, phi)?);
    let gphi = gradient(&op.heat(phi, t)?);
    let mut rhs = 0.0;
    for axis in 0..w.grid().dim() {
        rhs += integrate(&product(w.component(axis), gphi.component(axis))?);
    }
    Ok((lhs + rhs).abs())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::Grid;

    fn cos_mode(grid: Grid) -> Field {
        Field::from_fn(grid, |x| (PI * x[0] / grid.extent(0)).cos()).unwrap()
    }

    #[test]
    fn homogeneous_duhamel_is_damped_heat() {
        let g = Grid::unit_interval(32).unwrap();
        let z0 = cos_mode(g).map(|v| 1.0 + v).unwrap();
        let z = duhamel_solve(&z0, |_| Field::zeros(g), 0.4, 3).unwrap();
        let expected = super::super::damped_propagate(&z0, 0.4).unwrap();
        for (a, b) in z.values().iter().zip(expected.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_source_relaxes() {
        let g = Grid::unit_interval(16).unwrap();
        let c = 1.7;
        let t = 1.3;
        let z = duhamel_solve(&Field::zeros(g), |_| Field::constant(g, c), t, 1024).unwrap();
        let expected = c * (1.0 - (-t).exp());
        assert!(z.values().iter().all(|v| (v - expected).abs() <= 1e-6));
    }

    #[test]
    fn single_mode_source_closed_form() {
        let l = 1.0;
        let g = Grid::interval(l, 64).unwrap();
        let phi = cos_mode(g);
        let t = 0.2;
        let lam = (PI / l).powi(2);
        let z = duhamel_solve(&Field::zeros(g), |_| phi.clone(), t, 1024).unwrap();
        let c = (1.0 - (-(1.0 + lam) * t).exp()) / (1.0 + lam);
        for (a, b) in z.values().iter().zip(phi.values()) {
            assert!((a - c * b).abs() <= 1e-6);
        }
    }

    #[test]
    fn duhamel_rejects_zero_panels() {
        let g = Grid::unit_interval(8).unwrap();
        assert!(matches!(
            duhamel_solve(&Field::zeros(g), |_| Field::zeros(g), 1.0, 0),
            Err(SemigroupError::Panels)
        ));
    }

    #[test]
    fn gamma_at_half_is_sqrt_pi() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-12);
        assert!((gamma(5.0) - 24.0).abs() < 1e-10);
    }

    #[test]
    fn gradient_bound_trivial_cases() {
        let g = Grid::unit_interval(64).unwrap();
        let r = validate_gradient_bound(&Field::constant(g, 2.0), |_| Field::zeros(g), 0.5, 2.0, 2.0, 8).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
        assert!((r.gamma_value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gradient_bound_holds_for_smooth_data() {
        let g = Grid::unit_interval(128).unwrap();
        let z0 = Field::from_fn(g, |x| (PI * x[0]).cos() + 0.3 * (3.0 * PI * x[0]).cos()).unwrap();
        let w = |s: f64| Field::from_fn(g, |x| (1.0 + s) * (2.0 * PI * x[0]).cos() + 0.5).unwrap();
        for (p, q) in [(2.0, 2.0), (4.0, 2.0), (f64::INFINITY, 1.5)] {
            let r = validate_gradient_bound(&z0, w, 0.3, p, q, 64).unwrap();
            assert!(r.holds, "p={p} q={q}: {r:?}");
        }
    }

    #[test]
    fn gradient_bound_rejects_inadmissible_pair() {
        let g = Grid::unit_interval(16).unwrap();
        let z0 = Field::zeros(g);
        // 1/1 - 1/inf = 1 is not < 1/n = 1
        assert!(validate_gradient_bound(&z0, |_| Field::zeros(g), 0.1, f64::INFINITY, 1.0, 4).is_err());
        assert!(validate_gradient_bound(&z0, |_| Field::zeros(g), 0.1, 1.0, 2.0, 4).is_err());
    }

    #[test]
    fn mean_free_eigenmode_constant_is_bounded() {
        let g = Grid::unit_interval(64).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let times: Vec<f64> = (0..20).map(|k| 1e-3 * 1.4f64.powi(k)).collect();
        let rep = validate_smoothing_estimates(&SmoothingInput::MeanFree(f), &times, 2.0, 2.0).unwrap();
        // lhs = e^{-4 pi^2 t} ||f|| and the denominator is 2 e^{-pi^2 t} ||f||
        assert!(rep.sup_constant <= 0.5 + 1e-12);
        assert_eq!(rep.item, "i");
    }

    #[test]
    fn delta_gradient_constant_is_bounded() {
        let g = Grid::unit_interval(1024).unwrap();
        let mut vals = vec![0.0; 1024];
        vals[300] = 1.0 / g.cell_volume();
        let delta = Field::new(g, vals).unwrap();
        let times: Vec<f64> = (0..=16).map(|k| 1e-4 * 10f64.powf(k as f64 / 4.0)).collect();
        let rep =
            validate_smoothing_estimates(&SmoothingInput::Gradient(delta), &times, f64::INFINITY, 1.0).unwrap();
        assert!((rep.exponent - 1.0).abs() < 1e-15);
        assert!(rep.sup_constant.is_finite() && rep.sup_constant < 5.0, "{}", rep.sup_constant);
    }

    #[test]
    fn divergence_item_adjoint_and_admissibility() {
        let g = Grid::rectangle([1.0, 1.0], [16, 16]).unwrap();
        let w0 = Field::from_fn(g, |x| (5.0 * x[0]).sin() * x[1]).unwrap();
        let w1 = Field::from_fn(g, |x| (x[0] - x[1]).powi(2)).unwrap();
        let w = VectorField::new(vec![w0, w1]).unwrap();
        let phi = Field::from_fn(g, |x| (7.0 * x[0] * x[1]).cos()).unwrap();
        assert!(divergence_adjoint_residual(&w, &phi, 0.01).unwrap() < 1e-12);
        let times = [0.01, 0.1];
        assert!(validate_smoothing_estimates(&SmoothingInput::Divergence(w.clone()), &times, 2.0, 1.0).is_err());
        let rep = validate_smoothing_estimates(&SmoothingInput::Divergence(w), &times, 2.0, 2.0).unwrap();
        assert!(rep.sup_constant.is_finite());
    }
}
