//! Discrete integration, Lebesgue norms and Neumann difference operators.
//!
//! Gradients use ghost-cell reflection at the boundary. The face gradient
//! across a boundary face is therefore exactly zero, and the cell-centered
//! gradient is the average of the two adjacent face gradients, i.e. the
//! centered difference `(f[i+1] - f[i-1]) / 2h` with reflected ghosts.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DomainError, FaceField, Field, VectorField};

/// A Lebesgue exponent in `[1, inf]`; infinity is its own variant.
///
/// Serializes as a JSON number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl Serialize for LpExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LpExponent::Finite(r) => s.serialize_f64(*r),
            LpExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = LpExponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<LpExponent, E> {
                Ok(LpExponent::from(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<LpExponent, E> {
                Ok(LpExponent::Finite(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<LpExponent, E> {
                Ok(LpExponent::Finite(v as f64))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<LpExponent, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(Visitor)
    }
}

impl LpExponent {
    /// `1/r`, with `1/inf = 0`.
    pub fn recip(self) -> f64 {
        match self {
            LpExponent::Finite(r) => 1.0 / r,
            LpExponent::Infinity => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LpExponent::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            LpExponent::Finite(r) => Some(r),
            LpExponent::Infinity => None,
        }
    }

    /// Converts back to `f64`, mapping the infinite variant to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl From<f64> for LpExponent {
    fn from(r: f64) -> Self {
        if r == f64::INFINITY {
            LpExponent::Infinity
        } else {
            LpExponent::Finite(r)
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(r) => write!(f, "{r}"),
            LpExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for LpExponent {
    type Err = std::num::ParseFloatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "oo" => Ok(LpExponent::Infinity),
            other => other.parse::<f64>().map(LpExponent::from),
        }
    }
}

/// Discrete integral `sum(values) * cell_volume`.
pub fn integrate(f: &Field) -> f64 {
    f.values().iter().sum::<f64>() * f.grid().cell_volume()
}

/// Discrete `L^r` norm of `f`.
pub fn lr_norm(f: &Field, r: impl Into<LpExponent>) -> Result<f64, DomainError> {
    lr_norm_of(f.values(), f.grid().cell_volume(), r.into())
}

fn lr_norm_of(values: &[f64], cell_volume: f64, r: LpExponent) -> Result<f64, DomainError> {
    match r {
        LpExponent::Infinity => Ok(values.iter().fold(0.0, |m, v| m.max(v.abs()))),
        LpExponent::Finite(r) if r >= 1.0 && r.is_finite() => {
            if r == 1.0 {
                return Ok(values.iter().map(|v| v.abs()).sum::<f64>() * cell_volume);
            }
            // scale by the max to avoid overflow of |v|^r
            let scale = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            if scale == 0.0 {
                return Ok(0.0);
            }
            let sum: f64 = values.iter().map(|v| (v.abs() / scale).powf(r)).sum();
            Ok(scale * (sum * cell_volume).powf(1.0 / r))
        }
        LpExponent::Finite(r) => Err(DomainError::Exponent(r)),
    }
}

/// Gradient on the faces normal to `axis`: `(f[k] - f[k-1]) / h` at interior
/// faces and exactly zero on the boundary faces (reflected ghost cells).
pub fn face_gradient(f: &Field, axis: usize) -> FaceField {
    let grid = *f.grid();
    assert!(axis < grid.dim(), "axis {axis} out of range");
    let h = grid.spacing(axis);
    let mut out = FaceField::zeros(grid, axis);
    let [n0, n1] = out.shape();
    let vals = f.values();
    for i in 0..n0 {
        for j in 0..n1 {
            if out.is_boundary(i, j) {
                continue;
            }
            let (hi, lo) = if axis == 0 {
                (grid.flat(i, j), grid.flat(i - 1, j))
            } else {
                (grid.flat(i, j), grid.flat(i, j - 1))
            };
            out.set(i, j, (vals[hi] - vals[lo]) / h);
        }
    }
    out
}

/// Cell-centered gradient, one component per axis.
pub fn gradient(f: &Field) -> VectorField {
    let grid = *f.grid();
    let components = (0..grid.dim())
        .map(|axis| {
            let inv = 0.5 / grid.spacing(axis);
            let values = (0..grid.len())
                .map(|idx| (f.reflected(idx, axis, true) - f.reflected(idx, axis, false)) * inv)
                .collect();
            Field::from_raw(grid, values)
        })
        .collect();
    VectorField::new(components).expect("gradient components share one grid")
}

/// Discrete divergence defined as the negative adjoint of [`gradient`], so
/// that `integrate(div(w) * phi) == -integrate(w . grad(phi))` holds to
/// roundoff for every `w`, `phi`.
pub fn divergence(w: &VectorField) -> Field {
    let grid = *w.grid();
    let mut out = vec![0.0; grid.len()];
    for (axis, comp) in w.components().iter().enumerate() {
        let inv = 0.5 / grid.spacing(axis);
        let n = grid.cells_along(axis);
        for (idx, &wi) in comp.values().iter().enumerate() {
            let ij = grid.unflat(idx);
            let k = ij[axis];
            let mut fwd = ij;
            fwd[axis] = (k + 1).min(n - 1);
            let mut bwd = ij;
            bwd[axis] = k.saturating_sub(1);
            // gradient row: +inv at fwd, -inv at bwd; divergence = -transpose
            out[grid.flat(fwd[0], fwd[1])] -= wi * inv;
            out[grid.flat(bwd[0], bwd[1])] += wi * inv;
        }
    }
    Field::from_raw(grid, out)
}

/// `(||f - g||_q^q + || |grad(f - g)| ||_q^q)^{1/q}`.
pub fn w1q_distance(f: &Field, g: &Field, q: f64) -> Result<f64, DomainError> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(DomainError::Exponent(q));
    }
    let d = f.sub(g)?;
    let grad = gradient(&d).magnitude();
    let a = lr_norm(&d, q)?;
    let b = lr_norm(&grad, q)?;
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    let m = a.max(b);
    Ok(m * ((a / m).powf(q) + (b / m).powf(q)).powf(1.0 / q))
}

/// `W^{1,q}` norm of a single field.
pub fn w1q_norm(f: &Field, q: f64) -> Result<f64, DomainError> {
    w1q_distance(f, &Field::zeros(*f.grid()), q)
}

/// Pointwise product.
pub fn product(f: &Field, g: &Field) -> Result<Field, DomainError> {
    f.zip_map(g, |a, b| a * b)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::Grid;

    fn cos_field(n: usize) -> Field {
        Field::from_fn(Grid::unit_interval(n).unwrap(), |x| (PI * x[0]).cos()).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::interval(2.0, 16).unwrap();
        assert!((integrate(&Field::constant(g, 1.0)) - 2.0).abs() < 1e-14);
        assert_eq!(integrate(&Field::zeros(g)), 0.0);
        assert!(integrate(&cos_field(256)).abs() <= 1e-12);
    }

    #[test]
    fn lr_norm_examples() {
        let g = Grid::unit_interval(32).unwrap();
        let c = Field::constant(g, 3.5);
        for r in [1.0, 1.5, 2.0, 7.0] {
            assert!((lr_norm(&c, r).unwrap() - 3.5).abs() < 1e-12);
        }
        assert_eq!(lr_norm(&c, LpExponent::Infinity).unwrap(), 3.5);

        let g2 = Grid::rectangle([2.0, 1.5], [8, 8]).unwrap();
        let c2 = Field::constant(g2, 2.0);
        for r in [1.0, 2.0, 3.0] {
            let expected = 2.0 * 3.0f64.powf(1.0 / r);
            assert!((lr_norm(&c2, r).unwrap() - expected).abs() < 1e-12);
        }

        let mut vals = vec![0.0; 32];
        vals[5] = 1.0 / g.cell_volume();
        let spike = Field::new(g, vals).unwrap();
        assert!((lr_norm(&spike, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lr_norm_rejects_small_exponent() {
        let g = Grid::unit_interval(8).unwrap();
        assert!(matches!(
            lr_norm(&Field::zeros(g), 0.5),
            Err(DomainError::Exponent(_))
        ));
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = Grid::rectangle([1.0, 2.0], [8, 6]).unwrap();
        let grad = gradient(&Field::constant(g, 4.0));
        for c in grad.components() {
            assert!(c.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn gradient_of_cosine_is_second_order() {
        let f = cos_field(256);
        let grad = gradient(&f);
        let g = f.grid();
        let err = (0..g.len())
            .map(|i| {
                let x = g.center(i)[0];
                (grad.component(0).values()[i] + PI * (PI * x).sin()).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "max gradient error {err}");
    }

    #[test]
    fn boundary_faces_carry_zero_normal_gradient() {
        let g = Grid::rectangle([1.0, 1.0], [6, 5]).unwrap();
        let f = Field::from_fn(g, |x| x[0] * x[0] + 3.0 * x[1]).unwrap();
        for axis in 0..2 {
            let fg = face_gradient(&f, axis);
            let [n0, n1] = fg.shape();
            for i in 0..n0 {
                for j in 0..n1 {
                    if fg.is_boundary(i, j) {
                        assert_eq!(fg.get(i, j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn w1q_examples() {
        let f = cos_field(256);
        assert_eq!(w1q_distance(&f, &f, 2.0).unwrap(), 0.0);
        let g = f.map(|v| v + 0.75).unwrap();
        assert!((w1q_distance(&g, &f, 1.5).unwrap() - 0.75).abs() < 1e-12);
        // integral of cos^2 + pi^2 sin^2 over [0, 1]
        let expected = (0.5 + PI * PI / 2.0).sqrt();
        let zero = Field::zeros(*f.grid());
        assert!((w1q_distance(&f, &zero, 2.0).unwrap() - expected).abs() < 1e-2);
    }

    #[test]
    fn w1q_rejects_mismatched_grids() {
        let a = Field::zeros(Grid::unit_interval(8).unwrap());
        let b = Field::zeros(Grid::unit_interval(16).unwrap());
        assert!(matches!(w1q_distance(&a, &b, 2.0), Err(DomainError::GridMismatch)));
    }

    #[test]
    fn divergence_is_negative_adjoint() {
        let g = Grid::rectangle([1.0, 1.3], [7, 5]).unwrap();
        let w0 = Field::from_fn(g, |x| (3.0 * x[0]).sin() + x[1]).unwrap();
        let w1 = Field::from_fn(g, |x| x[0] * x[1] * x[1]).unwrap();
        let w = VectorField::new(vec![w0, w1]).unwrap();
        let phi = Field::from_fn(g, |x| (x[0] - 0.3).powi(3) + (2.0 * x[1]).cos()).unwrap();
        let lhs = integrate(&product(&divergence(&w), &phi).unwrap());
        let gp = gradient(&phi);
        let rhs: f64 = (0..2)
            .map(|a| integrate(&product(w.component(a), gp.component(a)).unwrap()))
            .sum();
        assert!((lhs + rhs).abs() < 1e-12);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("2.5".parse::<LpExponent>().unwrap(), LpExponent::Finite(2.5));
        assert_eq!(LpExponent::from(f64::INFINITY), LpExponent::Infinity);
        assert_eq!(LpExponent::Infinity.recip(), 0.0);
    }
}
