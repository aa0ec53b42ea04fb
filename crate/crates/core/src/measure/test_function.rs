use std::f64::consts::PI;

use crate::domain::{DomainError, Field, Grid};

#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: f64,
    modes: Vec<u32>,
}

/// Cosine polynomial `phi(x) = sum_k c_k prod_i cos(pi k_i x_i / L_i)`.
///
/// Every term has zero normal derivative on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    extents: Vec<f64>,
    terms: Vec<Term>,
}

impl TestFunction {
    pub fn constant(extents: &[f64]) -> Self {
        Self::cosine(extents, &vec![0; extents.len()])
    }

    /// A single product of cosines with unit coefficient; its sup norm is 1.
    pub fn cosine(extents: &[f64], modes: &[u32]) -> Self {
        assert_eq!(extents.len(), modes.len(), "one wavenumber per axis");
        Self {
            extents: extents.to_vec(),
            terms: vec![Term {
                coeff: 1.0,
                modes: modes.to_vec(),
            }],
        }
    }

    /// `sum_j a_j phi_j`; all parts must share the same box.
    pub fn combination(parts: &[(f64, &TestFunction)]) -> Self {
        let extents = parts.first().map(|(_, p)| p.extents.clone()).unwrap_or_default();
        let mut terms = Vec::new();
        for (a, p) in parts {
            assert_eq!(p.extents, extents, "test functions live on different boxes");
            terms.extend(p.terms.iter().map(|t| Term {
                coeff: a * t.coeff,
                modes: t.modes.clone(),
            }));
        }
        Self { extents, terms }
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * t.modes
                        .iter()
                        .zip(x)
                        .zip(&self.extents)
                        .map(|((&k, &xi), &l)| (PI * k as f64 * xi / l).cos())
                        .product::<f64>()
            })
            .sum()
    }

    pub fn sample(&self, grid: &Grid) -> Result<Field, DomainError> {
        let dim = self.dim();
        Field::from_fn(*grid, |x| self.eval(&x[..dim]))
    }

    /// `sum |c_k|`, an upper bound on `sup |phi|`.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// `sum |c_k| lambda_k`, an upper bound on `sup |Delta phi|`.
    pub fn laplacian_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.abs() * self.eigenvalue(&t.modes))
            .sum()
    }

    /// Bound on `sup |grad phi|`.
    pub fn gradient_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.abs() * self.eigenvalue(&t.modes).sqrt())
            .sum()
    }

    fn eigenvalue(&self, modes: &[u32]) -> f64 {
        modes
            .iter()
            .zip(&self.extents)
            .map(|(&k, &l)| (PI * k as f64 / l).powi(2))
            .sum()
    }
}

/// All products of cosines with `k_i <= kmax`, the constant included.
pub fn default_dictionary(extents: &[f64], kmax: u32) -> Vec<TestFunction> {
    match extents.len() {
        1 => (0..=kmax).map(|k| TestFunction::cosine(extents, &[k])).collect(),
        2 => (0..=kmax)
            .flat_map(|a| (0..=kmax).map(move |b| [a, b]))
            .map(|m| TestFunction::cosine(extents, &m))
            .collect(),
        d => panic!("test functions are provided for 1 or 2 dimensions, got {d}"),
    }
}
