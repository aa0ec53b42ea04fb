use std::f64::consts::PI;

use super::dct::CosineTransform;
use super::SemigroupError;
use crate::domain::{Field, Grid};

/// Which eigenvalues the propagator attaches to the cosine modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symbol {
    /// `(pi k / L)^2`: exact for cosine eigenfunctions sampled at cell centers.
    #[default]
    Continuous,
    /// `(4 / h^2) sin^2(pi k / 2N)`: eigenvalues of the three-point Neumann
    /// stencil. The resulting propagator is the exact solution of the
    /// semi-discrete heat equation and maps nonnegative fields to
    /// nonnegative fields for every `t >= 0`.
    Stencil,
}

/// Neumann Laplacian diagonalized in the cosine basis of a grid.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    grid: Grid,
    symbol: Symbol,
    axis_eigenvalues: [Vec<f64>; 2],
    transforms: Vec<CosineTransform>,
    lambda1: f64,
}

impl SpectralOperator {
    pub fn new(grid: Grid, symbol: Symbol) -> Self {
        let eig = |axis: usize| -> Vec<f64> {
            if axis >= grid.dim() {
                return vec![0.0];
            }
            let n = grid.cells_along(axis);
            let l = grid.extent(axis);
            let h = grid.spacing(axis);
            (0..n)
                .map(|k| match symbol {
                    Symbol::Continuous => (PI * k as f64 / l).powi(2),
                    Symbol::Stencil => {
                        let s = (PI * k as f64 / (2 * n) as f64).sin();
                        4.0 * s * s / (h * h)
                    }
                })
                .collect()
        };
        let axis_eigenvalues = [eig(0), eig(1)];
        let lambda1 = (0..grid.dim())
            .map(|a| axis_eigenvalues[a][1])
            .fold(f64::INFINITY, f64::min);
        let transforms = (0..grid.dim())
            .map(|a| CosineTransform::new(grid.cells_along(a)))
            .collect();
        Self {
            grid,
            symbol,
            axis_eigenvalues,
            transforms,
            lambda1,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    /// Smallest nonzero eigenvalue of `-Delta`.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Eigenvalue attached to mode `(k0, k1)`.
    pub fn eigenvalue(&self, k0: usize, k1: usize) -> f64 {
        self.axis_eigenvalues[0][k0] + self.axis_eigenvalues[1][k1]
    }

    /// Eigenvalues in the flat layout of the grid.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| {
                let [i, j] = self.grid.unflat(idx);
                self.eigenvalue(i, j)
            })
            .collect()
    }

    fn transform(&self, data: &mut [f64], inverse: bool) {
        let g = &self.grid;
        let n0 = g.cells_along(0);
        let n1 = g.cells_along(1);
        if g.dim() == 1 {
            if inverse {
                self.transforms[0].inverse(data)
            } else {
                self.transforms[0].forward(data)
            }
            return;
        }
        for row in data.chunks_mut(n1) {
            if inverse {
                self.transforms[1].inverse(row)
            } else {
                self.transforms[1].forward(row)
            }
        }
        let mut col = vec![0.0; n0];
        for j in 0..n1 {
            for i in 0..n0 {
                col[i] = data[i * n1 + j];
            }
            if inverse {
                self.transforms[0].inverse(&mut col)
            } else {
                self.transforms[0].forward(&mut col)
            }
            for i in 0..n0 {
                data[i * n1 + j] = col[i];
            }
        }
    }

    /// Cosine coefficients of `f` (unnormalized DCT-II along each axis).
    pub fn coefficients(&self, f: &Field) -> Result<Vec<f64>, SemigroupError> {
        self.check_grid(f)?;
        let mut data = f.values().to_vec();
        self.transform(&mut data, false);
        Ok(data)
    }

    /// Field with the given cosine coefficients.
    pub fn synthesize(&self, mut coeffs: Vec<f64>) -> Result<Field, SemigroupError> {
        if coeffs.len() != self.grid.len() {
            return Err(SemigroupError::Domain(crate::domain::DomainError::Length {
                expected: self.grid.len(),
                found: coeffs.len(),
            }));
        }
        self.transform(&mut coeffs, true);
        Ok(Field::new(self.grid, coeffs)?)
    }

    /// Multiplies mode `k` of `f` by `multiplier(lambda_k)`.
    pub fn apply(&self, f: &Field, multiplier: impl Fn(f64) -> f64) -> Result<Field, SemigroupError> {
        let mut c = self.coefficients(f)?;
        for (idx, ck) in c.iter_mut().enumerate() {
            let [i, j] = self.grid.unflat(idx);
            *ck *= multiplier(self.eigenvalue(i, j));
        }
        self.synthesize(c)
    }

    /// `e^{t Delta} f`.
    pub fn heat(&self, f: &Field, t: f64) -> Result<Field, SemigroupError> {
        check_time(t)?;
        if t == 0.0 {
            self.check_grid(f)?;
            return Ok(f.clone());
        }
        let out = self.apply(f, |lam| (-lam * t).exp())?;
        Ok(restore_mean(f, out))
    }

    /// `e^{t (Delta - 1)} f`.
    pub fn damped(&self, f: &Field, t: f64) -> Result<Field, SemigroupError> {
        check_time(t)?;
        if t == 0.0 {
            self.check_grid(f)?;
            return Ok(f.clone());
        }
        self.apply(f, |lam| (-(1.0 + lam) * t).exp())
    }

    /// `e^{dt (Delta - 1)} z + int_0^dt e^{(dt - s)(Delta - 1)} source ds` with the
    /// source frozen over the step, integrated exactly mode by mode.
    pub fn damped_step_with_source(&self, z: &Field, source: &Field, dt: f64) -> Result<Field, SemigroupError> {
        check_time(dt)?;
        let cz = self.coefficients(z)?;
        let cs = self.coefficients(source)?;
        let out = cz
            .iter()
            .zip(&cs)
            .enumerate()
            .map(|(idx, (&a, &b))| {
                let [i, j] = self.grid.unflat(idx);
                let rate = 1.0 + self.eigenvalue(i, j);
                // (1 - e^{-rate dt}) / rate without cancellation
                let phi = -(-rate * dt).exp_m1() / rate;
                a * (-rate * dt).exp() + b * phi
            })
            .collect();
        self.synthesize(out)
    }

    fn check_grid(&self, f: &Field) -> Result<(), SemigroupError> {
        if *f.grid() != self.grid {
            return Err(crate::domain::DomainError::GridMismatch.into());
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<(), SemigroupError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(SemigroupError::NegativeTime(t));
    }
    Ok(())
}

/// The zero mode is carried through the transform pair with roundoff; put
/// the exact input mean back so the heat flow conserves mass to the last bit
/// the summation allows.
fn restore_mean(input: &Field, output: Field) -> Field {
    let shift = input.mean() - output.mean();
    let grid = *output.grid();
    Field::from_raw(grid, output.into_values().into_iter().map(|v| v + shift).collect())
}

/// `e^{t Delta} f` with the continuous symbol.
pub fn heat_propagate(f: &Field, t: f64) -> Result<Field, SemigroupError> {
    SpectralOperator::new(*f.grid(), Symbol::Continuous).heat(f, t)
}

/// `e^{t (Delta - 1)} f = e^{-t} e^{t Delta} f` with the continuous symbol.
pub fn damped_propagate(f: &Field, t: f64) -> Result<Field, SemigroupError> {
    SpectralOperator::new(*f.grid(), Symbol::Continuous).damped(f, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{integrate, lr_norm, Grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, seed: u64, nonneg: bool) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.len())
            .map(|_| {
                if nonneg {
                    rng.random_range(0.0..1.0)
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect();
        Field::new(grid, vals).unwrap()
    }

    #[test]
    fn constant_is_invariant() {
        let g = Grid::rectangle([1.0, 2.0], [8, 12]).unwrap();
        let c = Field::constant(g, 2.5);
        let out = heat_propagate(&c, 0.7).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.5).abs() < 1e-13));
        let d = damped_propagate(&c, 0.7).unwrap();
        assert!(d.values().iter().all(|v| (v - 2.5 * (-0.7f64).exp()).abs() < 1e-13));
    }

    #[test]
    fn cosine_mode_decays_exactly() {
        let l = 2.0;
        let g = Grid::interval(l, 64).unwrap();
        let f = Field::from_fn(g, |x| (PI * x[0] / l).cos()).unwrap();
        let t = 0.3;
        let out = heat_propagate(&f, t).unwrap();
        let decay = (-(PI / l).powi(2) * t).exp();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - decay * b).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let g = Grid::unit_interval(16).unwrap();
        let f = random_field(g, 1, false);
        assert_eq!(heat_propagate(&f, 0.0).unwrap(), f);
        assert_eq!(damped_propagate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn negative_time_rejected() {
        let g = Grid::unit_interval(16).unwrap();
        let f = Field::zeros(g);
        assert!(matches!(heat_propagate(&f, -1.0), Err(SemigroupError::NegativeTime(_))));
    }

    #[test]
    fn lambda1_is_smallest_nonzero() {
        let g = Grid::rectangle([1.0, 2.0], [8, 8]).unwrap();
        let op = SpectralOperator::new(g, Symbol::Continuous);
        assert_eq!(op.eigenvalue(0, 0), 0.0);
        assert!((op.lambda1() - (PI / 2.0).powi(2)).abs() < 1e-14);
        let min_nonzero = op
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min_nonzero, op.lambda1());
    }

    #[test]
    fn stencil_symbol_matches_three_point_laplacian() {
        let g = Grid::unit_interval(32).unwrap();
        let op = SpectralOperator::new(g, Symbol::Stencil);
        let f = random_field(g, 3, false);
        // d/dt e^{t A} f at t=0 equals A f; compare with a tiny time step
        let dt = 1e-7;
        let out = op.heat(&f, dt).unwrap();
        let h = g.spacing(0);
        for i in 0..32 {
            let lap = (f.reflected(i, 0, true) - 2.0 * f.values()[i] + f.reflected(i, 0, false)) / (h * h);
            let rate = (out.values()[i] - f.values()[i]) / dt;
            assert!((rate - lap).abs() < 1e-3 * (1.0 + lap.abs()), "{rate} vs {lap}");
        }
    }

    #[test]
    fn stencil_heat_preserves_positivity_at_tiny_times() {
        let g = Grid::unit_interval(128).unwrap();
        let mut vals = vec![0.0; 128];
        vals[40] = 1.0;
        let spike = Field::new(g, vals).unwrap();
        let op = SpectralOperator::new(g, Symbol::Stencil);
        for t in [1e-9, 1e-7, 1e-5] {
            let out = op.heat(&spike, t).unwrap();
            assert!(out.min() >= -1e-15, "min {} at t={t}", out.min());
        }
    }

    #[test]
    fn damped_step_with_constant_source_is_exact() {
        let g = Grid::unit_interval(16).unwrap();
        let op = SpectralOperator::new(g, Symbol::Stencil);
        let z = Field::constant(g, 0.4);
        let s = Field::constant(g, 2.0);
        let dt = 0.25;
        let out = op.damped_step_with_source(&z, &s, dt).unwrap();
        let expected = 0.4 * (-dt).exp() + 2.0 * (1.0 - (-dt).exp());
        assert!(out.values().iter().all(|v| (v - expected).abs() < 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn semigroup_law(seed in 0u64..1000, s in 0.0f64..0.2, t in 0.0f64..0.2) {
            let g = Grid::rectangle([1.0, 1.5], [16, 12]).unwrap();
            let f = random_field(g, seed, false);
            let a = heat_propagate(&heat_propagate(&f, s).unwrap(), t).unwrap();
            let b = heat_propagate(&f, s + t).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn mean_preserved_and_norms_contract(seed in 0u64..1000, t in 1e-4f64..0.5) {
            let g = Grid::unit_interval(64).unwrap();
            let f = random_field(g, seed, false);
            let out = heat_propagate(&f, t).unwrap();
            prop_assert!((integrate(&out) - integrate(&f)).abs() < 1e-14);
            // the stencil propagator is a positive Markov operator, so every
            // L^r norm contracts
            let op = SpectralOperator::new(g, Symbol::Stencil);
            let st = op.heat(&f, t).unwrap();
            for r in [1.0, 2.0, 4.0, f64::INFINITY] {
                prop_assert!(lr_norm(&st, r).unwrap() <= lr_norm(&f, r).unwrap() * (1.0 + 1e-12));
            }
            prop_assert!(lr_norm(&out, 2.0).unwrap() <= lr_norm(&f, 2.0).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn damped_keeps_nonnegative_smooth_data(seed in 0u64..1000, t in 1e-3f64..0.5) {
            let g = Grid::unit_interval(64).unwrap();
            let raw = random_field(g, seed, true);
            // resolved nonnegative input
            let f = heat_propagate(&raw, 1e-2).unwrap();
            let out = damped_propagate(&f, t).unwrap();
            prop_assert!(out.min() >= -1e-12);
        }
    }
}
