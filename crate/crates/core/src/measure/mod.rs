//! Nonnegative Radon measures on the closed box, their mollification onto a
//! grid, and the weak-* gap against cosine test functions.
//!
//! A measure is a finite list of atoms plus an optional absolutely
//! continuous part given as a cell-averaged density. Mollification deposits
//! each atom into its cell and runs the semi-discrete heat flow for time
//! `eps`, which keeps the result nonnegative and its integral equal to the
//! total mass.

mod test_function;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{integrate, DomainError, Field, Grid};
use crate::semigroup::{SemigroupError, SpectralOperator, Symbol};

pub use test_function::{default_dictionary, TestFunction};

/// Largest negative undershoot, relative to the mass, that mollification
/// may clip away.
pub const CLIP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("atom weight must be nonnegative and finite, got {0}")]
    Weight(f64),
    #[error("atom at {0:?} lies outside the closed domain")]
    Outside(Vec<f64>),
    #[error("measure must have positive total mass")]
    ZeroMass,
    #[error("dimension mismatch: measure lives in {measure}D, got {other}D")]
    Dimension { measure: usize, other: usize },
    #[error("domain extents differ from the measure's box")]
    Extents,
    #[error("density must be nonnegative (min {0})")]
    NegativeDensity(f64),
    #[error("initial signal must be nonnegative (min {0})")]
    NegativeSignal(f64),
    #[error("mollification scale must be positive, got {0}")]
    Scale(f64),
    #[error("test-function dictionary is empty")]
    EmptyDictionary,
    #[error("clipped undershoot {clipped} exceeds {limit}")]
    Clip { clipped: f64, limit: f64 },
    #[error("unknown measure preset {0:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub position: Vec<f64>,
    pub weight: f64,
}

impl Atom {
    pub fn new(position: impl Into<Vec<f64>>, weight: f64) -> Self {
        Self {
            position: position.into(),
            weight,
        }
    }
}

/// `mu_0 = sum_i w_i delta_{x_i} + d dx` on the closed box `prod [0, L_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonMeasure {
    extents: Vec<f64>,
    atoms: Vec<Atom>,
    density: Option<Field>,
    total_mass: f64,
}

impl RadonMeasure {
    pub fn new(extents: &[f64], atoms: Vec<Atom>, density: Option<Field>) -> Result<Self, MeasureError> {
        let dim = extents.len();
        for a in &atoms {
            if !(a.weight >= 0.0 && a.weight.is_finite()) {
                return Err(MeasureError::Weight(a.weight));
            }
            if a.position.len() != dim {
                return Err(MeasureError::Dimension {
                    measure: dim,
                    other: a.position.len(),
                });
            }
            let inside = a
                .position
                .iter()
                .zip(extents)
                .all(|(&x, &l)| x.is_finite() && (0.0..=l).contains(&x));
            if !inside {
                return Err(MeasureError::Outside(a.position.clone()));
            }
        }
        let mut mass: f64 = atoms.iter().map(|a| a.weight).sum();
        if let Some(d) = &density {
            check_box(extents, d.grid())?;
            if d.min() < 0.0 {
                return Err(MeasureError::NegativeDensity(d.min()));
            }
            mass += integrate(d);
        }
        if !(mass > 0.0) {
            return Err(MeasureError::ZeroMass);
        }
        Ok(Self {
            extents: extents.to_vec(),
            atoms,
            density,
            total_mass: mass,
        })
    }

    pub fn atoms_only(extents: &[f64], atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        Self::new(extents, atoms, None)
    }

    pub fn from_density(density: Field) -> Result<Self, MeasureError> {
        let extents = density.grid().extents().to_vec();
        Self::new(&extents, Vec::new(), Some(density))
    }

    /// Single atom of mass `mass` at the box center.
    pub fn dirac_center(extents: &[f64], mass: f64) -> Result<Self, MeasureError> {
        let center: Vec<f64> = extents.iter().map(|l| 0.5 * l).collect();
        Self::atoms_only(extents, vec![Atom::new(center, mass)])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Field> {
        self.density.as_ref()
    }

    /// `m = mu_0(1)`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Deposits every atom into its cell (boundary atoms into the adjacent
    /// interior cell) and adds the density.
    pub fn deposit(&self, grid: &Grid) -> Result<Field, MeasureError> {
        check_box(&self.extents, grid)?;
        let mut values = match &self.density {
            Some(d) if d.grid() == grid => d.values().to_vec(),
            Some(_) => return Err(MeasureError::Domain(DomainError::GridMismatch)),
            None => vec![0.0; grid.len()],
        };
        let vol = grid.cell_volume();
        for a in &self.atoms {
            let idx = grid
                .locate(&a.position)
                .ok_or_else(|| MeasureError::Outside(a.position.clone()))?;
            values[idx] += a.weight / vol;
        }
        Ok(Field::new(*grid, values)?)
    }
}

/// Named initial measures of mass `mass` on `grid`'s box. Atoms are placed
/// at cell centers of `grid`, so deposition is exact for that grid.
///
/// * `uniform`: density `mass / |Omega|`
/// * `cosine_bump`: density proportional to `prod_i (1 + cos(pi x_i / L_i))`
/// * `dirac`: one atom at the cell containing the box center
/// * `two_atoms`: two atoms of equal weight near `L/4` and `3L/4` on the first axis
pub fn preset(name: &str, grid: &Grid, mass: f64) -> Result<RadonMeasure, MeasureError> {
    let extents = grid.extents().to_vec();
    let dim = grid.dim();
    let snap = |p: &[f64]| -> Result<Vec<f64>, MeasureError> {
        let idx = grid.locate(p).ok_or_else(|| MeasureError::Outside(p.to_vec()))?;
        Ok(grid.center(idx)[..dim].to_vec())
    };
    match name {
        "uniform" => RadonMeasure::from_density(Field::constant(*grid, mass / grid.volume())),
        "cosine_bump" => {
            let shape = Field::from_fn(*grid, |x| {
                x[..dim]
                    .iter()
                    .zip(&extents)
                    .map(|(xi, l)| 1.0 + (std::f64::consts::PI * xi / l).cos())
                    .product()
            })?;
            let scale = mass / integrate(&shape);
            RadonMeasure::from_density(shape.scale(scale))
        }
        "dirac" => {
            let center: Vec<f64> = extents.iter().map(|l| 0.5 * l).collect();
            RadonMeasure::atoms_only(&extents, vec![Atom::new(snap(&center)?, mass)])
        }
        "two_atoms" => {
            let mut a: Vec<f64> = extents.iter().map(|l| 0.5 * l).collect();
            let mut b = a.clone();
            a[0] = 0.25 * extents[0];
            b[0] = 0.75 * extents[0];
            RadonMeasure::atoms_only(
                &extents,
                vec![Atom::new(snap(&a)?, 0.5 * mass), Atom::new(snap(&b)?, 0.5 * mass)],
            )
        }
        other => Err(MeasureError::UnknownPreset(other.to_string())),
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["uniform", "cosine_bump", "dirac", "two_atoms"];

fn check_box(extents: &[f64], grid: &Grid) -> Result<(), MeasureError> {
    if grid.dim() != extents.len() {
        return Err(MeasureError::Dimension {
            measure: extents.len(),
            other: grid.dim(),
        });
    }
    let same = grid
        .extents()
        .iter()
        .zip(extents)
        .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    if !same {
        return Err(MeasureError::Extents);
    }
    Ok(())
}

/// `mu(phi) = sum_i w_i phi(x_i) + int d phi`.
pub fn pair(mu: &RadonMeasure, phi: &TestFunction) -> f64 {
    let atoms: f64 = mu.atoms.iter().map(|a| a.weight * phi.eval(&a.position)).sum();
    let density = mu.density.as_ref().map_or(0.0, |d| integrate_against(d, phi));
    atoms + density
}

/// `int f phi` by midpoint quadrature.
pub fn integrate_against(f: &Field, phi: &TestFunction) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    f.values()
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let x = grid.center(idx);
            v * phi.eval(&x[..dim])
        })
        .sum::<f64>()
        * grid.cell_volume()
}

/// Clips negative values to zero and rescales the positive part so the
/// integral is unchanged. Returns the clipped mass.
pub(crate) fn clip_and_redistribute(f: Field) -> (Field, f64) {
    let grid = *f.grid();
    let vol = grid.cell_volume();
    let mut values = f.into_values();
    let negative: f64 = values.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>() * vol;
    if negative == 0.0 {
        return (Field::from_raw(grid, values), 0.0);
    }
    let positive: f64 = values.iter().filter(|v| **v > 0.0).sum::<f64>() * vol;
    let factor = if positive > 0.0 { (positive - negative) / positive } else { 0.0 };
    for v in values.iter_mut() {
        *v = if *v > 0.0 { *v * factor } else { 0.0 };
    }
    (Field::from_raw(grid, values), negative)
}

/// `u_{0 eps}`: the measure deposited on `grid` and smoothed by the
/// semi-discrete Neumann heat flow for time `eps`.
pub fn mollify(mu: &RadonMeasure, eps: f64, grid: &Grid) -> Result<Field, MeasureError> {
    let op = SpectralOperator::new(*grid, Symbol::Stencil);
    mollify_with(&op, mu, eps)
}

pub fn mollify_with(op: &SpectralOperator, mu: &RadonMeasure, eps: f64) -> Result<Field, MeasureError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(MeasureError::Scale(eps));
    }
    let deposited = mu.deposit(op.grid())?;
    let smoothed = op.heat(&deposited, eps)?;
    let (out, clipped) = clip_and_redistribute(smoothed);
    let limit = CLIP_TOLERANCE * mu.total_mass();
    if clipped > limit {
        return Err(MeasureError::Clip { clipped, limit });
    }
    Ok(out)
}

/// `v_{0 eps} = e^{eps (Delta - 1)} v_0`.
pub fn mollify_v0(v0: &Field, eps: f64) -> Result<Field, MeasureError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(MeasureError::Scale(eps));
    }
    if v0.min() < 0.0 {
        return Err(MeasureError::NegativeSignal(v0.min()));
    }
    let out = crate::semigroup::damped_propagate(v0, eps)?;
    // roundoff-level undershoot of the spectral synthesis
    Ok(out.map(|v| v.max(0.0))?)
}

/// `max_phi |int u phi - mu(phi)|` over a dictionary of sup-normalized test
/// functions; a computable surrogate for the weak-* distance.
pub fn weak_star_gap(u: &Field, mu: &RadonMeasure, dictionary: &[TestFunction]) -> Result<f64, MeasureError> {
    if dictionary.is_empty() {
        return Err(MeasureError::EmptyDictionary);
    }
    check_box(&mu.extents, u.grid())?;
    Ok(dictionary
        .iter()
        .map(|phi| (integrate_against(u, phi) - pair(mu, phi)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::lr_norm;
    use proptest::prelude::*;

    #[test]
    fn construction_rules() {
        let e = [1.0];
        assert!(RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.5], -1.0)]).is_err());
        assert!(RadonMeasure::atoms_only(&e, vec![Atom::new(vec![1.5], 1.0)]).is_err());
        assert!(matches!(
            RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.5], 0.0)]),
            Err(MeasureError::ZeroMass)
        ));
        let m = RadonMeasure::atoms_only(&e, vec![Atom::new(vec![1.0], 0.3), Atom::new(vec![0.0], 0.2)]).unwrap();
        assert!((m.total_mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let e = [1.0];
        let one = TestFunction::constant(&e);
        let mu = RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.3], 2.0), Atom::new(vec![0.9], 0.5)]).unwrap();
        assert!((pair(&mu, &one) - 2.5).abs() < 1e-15);

        let phi = TestFunction::cosine(&e, &[2]);
        let single = RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.3], 2.0)]).unwrap();
        assert!((pair(&single, &phi) - 2.0 * (2.0 * PI * 0.3).cos()).abs() < 1e-14);

        let g = Grid::unit_interval(64).unwrap();
        let d = Field::from_fn(g, |x| 1.0 + 0.5 * (PI * x[0]).cos()).unwrap();
        let dens = RadonMeasure::from_density(d.clone()).unwrap();
        assert!((pair(&dens, &one) - integrate(&d)).abs() < 1e-14);
    }

    #[test]
    fn mollified_atom_keeps_mass_and_peaks_at_center() {
        let g = Grid::unit_interval(128).unwrap();
        let mu = RadonMeasure::dirac_center(&[1.0], 1.0).unwrap();
        for eps in [1e-6, 1e-4, 1e-2] {
            let u = mollify(&mu, eps, &g).unwrap();
            assert!((integrate(&u) - 1.0).abs() < 1e-12);
            assert!(u.min() >= 0.0);
            let argmax = u
                .values()
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
                .0;
            assert_eq!(Some(argmax), g.locate(&[0.5]));
        }
    }

    #[test]
    fn mollified_density_is_close_for_tiny_eps() {
        let g = Grid::unit_interval(128).unwrap();
        let d = Field::from_fn(g, |x| 2.0 + (3.0 * PI * x[0]).cos()).unwrap();
        let mu = RadonMeasure::from_density(d.clone()).unwrap();
        let u = mollify(&mu, 1e-8, &g).unwrap();
        assert!(lr_norm(&u.sub(&d).unwrap(), 2.0).unwrap() <= 1e-4);
    }

    #[test]
    fn weak_star_gap_is_linear_in_eps_for_centered_atoms() {
        let g = Grid::unit_interval(256).unwrap();
        // atom at a cell center: the cosine modes are exact eigenvectors
        let x0 = g.center(77)[0];
        let mu = RadonMeasure::atoms_only(&[1.0], vec![Atom::new(vec![x0], 1.0)]).unwrap();
        let dict = default_dictionary(&[1.0], 4);
        let gaps: Vec<f64> = [1e-4, 5e-5, 2.5e-5]
            .iter()
            .map(|&eps| weak_star_gap(&mollify(&mu, eps, &g).unwrap(), &mu, &dict).unwrap())
            .collect();
        for w in gaps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
        }
        // C eps with C = max eigenvalue in the dictionary
        assert!(gaps[0] <= 2.0 * (4.0 * PI).powi(2) * 1e-4);
    }

    #[test]
    fn weak_star_gap_edge_cases() {
        let g = Grid::unit_interval(64).unwrap();
        let d = Field::from_fn(g, |x| 1.0 + (PI * x[0]).cos()).unwrap();
        let mu = RadonMeasure::from_density(d.clone()).unwrap();
        let dict = default_dictionary(&[1.0], 4);
        assert!(weak_star_gap(&d, &mu, &dict).unwrap() < 1e-14);
        assert!(matches!(weak_star_gap(&d, &mu, &[]), Err(MeasureError::EmptyDictionary)));

        let atom = RadonMeasure::atoms_only(&[1.0], vec![Atom::new(vec![0.123], 0.7)]).unwrap();
        let u = mollify(&atom, 1e-3, &g).unwrap();
        let only_one = [TestFunction::constant(&[1.0])];
        assert!(weak_star_gap(&u, &atom, &only_one).unwrap() < 1e-14);
    }

    #[test]
    fn mollify_v0_examples() {
        let g = Grid::unit_interval(64).unwrap();
        let c = Field::constant(g, 3.0);
        let out = mollify_v0(&c, 0.1).unwrap();
        assert!(out.values().iter().all(|v| (v - 3.0 * (-0.1f64).exp()).abs() < 1e-13));

        let v0 = Field::from_fn(g, |x| 1.0 + (PI * x[0]).cos()).unwrap();
        let eps = 0.01;
        let out = mollify_v0(&v0, eps).unwrap();
        let lam = PI * PI;
        for (a, b) in out.values().iter().zip(v0.values()) {
            // constant mode decays by e^{-eps}, the cosine mode by e^{-(1 + lam) eps}
            let cos_part = b - 1.0;
            let expected = (-eps).exp() + (-(1.0 + lam) * eps).exp() * cos_part;
            assert!((a - expected).abs() < 1e-12);
        }

        let dists: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| crate::domain::w1q_distance(&mollify_v0(&v0, e).unwrap(), &v0, 1.5).unwrap())
            .collect();
        assert!(dists[0] > dists[1] && dists[1] > dists[2]);

        assert!(mollify_v0(&v0.map(|v| v - 1.5).unwrap(), 0.1).is_err());
        assert!(mollify_v0(&v0, 0.0).is_err());
    }

    #[test]
    fn presets_carry_requested_mass() {
        let g = Grid::rectangle([1.0, 2.0], [16, 8]).unwrap();
        for name in PRESETS {
            let mu = preset(name, &g, 3.0).unwrap();
            assert!((mu.total_mass() - 3.0).abs() < 1e-12, "{name}");
            assert!((integrate(&mollify(&mu, 1e-3, &g).unwrap()) - 3.0).abs() < 1e-11);
        }
        assert!(matches!(preset("spiral", &g, 1.0), Err(MeasureError::UnknownPreset(_))));
        let d = preset("dirac", &g, 1.0).unwrap();
        let idx = g.locate(&d.atoms()[0].position).unwrap();
        assert_eq!(g.center(idx)[..2], d.atoms()[0].position[..]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gap_shrinks_along_eps_ladder(cells in prop::collection::vec((0usize..128, 0.01f64..2.0), 1..4)) {
            let g = Grid::unit_interval(128).unwrap();
            let atoms = cells.iter().map(|&(c, w)| Atom::new(vec![g.center(c)[0]], w)).collect();
            let mu = RadonMeasure::atoms_only(&[1.0], atoms).unwrap();
            let dict = default_dictionary(&[1.0], 4);
            let gaps: Vec<f64> = (4..12)
                .map(|k| weak_star_gap(&mollify(&mu, 2f64.powi(-k), &g).unwrap(), &mu, &dict).unwrap())
                .collect();
            for w in gaps.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-13);
            }
        }

        #[test]
        fn mollify_conserves_mass_and_sign(
            atoms in prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..3.0), 1..5),
            eps in 1e-7f64..1e-1,
        ) {
            let g = Grid::rectangle([1.0, 1.0], [24, 20]).unwrap();
            let atoms: Vec<Atom> = atoms.into_iter().map(|(x, y, w)| Atom::new(vec![x, y], w)).collect();
            let mu = match RadonMeasure::atoms_only(&[1.0, 1.0], atoms) {
                Ok(m) => m,
                Err(_) => return Ok(()),
            };
            let u = mollify(&mu, eps, &g).unwrap();
            prop_assert!((integrate(&u) - mu.total_mass()).abs() <= 1e-12 * mu.total_mass());
            prop_assert!(u.min() >= 0.0);
        }

        #[test]
        fn pairing_is_bilinear(w1 in 0.0f64..3.0, w2 in 0.0f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let e = [1.0];
            let m1 = RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.2], w1 + 0.1)]).unwrap();
            let m2 = RadonMeasure::atoms_only(&e, vec![Atom::new(vec![0.7], w2 + 0.1)]).unwrap();
            let both = RadonMeasure::atoms_only(&e, [m1.atoms(), m2.atoms()].concat()).unwrap();
            let p1 = TestFunction::cosine(&e, &[1]);
            let p2 = TestFunction::cosine(&e, &[3]);
            let comb = TestFunction::combination(&[(a, &p1), (b, &p2)]);
            prop_assert!((pair(&both, &p1) - pair(&m1, &p1) - pair(&m2, &p1)).abs() < 1e-12);
            prop_assert!((pair(&m1, &comb) - a * pair(&m1, &p1) - b * pair(&m1, &p2)).abs() < 1e-12);
        }
    }
}
