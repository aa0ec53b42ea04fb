//! Time stepping for the regularized system
//!
//! ```text
//! u_t = Delta u - div(u f(|grad v|^2) grad v)
//! v_t = Delta v - v + u / (1 + eps u)
//! ```
//!
//! with no-flux boundaries. Each step applies explicit upwind advection to
//! `u`, then the exact semi-discrete heat flow to `u`, then the exact
//! exponential update of `v` with the saturated source frozen over the step.

mod output;

use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::domain::{face_gradient, gradient, integrate, DomainError, FaceField, Field, Grid};
use crate::measure::{clip_and_redistribute, mollify_v0, mollify_with, MeasureError, RadonMeasure};
use crate::model::{alpha_threshold, ModelError, Sensitivity};
use crate::semigroup::{SemigroupError, SpectralOperator, Symbol};

pub use output::{write_trajectory, TrajectoryManifest};

/// Smallest step the adaptive controller will take.
pub const DT_FLOOR: f64 = 1e-12;
/// Allowed undershoot below zero for `u` and `v` at recorded states.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;
/// Allowed relative mass drift over a run.
pub const MASS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dt = {dt:e} exceeds the CFL limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("invariant violated at t = {t:e}: min u = {min_u:e}, min v = {min_v:e}, relative mass drift = {drift:e}")]
    Invariant { t: f64, min_u: f64, min_v: f64, drift: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid,
    pub sens: Sensitivity,
    pub eps: f64,
    pub dt_safety: f64,
    pub t_end: f64,
    pub output_times: Vec<f64>,
    /// Upper bound on the step regardless of the CFL limit; controls the
    /// splitting error.
    pub max_dt: f64,
}

impl SimConfig {
    pub fn new(grid: Grid, sens: Sensitivity, eps: f64, t_end: f64) -> Result<Self, SolverError> {
        let cfg = Self {
            grid,
            sens,
            eps,
            dt_safety: 0.5,
            t_end,
            output_times: vec![t_end],
            max_dt: f64::INFINITY,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_output_times(mut self, times: Vec<f64>) -> Result<Self, SolverError> {
        self.output_times = times;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dt_safety(mut self, safety: f64) -> Result<Self, SolverError> {
        self.dt_safety = safety;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_dt(mut self, max_dt: f64) -> Result<Self, SolverError> {
        self.max_dt = max_dt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0,1)".into());
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return bad("dt_safety must lie in (0,1]".into());
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive".into());
        }
        if !(self.max_dt > 0.0) {
            return bad("max_dt must be positive".into());
        }
        if self.grid.dim() > 2 {
            return bad("simulation supports 1 or 2 dimensions".into());
        }
        if self.output_times.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("output_times must be strictly increasing".into());
        }
        if self.output_times.iter().any(|&t| !(t >= 0.0 && t <= self.t_end)) {
            return bad("output_times must lie in [0, t_end]".into());
        }
        Ok(())
    }

    /// Plain JSON description for manifests.
    pub fn echo(&self) -> serde_json::Value {
        json!({
            "grid": self.grid.header(),
            "k_f": self.sens.k_f(),
            "alpha": self.sens.alpha(),
            "eps": self.eps,
            "dt_safety": self.dt_safety,
            "t_end": self.t_end,
            "max_dt": if self.max_dt.is_finite() { json!(self.max_dt) } else { json!("inf") },
            "output_times": self.output_times,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: Field,
    pub v: Field,
}

/// Velocity `w = f(|g|^2) g` on the faces normal to each axis. The normal
/// component of `g` is the difference across the face; the transverse
/// components average the cell-centered gradients of the two adjacent cells.
/// Boundary faces carry zero velocity.
pub fn face_velocity(v: &Field, sens: &Sensitivity) -> Vec<FaceField> {
    let grid = *v.grid();
    let cell_grad = gradient(v);
    (0..grid.dim())
        .map(|axis| {
            let mut w = face_gradient(v, axis);
            let [n0, n1] = w.shape();
            for i in 0..n0 {
                for j in 0..n1 {
                    if w.is_boundary(i, j) {
                        continue;
                    }
                    let (hi, lo) = if axis == 0 {
                        (grid.flat(i, j), grid.flat(i - 1, j))
                    } else {
                        (grid.flat(i, j), grid.flat(i, j - 1))
                    };
                    let g = w.get(i, j);
                    let transverse: f64 = (0..grid.dim())
                        .filter(|&a| a != axis)
                        .map(|a| {
                            let c = cell_grad.component(a).values();
                            let avg = 0.5 * (c[hi] + c[lo]);
                            avg * avg
                        })
                        .sum();
                    w.set(i, j, sens.eval_unchecked(g * g + transverse) * g);
                }
            }
            w
        })
        .collect()
}

fn upwind_flux(u: &Field, velocity: &[FaceField]) -> Vec<FaceField> {
    let grid = *u.grid();
    let vals = u.values();
    velocity
        .iter()
        .map(|w| {
            let mut flux = w.clone();
            let [n0, n1] = w.shape();
            for i in 0..n0 {
                for j in 0..n1 {
                    if w.is_boundary(i, j) {
                        continue;
                    }
                    let (hi, lo) = if w.axis() == 0 {
                        (grid.flat(i, j), grid.flat(i - 1, j))
                    } else {
                        (grid.flat(i, j), grid.flat(i, j - 1))
                    };
                    let wf = w.get(i, j);
                    let upwind = if wf >= 0.0 { vals[lo] } else { vals[hi] };
                    flux.set(i, j, wf * upwind);
                }
            }
            flux
        })
        .collect()
}

/// `u / (1 + eps u)`, bounded by `1 / eps`.
pub fn saturated_source(u: &Field, eps: f64) -> Field {
    u.map(|x| x / (1.0 + eps * x)).expect("saturation keeps finite values finite")
}

/// Face fluxes `u f(|grad v|^2) grad v` with the upwind value of `u`.
pub fn chemotactic_flux(u: &Field, v: &Field, sens: &Sensitivity) -> Result<Vec<FaceField>, SolverError> {
    u.check_same_grid(v)?;
    Ok(upwind_flux(u, &face_velocity(v, sens)))
}

fn advective_limit(velocity: &[FaceField], grid: &Grid, safety: f64) -> f64 {
    let dim = grid.dim() as f64;
    velocity
        .iter()
        .map(|w| {
            let m = w.max_abs();
            if m == 0.0 {
                f64::INFINITY
            } else {
                safety * grid.spacing(w.axis()) / (2.0 * dim * m)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest admissible step: `dt_safety * h / (2 dim max|w|)`, capped at the
/// time remaining until `t_end` and floored at [`DT_FLOOR`].
pub fn cfl_limit(state: &SimState, cfg: &SimConfig) -> f64 {
    let w = face_velocity(&state.v, &cfg.sens);
    let adv = advective_limit(&w, &cfg.grid, cfg.dt_safety);
    adv.min(cfg.t_end - state.t).max(DT_FLOOR)
}

/// Reusable transforms for one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: SimConfig,
    op: SpectralOperator,
}

impl Stepper {
    pub fn new(cfg: SimConfig) -> Result<Self, SolverError> {
        cfg.validate()?;
        let op = SpectralOperator::new(cfg.grid, Symbol::Stencil);
        Ok(Self { cfg, op })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn operator(&self) -> &SpectralOperator {
        &self.op
    }

    /// Step limit for `state`, before the `t_end` cap.
    pub fn dt_limit(&self, state: &SimState) -> f64 {
        let w = face_velocity(&state.v, &self.cfg.sens);
        advective_limit(&w, &self.cfg.grid, self.cfg.dt_safety)
            .min(self.cfg.max_dt)
            .max(DT_FLOOR)
    }

    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState, SolverError> {
        let grid = self.cfg.grid;
        state.u.check_same_grid(&state.v)?;
        if *state.u.grid() != grid {
            return Err(DomainError::GridMismatch.into());
        }
        let w = face_velocity(&state.v, &self.cfg.sens);
        let limit = advective_limit(&w, &grid, self.cfg.dt_safety).max(DT_FLOOR);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::Cfl { dt, limit });
        }

        let flux = upwind_flux(&state.u, &w);
        let mut u = state.u.values().to_vec();
        for f in &flux {
            let axis = f.axis();
            let ratio = dt / grid.spacing(axis);
            for (idx, ui) in u.iter_mut().enumerate() {
                let [i, j] = grid.unflat(idx);
                let (out_face, in_face) = if axis == 0 { ((i + 1, j), (i, j)) } else { ((i, j + 1), (i, j)) };
                *ui -= ratio * (f.get(out_face.0, out_face.1) - f.get(in_face.0, in_face.1));
            }
        }
        let u = Field::new(grid, u)?;
        let u = self.op.heat(&u, dt)?;
        // roundoff-level undershoot of the transform pair
        let (u, _) = clip_and_redistribute(u);

        let source = saturated_source(&u, self.cfg.eps);
        let v = self.op.damped_step_with_source(&state.v, &source, dt)?;
        let v = v.map(|x| x.max(0.0))?;
        Ok(SimState { t: state.t + dt, u, v })
    }
}

/// One step of the split scheme; rejects `dt` above the CFL limit.
pub fn step(state: &SimState, cfg: &SimConfig, dt: f64) -> Result<SimState, SolverError> {
    Stepper::new(cfg.clone())?.step(state, dt)
}

/// A running simulation with its conserved mass.
#[derive(Debug, Clone)]
pub struct Simulation {
    stepper: Stepper,
    state: SimState,
    mass: f64,
    steps: usize,
}

impl Simulation {
    /// Mollifies `mu0` and `v0` with the configured `eps`.
    pub fn new(cfg: SimConfig, mu0: &RadonMeasure, v0: &Field) -> Result<Self, SolverError> {
        let stepper = Stepper::new(cfg)?;
        let u = mollify_with(stepper.operator(), mu0, stepper.cfg.eps)?;
        let v = mollify_v0(v0, stepper.cfg.eps)?;
        Self::start(stepper, u, v)
    }

    /// Starts from given fields without mollification.
    pub fn from_fields(cfg: SimConfig, u0: Field, v0: Field) -> Result<Self, SolverError> {
        Self::start(Stepper::new(cfg)?, u0, v0)
    }

    fn start(stepper: Stepper, u: Field, v: Field) -> Result<Self, SolverError> {
        if *u.grid() != stepper.cfg.grid {
            return Err(DomainError::GridMismatch.into());
        }
        u.check_same_grid(&v)?;
        let mass = integrate(&u);
        let sim = Self {
            stepper,
            state: SimState { t: 0.0, u, v },
            mass,
            steps: 0,
        };
        sim.check_invariants()?;
        Ok(sim)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.stepper.cfg
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Replaces the step cap for subsequent steps.
    pub fn set_max_dt(&mut self, max_dt: f64) -> Result<(), SolverError> {
        let mut cfg = self.stepper.cfg.clone();
        cfg.max_dt = max_dt;
        cfg.validate()?;
        self.stepper.cfg = cfg;
        Ok(())
    }

    pub fn mass_drift(&self) -> f64 {
        (integrate(&self.state.u) - self.mass).abs() / self.mass.abs().max(f64::MIN_POSITIVE)
    }

    pub fn check_invariants(&self) -> Result<(), SolverError> {
        let min_u = self.state.u.min();
        let min_v = self.state.v.min();
        let drift = self.mass_drift();
        if min_u < -POSITIVITY_TOLERANCE || min_v < -POSITIVITY_TOLERANCE || !(drift <= MASS_TOLERANCE) {
            return Err(SolverError::Invariant {
                t: self.state.t,
                min_u,
                min_v,
                drift,
            });
        }
        Ok(())
    }

    /// Advances to time `t`; `on_step` sees each new state and the step it
    /// took.
    pub fn advance_to(&mut self, t: f64, mut on_step: impl FnMut(&SimState, f64)) -> Result<(), SolverError> {
        while self.state.t < t {
            let remaining = t - self.state.t;
            let mut dt = self.stepper.dt_limit(&self.state);
            let last = dt >= remaining;
            if last {
                dt = remaining;
            }
            let mut next = self.stepper.step(&self.state, dt)?;
            if last {
                next.t = t;
            }
            self.state = next;
            self.steps += 1;
            on_step(&self.state, dt);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    #[serde(skip)]
    pub states: Vec<SimState>,
    pub times: Vec<f64>,
    pub mass: f64,
    pub mass_series: Vec<f64>,
    pub min_u_series: Vec<f64>,
    pub min_v_series: Vec<f64>,
    pub steps: usize,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
}

/// Admissibility notes for `(n, alpha)`; empty when the pair is admissible.
pub fn admissibility_warnings(cfg: &SimConfig) -> Vec<String> {
    let n = cfg.grid.dim();
    match alpha_threshold(n) {
        Ok(th) if cfg.sens.alpha() <= th => vec![format!(
            "alpha = {} is at or below the threshold {} for n = {}",
            cfg.sens.alpha(),
            th,
            n
        )],
        Ok(_) => Vec::new(),
        Err(e) => vec![e.to_string()],
    }
}

/// Runs from the mollified data to `t_end`, recording states at the
/// configured output times and checking invariants at every record.
pub fn simulate(cfg: &SimConfig, mu0: &RadonMeasure, v0: &Field) -> Result<Trajectory, SolverError> {
    let start = Instant::now();
    let warnings = admissibility_warnings(cfg);
    let mut sim = Simulation::new(cfg.clone(), mu0, v0)?;
    let mut traj = Trajectory {
        states: Vec::new(),
        times: Vec::new(),
        mass: sim.mass(),
        mass_series: Vec::new(),
        min_u_series: Vec::new(),
        min_v_series: Vec::new(),
        steps: 0,
        wall_time_s: 0.0,
        warnings,
    };
    for &t in &cfg.output_times {
        sim.advance_to(t, |_, _| {})?;
        sim.check_invariants()?;
        let s = sim.state().clone();
        traj.times.push(s.t);
        traj.mass_series.push(integrate(&s.u));
        traj.min_u_series.push(s.u.min());
        traj.min_v_series.push(s.v.min());
        traj.states.push(s);
    }
    sim.advance_to(cfg.t_end, |_, _| {})?;
    sim.check_invariants()?;
    traj.steps = sim.steps();
    traj.wall_time_s = start.elapsed().as_secs_f64();
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::domain::lr_norm;
    use crate::measure::preset;
    use crate::semigroup::heat_propagate;

    fn sens(k_f: f64) -> Sensitivity {
        if k_f == 0.0 {
            Sensitivity::control(0.3).unwrap()
        } else {
            Sensitivity::new(k_f, 0.3).unwrap()
        }
    }

    #[test]
    fn config_validation() {
        let g = Grid::unit_interval(16).unwrap();
        let e = SimConfig::new(g, sens(1.0), 1.5, 1.0).unwrap_err();
        assert_eq!(e.to_string(), "invalid configuration: eps must lie in (0,1)");
        assert!(SimConfig::new(g, sens(1.0), 0.1, 0.0).is_err());
        let c = SimConfig::new(g, sens(1.0), 0.1, 1.0).unwrap();
        assert!(c.clone().with_dt_safety(0.0).is_err());
        assert!(c.clone().with_output_times(vec![0.5, 0.2]).is_err());
        assert!(c.with_output_times(vec![0.5, 2.0]).is_err());
    }

    #[test]
    fn flux_examples() {
        let g = Grid::unit_interval(64).unwrap();
        let s = sens(1.0);
        let u = Field::constant(g, 2.0);
        let flat = chemotactic_flux(&u, &Field::constant(g, 3.0), &s).unwrap();
        assert_eq!(flat[0].max_abs(), 0.0);

        let slope = -0.7;
        let v = Field::from_fn(g, |x| 5.0 + slope * x[0]).unwrap();
        let flux = chemotactic_flux(&u, &v, &s).unwrap();
        let expected = 2.0 * s.eval(slope * slope).unwrap() * slope;
        let n = g.cells_along(0);
        for k in 1..n {
            assert!((flux[0].get(k, 0) - expected).abs() < 1e-12);
        }
        assert_eq!(flux[0].get(0, 0), 0.0);
        assert_eq!(flux[0].get(n, 0), 0.0);
    }

    #[test]
    fn two_dimensional_boundary_faces_are_zero() {
        let g = Grid::rectangle([1.0, 1.0], [8, 6]).unwrap();
        let v = Field::from_fn(g, |x| x[0] * x[0] + (3.0 * x[1]).sin()).unwrap();
        let u = Field::from_fn(g, |x| 1.0 + x[0]).unwrap();
        let flux = chemotactic_flux(&u, &v, &sens(1.0)).unwrap();
        for f in &flux {
            let [n0, n1] = f.shape();
            for i in 0..n0 {
                for j in 0..n1 {
                    if f.is_boundary(i, j) {
                        assert_eq!(f.get(i, j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn cfl_examples() {
        let g = Grid::unit_interval(256).unwrap();
        let cfg = SimConfig::new(g, sens(1.0), 0.1, 10.0).unwrap();
        let flat = SimState {
            t: 0.0,
            u: Field::constant(g, 1.0),
            v: Field::constant(g, 1.0),
        };
        assert_eq!(cfl_limit(&flat, &cfg), 10.0);

        // |w| = f(g^2) g = 1 on a ramp with f(g^2) g = 1
        let k_f = 1.0;
        let alpha = 0.3;
        let mut slope = 1.0f64;
        for _ in 0..100 {
            slope = (1.0 + slope * slope).powf(alpha) / k_f;
        }
        let ramp = Field::from_fn(g, |x| slope * x[0]).unwrap();
        let s = SimState { v: ramp.clone(), ..flat.clone() };
        let dt = cfl_limit(&s, &cfg);
        assert!((dt - 0.5 / 512.0).abs() < 1e-12, "{dt}");

        let doubled = SimConfig {
            sens: Sensitivity::new(2.0, alpha).unwrap(),
            ..cfg.clone()
        };
        assert!((cfl_limit(&s, &doubled) - 0.5 * dt).abs() < 1e-15);
        assert!(matches!(step(&s, &cfg, 2.0 * dt), Err(SolverError::Cfl { .. })));
    }

    #[test]
    fn zero_density_stays_zero() {
        let g = Grid::unit_interval(32).unwrap();
        let cfg = SimConfig::new(g, sens(1.0), 0.1, 1.0).unwrap();
        let v0 = Field::from_fn(g, |x| 1.0 + (PI * x[0]).cos()).unwrap();
        let s = SimState {
            t: 0.0,
            u: Field::zeros(g),
            v: v0.clone(),
        };
        let next = step(&s, &cfg, 1e-3).unwrap();
        assert_eq!(next.u.max(), 0.0);
        assert!(lr_norm(&next.v, 2.0).unwrap() < lr_norm(&v0, 2.0).unwrap());
    }

    #[test]
    fn constant_state_odes_are_exact() {
        let g = Grid::rectangle([1.0, 2.0], [8, 8]).unwrap();
        let eps = 0.1;
        let (c, cp, dt) = (2.0, 0.5, 0.01);
        let cfg = SimConfig::new(g, sens(1.0), eps, 1.0).unwrap();
        let s = SimState {
            t: 0.0,
            u: Field::constant(g, c),
            v: Field::constant(g, cp),
        };
        let next = step(&s, &cfg, dt).unwrap();
        let expected = cp * (-dt).exp() + c / (1.0 + eps * c) * (1.0 - (-dt).exp());
        for (u, v) in next.u.values().iter().zip(next.v.values()) {
            assert!((u - c).abs() < 1e-13);
            assert!((v - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn one_step_conserves_atom_mass() {
        let g = Grid::unit_interval(256).unwrap();
        let cfg = SimConfig::new(g, sens(1.0), 1e-3, 1.0).unwrap();
        let mu = preset("dirac", &g, 1.0).unwrap();
        let v0 = Field::from_fn(g, |x| 1.0 + (PI * x[0]).cos()).unwrap();
        let sim = Simulation::new(cfg.clone(), &mu, &v0).unwrap();
        let dt = cfl_limit(sim.state(), &cfg);
        let next = step(sim.state(), &cfg, dt).unwrap();
        let before = integrate(&sim.state().u);
        assert!((integrate(&next.u) - before).abs() <= 1e-12 * before);
    }

    #[test]
    fn homogeneous_steady_state_is_preserved() {
        let g = Grid::rectangle([1.0, 1.0], [16, 16]).unwrap();
        let m = 1.7;
        let mu = preset("uniform", &g, m).unwrap();
        // the stationary v solves -v + u / (1 + eps u) = 0
        let eps = 0.01;
        let v_star = m / (1.0 + eps * m);
        let cfg = SimConfig::new(g, sens(1.0), eps, 0.5)
            .unwrap()
            .with_output_times(vec![0.1, 0.5])
            .unwrap()
            .with_max_dt(0.01)
            .unwrap();
        let u0 = mollify_with(&SpectralOperator::new(g, Symbol::Stencil), &mu, eps).unwrap();
        let mut sim = Simulation::from_fields(cfg, u0, Field::constant(g, v_star)).unwrap();
        sim.advance_to(0.5, |_, _| {}).unwrap();
        for (u, v) in sim.state().u.values().iter().zip(sim.state().v.values()) {
            assert!((u - m).abs() < 1e-10);
            assert!((v - v_star).abs() < 1e-10);
        }
    }

    #[test]
    fn decoupled_run_matches_heat_flow() {
        let g = Grid::unit_interval(512).unwrap();
        let t = 0.01;
        let cfg = SimConfig::new(g, sens(0.0), 1e-4, t)
            .unwrap()
            .with_max_dt(1e-3)
            .unwrap();
        let mu = preset("cosine_bump", &g, 1.0).unwrap();
        let v0 = Field::constant(g, 1.0);
        let traj = simulate(&cfg, &mu, &v0).unwrap();
        let u0 = mu.density().unwrap();
        let reference = heat_propagate(u0, t + cfg.eps).unwrap();
        let err = lr_norm(&traj.states[0].u.sub(&reference).unwrap(), f64::INFINITY).unwrap();
        assert!(err <= 1e-3, "{err}");
    }

    #[test]
    fn dirac_run_keeps_invariants_and_smooths() {
        let g = Grid::unit_interval(256).unwrap();
        let times: Vec<f64> = (1..=6).map(|k| 1e-3 * k as f64).collect();
        let cfg = SimConfig::new(g, sens(1.0), 1e-4, 6e-3)
            .unwrap()
            .with_output_times(times)
            .unwrap();
        let mu = preset("dirac", &g, 1.0).unwrap();
        let v0 = Field::constant(g, 0.5);
        let traj = simulate(&cfg, &mu, &v0).unwrap();
        assert!(traj.warnings.is_empty());
        let sups: Vec<f64> = traj.states.iter().map(|s| s.u.max()).collect();
        assert!(sups.iter().all(|s| s.is_finite()));
        assert!(sups.windows(2).all(|w| w[1] < w[0]));
        for m in &traj.mass_series {
            assert!((m - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn saturated_source_is_bounded() {
        let g = Grid::unit_interval(8).unwrap();
        let eps = 0.05;
        let u = Field::new(g, vec![0.0, 1.0, 1e3, 1e6, 1e9, 1e12, 1e15, 1e300]).unwrap();
        assert!(saturated_source(&u, eps).max() <= 1.0 / eps);
    }
}
