use std::f64::consts::PI;

use serde::Serialize;

use super::experiments::{
    eps_ladder, gradient_uniformity_check, smoothing_experiment, taxis_integral_experiment,
    v_continuity_experiment, weak_star_experiment,
};
use super::fit::Window;
use super::report::ExperimentReport;
use super::HarnessError;
use crate::domain::{Field, Grid, LpExponent};
use crate::measure::{default_dictionary, preset, MeasureError, RadonMeasure, TestFunction};
use crate::model::Sensitivity;
use crate::solver::SimConfig;

/// Configuration plus initial data.
#[derive(Debug, Clone)]
pub struct Problem {
    pub cfg: SimConfig,
    pub mu0: RadonMeasure,
    pub v0: Field,
}

/// Names accepted by [`Problem::signal`].
pub const SIGNALS: [&str; 3] = ["flat", "cosine", "zero"];

/// Experiment names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 7] = [
    "smoothing",
    "smoothing-control",
    "weak-star",
    "v-continuity",
    "taxis-integral",
    "gradient-uniformity",
    "eps-ladder",
];

impl Problem {
    pub fn new(cfg: SimConfig, mu0: RadonMeasure, v0: Field) -> Result<Self, HarnessError> {
        cfg.validate()?;
        if *v0.grid() != cfg.grid {
            return Err(HarnessError::Input("v0 lives on a different grid".into()));
        }
        if mu0.dim() != cfg.grid.dim() {
            return Err(MeasureError::Dimension {
                measure: mu0.dim(),
                other: cfg.grid.dim(),
            }
            .into());
        }
        Ok(Self { cfg, mu0, v0 })
    }

    pub fn dim(&self) -> usize {
        self.cfg.grid.dim()
    }

    /// Initial signal by name: `flat` is `1`, `cosine` is
    /// `1 + 0.5 prod_i cos(pi x_i / L_i)`, `zero` is `0`.
    pub fn signal(name: &str, grid: &Grid) -> Result<Field, HarnessError> {
        let dim = grid.dim();
        let ext = grid.extents().to_vec();
        match name {
            "flat" => Ok(Field::constant(*grid, 1.0)),
            "zero" => Ok(Field::zeros(*grid)),
            "cosine" => Ok(Field::from_fn(*grid, |x| {
                1.0 + 0.5
                    * x[..dim]
                        .iter()
                        .zip(&ext)
                        .map(|(xi, l)| (PI * xi / l).cos())
                        .product::<f64>()
            })?),
            other => Err(HarnessError::Input(format!(
                "unknown signal {other:?}; available: {}",
                SIGNALS.join(", ")
            ))),
        }
    }

    /// Unit-mass problem on `grid` with named measure and signal.
    pub fn canned(
        grid: Grid,
        measure: &str,
        signal: &str,
        k_f: f64,
        alpha: f64,
        eps: f64,
        t_end: f64,
    ) -> Result<Self, HarnessError> {
        let sens = if k_f == 0.0 {
            Sensitivity::control(alpha)?
        } else {
            Sensitivity::new(k_f, alpha)?
        };
        let cfg = SimConfig::new(grid, sens, eps, t_end)?;
        let mu0 = preset(measure, &grid, 1.0)?;
        let v0 = Self::signal(signal, &grid)?;
        Self::new(cfg, mu0, v0)
    }

    /// Unit Dirac mass at the center of `[0, 1]` on 1024 cells, `eps = 1e-5`,
    /// `alpha = 0.3`, cosine signal.
    pub fn dirac_1d(k_f: f64) -> Result<Self, HarnessError> {
        Self::canned(Grid::unit_interval(1024)?, "dirac", "cosine", k_f, 0.3, 1e-5, 1.0)
    }

    /// Cosine-bump density on `[0, 1]` with 256 cells.
    pub fn bump_1d(k_f: f64) -> Result<Self, HarnessError> {
        Self::canned(Grid::unit_interval(256)?, "cosine_bump", "cosine", k_f, 0.3, 1e-3, 1.0)
    }
}

/// Parameters of a named experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentParams {
    pub r: LpExponent,
    pub q: f64,
    pub p: f64,
    pub window: Window,
    pub slack: f64,
    pub kmax: u32,
    pub eps_list: Vec<f64>,
    pub t_final: f64,
}

impl ExperimentParams {
    pub fn defaults_for(name: &str) -> Result<Self, HarnessError> {
        let rate_window = Window::new(4e-4, 1e-2, 20)?;
        let base = Self {
            r: LpExponent::Finite(2.0),
            q: 1.5,
            p: 1.5,
            window: rate_window,
            slack: 0.05,
            kmax: 4,
            eps_list: vec![1e-2, 1e-3, 1e-4],
            t_final: 0.05,
        };
        Ok(match name {
            "smoothing" | "smoothing-control" => base,
            "weak-star" => Self {
                r: LpExponent::Infinity,
                slack: 0.1,
                ..base
            },
            "v-continuity" => Self { slack: 0.1, ..base },
            "taxis-integral" => Self {
                r: LpExponent::Finite(4.0),
                slack: 0.1,
                ..base
            },
            "gradient-uniformity" => Self {
                window: Window::new(1e-4, 1.0, 25)?,
                ..base
            },
            "eps-ladder" => base,
            other => {
                return Err(HarnessError::UnknownExperiment {
                    name: other.to_string(),
                    available: EXPERIMENTS.join(", "),
                })
            }
        })
    }
}

/// Default problem for a named experiment.
pub fn default_problem(name: &str) -> Result<Problem, HarnessError> {
    match name {
        "smoothing-control" => Problem::dirac_1d(0.0),
        "eps-ladder" => Problem::bump_1d(1.0),
        n if EXPERIMENTS.contains(&n) => Problem::dirac_1d(1.0),
        other => Err(HarnessError::UnknownExperiment {
            name: other.to_string(),
            available: EXPERIMENTS.join(", "),
        }),
    }
}

pub fn run_experiment(name: &str, problem: &Problem, params: &ExperimentParams) -> Result<ExperimentReport, HarnessError> {
    let dictionary = || -> Vec<TestFunction> { default_dictionary(problem.cfg.grid.extents(), params.kmax) };
    let mut report = match name {
        "smoothing" | "smoothing-control" => {
            smoothing_experiment(problem, params.r, params.q, &params.window, params.slack)?
        }
        "weak-star" => weak_star_experiment(problem, &dictionary(), params.r, &params.window, params.slack)?,
        "v-continuity" => v_continuity_experiment(problem, params.q, &params.window, params.slack)?,
        "taxis-integral" => taxis_integral_experiment(problem, params.r, &params.window, params.slack)?,
        "gradient-uniformity" => gradient_uniformity_check(problem, params.p, params.q, &params.window)?,
        "eps-ladder" => eps_ladder(problem, &params.eps_list, params.q, params.t_final)?,
        other => {
            return Err(HarnessError::UnknownExperiment {
                name: other.to_string(),
                available: EXPERIMENTS.join(", "),
            })
        }
    };
    report.name = name.replace('-', "_");
    Ok(report)
}
