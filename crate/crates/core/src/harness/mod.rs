//! Experiment drivers: log-log rate fits of norms, pairing gaps and
//! distances along simulated trajectories, the inequality checks behind the
//! exponent calculus, and the named verification suites.

mod experiments;
mod fit;
mod inequalities;
mod problems;
mod report;
mod suites;
mod svg;

use thiserror::Error;

use crate::domain::DomainError;
use crate::measure::MeasureError;
use crate::model::ModelError;
use crate::semigroup::SemigroupError;
use crate::solver::SolverError;

pub use experiments::{
    eps_ladder, gradient_uniformity_check, smoothing_experiment, taxis_integral_experiment,
    v_continuity_experiment, weak_star_experiment,
};
pub use fit::{fit_decay_rate, log_spaced, RateFit, Window};
pub use inequalities::{holder_inequality, interpolation_inequality, random_nonnegative_field, InequalityCheck};
pub use problems::{default_problem, run_experiment, ExperimentParams, Problem, EXPERIMENTS, SIGNALS};
pub use report::{write_report, Assertion, ExperimentReport};
pub use suites::{run_suite, SuiteReport, SUITES};
pub use svg::loglog_svg;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("rate fit needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("rate fit needs positive data; sample {index} is ({t}, {value})")]
    Nonpositive { index: usize, t: f64, value: f64 },
    #[error("times and values differ in length ({times} vs {values})")]
    Length { times: usize, values: usize },
    #[error("degenerate fit window: all times equal")]
    Degenerate,
    #[error("invalid window: {0}")]
    Window(String),
    #[error("invalid experiment input: {0}")]
    Input(String),
    #[error("unknown experiment {name:?}; available: {available}")]
    UnknownExperiment { name: String, available: String },
    #[error("unknown suite {name:?}; available: {available}")]
    UnknownSuite { name: String, available: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
