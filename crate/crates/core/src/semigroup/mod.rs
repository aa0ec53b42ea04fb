//! Neumann heat semigroup on boxes, computed exactly in the cosine basis.

pub mod dct;
mod estimates;
mod operator;

use thiserror::Error;

use crate::domain::DomainError;

pub use estimates::{
    divergence_adjoint_residual, duhamel_solve, duhamel_solve_with, gamma, validate_gradient_bound,
    validate_smoothing_estimates, GradientBoundReport, SmoothingInput, SmoothingReport, GRADIENT_BOUND_SLACK,
};
pub use operator::{damped_propagate, heat_propagate, SpectralOperator, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemigroupError {
    #[error("time must be nonnegative and finite, got {0}")]
    NegativeTime(f64),
    #[error("quadrature needs at least one panel")]
    Panels,
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
