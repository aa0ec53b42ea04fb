//! Grids, cell-averaged fields and the discrete norm calculus.

mod calculus;
mod field;
mod grid;
pub mod io;

use thiserror::Error;

pub use calculus::{
    divergence, face_gradient, gradient, integrate, lr_norm, product, w1q_distance, w1q_norm, LpExponent,
};
pub use field::{FaceField, Field, VectorField};
pub use grid::{Grid, GridHeader, MIN_CELLS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("dimension must be 1 or 2, got {0}")]
    Dimension(usize),
    #[error("extents have {extents} axes but cells have {cells}")]
    AxisCount { extents: usize, cells: usize },
    #[error("extent along axis {axis} must be positive and finite, got {value}")]
    Extent { axis: usize, value: f64 },
    #[error("cell count along axis {axis} must be at least {min}, got {value}", min = MIN_CELLS)]
    CellCount { axis: usize, value: usize },
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error("non-finite value at cell {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("Lebesgue exponent must be >= 1, got {0}")]
    Exponent(f64),
    #[error("field parse error: {0}")]
    Parse(String),
}
