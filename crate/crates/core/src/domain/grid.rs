use serde::{Deserialize, Serialize};

use super::DomainError;

/// Smallest admissible cell count along any axis.
pub const MIN_CELLS: usize = 4;

/// Uniform cell-centered grid on an interval `[0, L]` or a rectangle
/// `[0, L0] x [0, L1]`.
///
/// Cells are stored row-major with axis 0 slowest, so in two dimensions the
/// flat index of cell `(i, j)` is `i * cells[1] + j`. A one-dimensional grid
/// keeps a dummy second axis with a single cell so index arithmetic is
/// shared between both cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extents: [f64; 2],
    cells: [usize; 2],
}

/// JSON header describing a grid: `{dim, extents, cells}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    pub extents: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Grid {
    pub fn new(extents: &[f64], cells: &[usize]) -> Result<Self, DomainError> {
        let dim = extents.len();
        if !(1..=2).contains(&dim) {
            return Err(DomainError::Dimension(dim));
        }
        if cells.len() != dim {
            return Err(DomainError::AxisCount {
                extents: dim,
                cells: cells.len(),
            });
        }
        for axis in 0..dim {
            let l = extents[axis];
            if !(l.is_finite() && l > 0.0) {
                return Err(DomainError::Extent { axis, value: l });
            }
            if cells[axis] < MIN_CELLS {
                return Err(DomainError::CellCount {
                    axis,
                    value: cells[axis],
                });
            }
        }
        let mut e = [1.0; 2];
        let mut c = [1usize; 2];
        e[..dim].copy_from_slice(extents);
        c[..dim].copy_from_slice(cells);
        Ok(Self {
            dim,
            extents: e,
            cells: c,
        })
    }

    pub fn interval(length: f64, cells: usize) -> Result<Self, DomainError> {
        Self::new(&[length], &[cells])
    }

    pub fn rectangle(extents: [f64; 2], cells: [usize; 2]) -> Result<Self, DomainError> {
        Self::new(&extents, &cells)
    }

    pub fn unit_interval(cells: usize) -> Result<Self, DomainError> {
        Self::interval(1.0, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    /// Cell count along `axis`; 1 for the dummy axis of a 1D grid.
    pub fn cells_along(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.extents[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.cells[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// `|Omega|`.
    pub fn volume(&self) -> f64 {
        self.extents().iter().product()
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Stride of `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            self.cells[1]
        } else {
            1
        }
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.cells[1] + j
    }

    pub fn unflat(&self, idx: usize) -> [usize; 2] {
        [idx / self.cells[1], idx % self.cells[1]]
    }

    /// Physical coordinates of the center of cell `idx` (unused axis is 0).
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let ij = self.unflat(idx);
        let mut x = [0.0; 2];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = (ij[axis] as f64 + 0.5) * self.spacing(axis);
        }
        x
    }

    /// Cell containing `point`; points on the closed boundary go to the
    /// adjacent interior cell. Returns `None` outside the closed box.
    pub fn locate(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim {
            return None;
        }
        let mut ij = [0usize; 2];
        for axis in 0..self.dim {
            let x = point[axis];
            let l = self.extents[axis];
            if !(x.is_finite() && (0.0..=l).contains(&x)) {
                return None;
            }
            let k = (x / self.spacing(axis)).floor() as usize;
            ij[axis] = k.min(self.cells[axis] - 1);
        }
        Some(self.flat(ij[0], ij[1]))
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            dim: self.dim,
            extents: self.extents().to_vec(),
            cells: self.cells().to_vec(),
        }
    }

    pub fn from_header(header: &GridHeader) -> Result<Self, DomainError> {
        let g = Self::new(&header.extents, &header.cells)?;
        if g.dim != header.dim {
            return Err(DomainError::Dimension(header.dim));
        }
        Ok(g)
    }
}
