use super::{DomainError, Grid};

/// Cell-averaged scalar function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, DomainError> {
        if values.len() != grid.len() {
            return Err(DomainError::Length {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(DomainError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Builds a field without validation. Callers guarantee the length and
    /// finiteness invariants.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        assert!(value.is_finite(), "constant field value must be finite");
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at cell centers. Only the first `grid.dim()` coordinates
    /// of the slice are meaningful.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self, DomainError> {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|idx| {
                let x = grid.center(idx);
                f(&x[..dim])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, DomainError> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|v| a * v).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Self, DomainError> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn add(&self, other: &Field) -> Result<Self, DomainError> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Self, DomainError> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<(), DomainError> {
        if self.grid != other.grid {
            return Err(DomainError::GridMismatch);
        }
        Ok(())
    }

    /// Value of the cell `offset` steps away along `axis`, with the Neumann
    /// ghost-cell reflection `f[-1] = f[0]`, `f[N] = f[N-1]` applied.
    pub fn reflected(&self, idx: usize, axis: usize, forward: bool) -> f64 {
        let ij = self.grid.unflat(idx);
        let n = self.grid.cells_along(axis);
        let k = ij[axis];
        let k2 = if forward {
            (k + 1).min(n - 1)
        } else {
            k.saturating_sub(1)
        };
        let mut nb = ij;
        nb[axis] = k2;
        self.values[self.grid.flat(nb[0], nb[1])]
    }
}

/// Per-axis collection of fields, e.g. a cell-centered gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self, DomainError> {
        let first = components.first().ok_or(DomainError::Dimension(0))?;
        if components.len() != first.grid().dim() {
            return Err(DomainError::Dimension(components.len()));
        }
        for c in &components[1..] {
            first.check_same_grid(c)?;
        }
        Ok(Self { components })
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &Field {
        &self.components[axis]
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Field {
        let grid = *self.grid();
        let values = (0..grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c.values()[i] * c.values()[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Field::from_raw(grid, values)
    }
}

/// Values on the cell faces normal to one axis. Along that axis there are
/// `N + 1` faces per grid line; face `k` separates cells `k - 1` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    grid: Grid,
    axis: usize,
    values: Vec<f64>,
}

impl FaceField {
    pub(crate) fn zeros(grid: Grid, axis: usize) -> Self {
        let len = Self::face_count(&grid, axis);
        Self {
            grid,
            axis,
            values: vec![0.0; len],
        }
    }

    fn face_count(grid: &Grid, axis: usize) -> usize {
        let mut shape = [grid.cells_along(0), grid.cells_along(1)];
        shape[axis] += 1;
        shape[0] * shape[1]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Shape `(n0, n1)` of the face array.
    pub fn shape(&self) -> [usize; 2] {
        let mut shape = [self.grid.cells_along(0), self.grid.cells_along(1)];
        shape[self.axis] += 1;
        shape
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.shape()[1] + j
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.values[k] = value;
    }

    /// True when `(i, j)` lies on the domain boundary.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        let k = if self.axis == 0 { i } else { j };
        k == 0 || k == self.grid.cells_along(self.axis)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
