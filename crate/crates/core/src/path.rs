use crate::error::{Error, Result};

/// A process path observed on a finite, strictly increasing time grid.
///
/// Between grid points the path is read as the linear interpolant of its
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidPath(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidPath("need at least two grid points".into()));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("non-finite grid point or value".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPath("grid is not strictly increasing".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.grid, self.values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Position of `x` in the grid; `x` must be a grid point exactly.
    pub fn index_of(&self, x: f64) -> Result<usize> {
        self.grid
            .binary_search_by(|g| g.total_cmp(&x))
            .map_err(|_| Error::NotOnGrid { x })
    }

    /// Value at grid point `x`.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        Ok(self.values[self.index_of(x)?])
    }

    /// The sub-path on grid points in `[lo, hi]`; both ends must be grid points.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<SampledPath> {
        let (i, j) = (self.index_of(lo)?, self.index_of(hi)?);
        if i >= j {
            return Err(Error::InvalidPath(format!("empty domain [{lo}, {hi}]")));
        }
        Ok(Self::from_parts_unchecked(
            self.grid[i..=j].to_vec(),
            self.values[i..=j].to_vec(),
        ))
    }
}

/// The grid `{j/m : j = 0..=m}`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    assert!(m >= 1, "uniform grid needs at least one step");
    let mf = m as f64;
    (0..=m).map(|j| j as f64 / mf).collect()
}
