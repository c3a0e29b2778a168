//! Node sets on `[-1, 1]`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default number of cells for steady solves.
pub const DEFAULT_CELLS: usize = 2048;

/// Strictly increasing nodes with `nodes[0] = -1` and `nodes[n] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

impl Grid {
    pub fn uniform(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("a grid needs at least one cell"));
        }
        let h = 2.0 / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| -1.0 + h * i as f64).collect();
        nodes[n_cells] = 1.0;
        Ok(Grid { nodes })
    }

    /// Grid from explicit nodes; the end nodes must be exactly `-1` and `1`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter("a grid needs at least two nodes"));
        }
        if nodes[0] != -1.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter("grid must span [-1, 1]"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("grid nodes must be strictly increasing"));
        }
        Ok(Grid { nodes })
    }

    /// Uniform grid clustered towards both ends by `x -> sin(π x / 2)`.
    pub fn graded(n_cells: usize) -> Result<Self> {
        let base = Self::uniform(n_cells)?;
        let mut nodes: Vec<f64> = base
            .nodes
            .iter()
            .map(|&x| crate::math::sin(0.5 * core::f64::consts::PI * x))
            .collect();
        nodes[0] = -1.0;
        nodes[n_cells] = 1.0;
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    pub fn is_uniform(&self) -> bool {
        let h = 2.0 / self.n_cells() as f64;
        (0..self.n_cells()).all(|i| (self.spacing(i) - h).abs() <= 1e-12)
    }

    /// Cell index `i` with `nodes[i] <= x <= nodes[i+1]`, clamping outside values.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_cells();
        if x <= -1.0 {
            return 0;
        }
        if x >= 1.0 {
            return n - 1;
        }
        let idx = self.nodes.partition_point(|&v| v <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// Piecewise-linear interpolation of nodal `values` at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let i = self.locate(x);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
        values[i] + t * (values[i + 1] - values[i])
    }
}
