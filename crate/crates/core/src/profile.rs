//! Gridded solution and coefficient data shared by the solvers.

use alloc::vec::Vec;

use crate::grid::Grid;

/// Nodal steady solution with its residual certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `u'(1)`.
    pub s_end: f64,
    /// `H Φ_p(u'(1) cos φ + sin φ)`, or the matching flux constant for linear problems.
    pub kappa: f64,
    pub residual_first_order: f64,
    /// `min_i (u_i + H)`.
    pub min_head: f64,
}

impl SolutionProfile {
    pub fn sup_norm(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn du_sup_norm(&self) -> f64 {
        self.du.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Minimum of `u` over interior nodes.
    pub fn interior_min(&self) -> f64 {
        let n = self.u.len();
        self.u[1..n - 1].iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Which certified lower bound a [`DiffusionProfile`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorKind {
    /// `½ H (sin φ)^{p-2} cos φ`, valid when `f >= 0`.
    NonnegativeSource,
    /// `K' = ½ (H - ‖f‖₁ / (sin φ)^{p-1}) (sin φ)^{p-2} cos φ` under the existence condition.
    KPrime,
    /// `K = ½ M (sin φ)^{p-2} cos φ` with `M` the measured minimum thickness.
    MeasuredHead,
}

impl FloorKind {
    pub fn name(self) -> &'static str {
        match self {
            FloorKind::NonnegativeSource => "nonnegative_source",
            FloorKind::KPrime => "k_prime",
            FloorKind::MeasuredHead => "measured_head",
        }
    }
}

/// Nodal diffusion coefficient of the linearized problem, piecewise linear
/// between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionProfile {
    pub grid: Grid,
    pub d: Vec<f64>,
    pub floor_kind: FloorKind,
    pub floor_value: f64,
    /// Ditch level `H`, carried so linear solves can report thickness.
    pub head: f64,
}

impl DiffusionProfile {
    pub fn min(&self) -> f64 {
        self.d.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn floor_holds(&self) -> bool {
        self.min() >= self.floor_value
    }

    /// Largest jump between adjacent nodes.
    pub fn max_jump(&self) -> f64 {
        self.d.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }
}
