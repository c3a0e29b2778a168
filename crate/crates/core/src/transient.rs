//! Explicit conservative time stepping for the saturated thickness `ĥ`.
//!
//! The continuity equation `∂ĥ/∂t + ∂Q/∂x = f` with the flux
//! `Q = -c ĥ Φ_p(∂ĥ/∂x cos φ + sin φ)` is discretized by finite volumes on the
//! dual cells of the grid: face fluxes between neighbouring nodes, the exact
//! dual-cell average of `f` at each interior node, and thickness pinned to the
//! ditch levels at `x = ±1`. Here `f` is the source of the scenario, i.e. the
//! recharge rate already multiplied by `cos φ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::abs_pow;
use crate::power::phi_pow;
use crate::problem::ProblemSpec;

/// Stepping options.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientConfig {
    /// Fraction of the stability limit used by adaptive steps.
    pub cfl_safety: f64,
    /// Upwind face thickness for the flux instead of the arithmetic mean.
    pub upwind: bool,
    /// Upper bound on the step size; `None` means the stability limit only.
    pub dt_max: Option<f64>,
}

impl Default for TransientConfig {
    fn default() -> Self {
        TransientConfig { cfl_safety: 0.4, upwind: false, dt_max: None }
    }
}

/// Thickness profile at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientState {
    pub grid: Grid,
    pub h_hat: Vec<f64>,
    pub t: f64,
    /// Last step size taken (zero before the first step).
    pub dt: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

impl TransientState {
    /// Initial state; the boundary nodes are overwritten by the ditch levels.
    pub fn new(grid: Grid, mut h_hat: Vec<f64>, h_minus: f64, h_plus: f64) -> Result<Self> {
        if h_hat.len() != grid.len() {
            return Err(Error::InvalidParameter("initial profile must have one value per node"));
        }
        if !(h_minus >= 0.0 && h_plus >= 0.0) || h_hat.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("thickness values must be >= 0"));
        }
        let n = h_hat.len() - 1;
        h_hat[0] = h_minus;
        h_hat[n] = h_plus;
        Ok(TransientState { grid, h_hat, t: 0.0, dt: 0.0, h_minus, h_plus })
    }

    /// `Σ_i ĥ_i |V_i|` over the interior dual cells.
    pub fn mass(&self) -> f64 {
        let w = dual_widths(&self.grid);
        (1..self.h_hat.len() - 1).map(|i| self.h_hat[i] * w[i]).sum()
    }
}

fn dual_widths(grid: &Grid) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len() - 1;
    (0..=n)
        .map(|i| {
            let l = if i > 0 { x[i] - x[i - 1] } else { 0.0 };
            let r = if i < n { x[i + 1] - x[i] } else { 0.0 };
            0.5 * (l + r)
        })
        .collect()
}

/// Face fluxes `Q_{j+1/2}` for `j = 0..n`, arithmetic-mean thickness.
pub fn flux(spec: &ProblemSpec, grid: &Grid, h_hat: &[f64]) -> Vec<f64> {
    face_fluxes(spec, grid, h_hat, false)
}

fn face_fluxes(spec: &ProblemSpec, grid: &Grid, h: &[f64], upwind: bool) -> Vec<f64> {
    let x = grid.nodes();
    let c = spec.conductivity();
    (0..x.len() - 1)
        .map(|j| {
            let g = (h[j + 1] - h[j]) / (x[j + 1] - x[j]);
            let drive = phi_pow(spec.p(), g * spec.cos_phi() + spec.sin_phi());
            let face = if upwind {
                // Q < 0 when drive > 0: water moves from node j+1 to node j
                if drive >= 0.0 {
                    h[j + 1]
                } else {
                    h[j]
                }
            } else {
                0.5 * (h[j] + h[j + 1])
            };
            -c * face * drive
        })
        .collect()
}

/// Exact dual-cell averages of the source at the nodes (zero at the boundary nodes).
pub fn nodal_source(spec: &ProblemSpec, grid: &Grid) -> Vec<f64> {
    let x = grid.nodes();
    let n = x.len() - 1;
    let src = spec.source();
    (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                return 0.0;
            }
            let a = 0.5 * (x[i - 1] + x[i]);
            let b = 0.5 * (x[i] + x[i + 1]);
            src.integral(a, b) / (b - a)
        })
        .collect()
}

/// Rates `(r_diff, r_drift)` bounding the explicit update: `r_diff` is the
/// largest `(p-1) ĥ |z|^{p-2} cos φ / Δx²` over faces with
/// `z = ∂ĥ/∂x cos φ + sin φ`, `r_drift` the largest `max(|Φ_p(z)|, (sin φ)^{p-1}) / Δx`.
fn rates(spec: &ProblemSpec, state: &TransientState) -> (f64, f64) {
    let x = state.grid.nodes();
    let h = &state.h_hat;
    let p = spec.p();
    let mut diff_rate: f64 = 0.0;
    let mut drift_rate: f64 = 0.0;
    for j in 0..x.len() - 1 {
        let dx = x[j + 1] - x[j];
        let z = (h[j + 1] - h[j]) / dx * spec.cos_phi() + spec.sin_phi();
        let face = h[j].max(h[j + 1]);
        let slope_factor = if p == 2.0 {
            1.0
        } else if p < 2.0 {
            abs_pow(z.abs().max(1e-8), p - 2.0)
        } else {
            abs_pow(z, p - 2.0)
        };
        diff_rate = diff_rate.max((p - 1.0) * face * slope_factor * spec.cos_phi() / (dx * dx));
        drift_rate = drift_rate.max(phi_pow(p, z).abs().max(spec.lambda()) / dx);
    }
    (diff_rate, drift_rate)
}

/// Hard stability limit `1 / (2 c (r_diff + r_drift))` checked by [`step`].
pub fn max_stable_dt(spec: &ProblemSpec, state: &TransientState) -> f64 {
    let (d, a) = rates(spec, state);
    0.5 / (spec.conductivity() * (d + a)).max(f64::MIN_POSITIVE)
}

/// Adaptive step `2 · cfl_safety · max_stable_dt`, capped by `dt_max`.
pub fn stable_dt(spec: &ProblemSpec, state: &TransientState, config: &TransientConfig) -> f64 {
    let dt = 2.0 * config.cfl_safety * max_stable_dt(spec, state);
    match config.dt_max {
        Some(m) => dt.min(m),
        None => dt,
    }
}

/// Bookkeeping for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLog {
    pub mass_before: f64,
    pub mass_after: f64,
    /// `dt (Q_{1/2} - Q_{n-1/2})`: mass entering through the ditches.
    pub boundary_inflow: f64,
    /// `dt Σ f_i |V_i|`.
    pub source_mass: f64,
    /// Mass added by clipping negative thickness to zero.
    pub clipped: f64,
}

impl StepLog {
    /// `|ΔM - (inflow + source + clipped)|` relative to the largest term of the balance.
    pub fn balance_error(&self) -> f64 {
        let expected = self.boundary_inflow + self.source_mass + self.clipped;
        let scale = [self.mass_before, self.mass_after, self.boundary_inflow, self.source_mass, self.clipped]
            .iter()
            .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        ((self.mass_after - self.mass_before) - expected).abs() / scale
    }
}

/// One explicit step of size `dt`.
pub fn step(
    spec: &ProblemSpec,
    state: &TransientState,
    dt: f64,
    config: &TransientConfig,
) -> Result<(TransientState, StepLog)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter("time step must be positive"));
    }
    if !(config.cfl_safety > 0.0 && config.cfl_safety <= 0.5) {
        return Err(Error::InvalidParameter("cfl_safety must lie in (0, 0.5]"));
    }
    let limit = max_stable_dt(spec, state);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { requested: dt, suggested: limit });
    }
    let grid = &state.grid;
    let n = grid.n_cells();
    let q = face_fluxes(spec, grid, &state.h_hat, config.upwind);
    let s = nodal_source(spec, grid);
    let w = dual_widths(grid);
    let mut h = state.h_hat.clone();
    let mut clipped = 0.0;
    for i in 1..n {
        h[i] = state.h_hat[i] - dt * (q[i] - q[i - 1]) / w[i] + dt * s[i];
        if h[i] < 0.0 {
            clipped += -h[i] * w[i];
            h[i] = 0.0;
        }
    }
    h[0] = state.h_minus;
    h[n] = state.h_plus;
    let next = TransientState {
        grid: grid.clone(),
        h_hat: h,
        t: state.t + dt,
        dt,
        h_minus: state.h_minus,
        h_plus: state.h_plus,
    };
    let log = StepLog {
        mass_before: state.mass(),
        mass_after: next.mass(),
        boundary_inflow: dt * (q[0] - q[n - 1]),
        source_mass: dt * (1..n).map(|i| s[i] * w[i]).sum::<f64>(),
        clipped,
    };
    Ok((next, log))
}

/// Summary of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub final_state: TransientState,
    pub steps: usize,
    pub clipped_mass: f64,
    /// Largest relative mass-balance error of any step.
    pub max_balance_error: f64,
    /// `(t, ĥ)` snapshots, the initial state first.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    /// `‖ĥ(T) - target‖∞` when a target profile is supplied.
    pub final_sup_distance: Option<f64>,
}

/// Advances `state0` to `t_end` with adaptive steps; snapshots every
/// `snapshot_every` time units when given.
pub fn run(
    spec: &ProblemSpec,
    state0: &TransientState,
    t_end: f64,
    snapshot_every: Option<f64>,
    target: Option<&[f64]>,
    config: &TransientConfig,
) -> Result<RunSummary> {
    if !(t_end >= 0.0) {
        return Err(Error::InvalidParameter("t_end must be >= 0"));
    }
    if let Some(target) = target {
        if target.len() != state0.h_hat.len() {
            return Err(Error::IncompatibleDomains);
        }
    }
    let mut state = state0.clone();
    let mut snapshots = alloc::vec![(state.t, state.h_hat.clone())];
    let mut next_snap = snapshot_every.filter(|s| *s > 0.0).map(|s| state.t + s);
    let mut steps = 0;
    let mut clipped_mass = 0.0;
    let mut max_balance_error: f64 = 0.0;
    let t_stop = state0.t + t_end;
    while state.t < t_stop {
        let mut dt = stable_dt(spec, &state, config).min(t_stop - state.t);
        if let Some(ts) = next_snap {
            dt = dt.min(ts - state.t);
        }
        if !(dt > 0.0) {
            break;
        }
        let (next, log) = step(spec, &state, dt, config)?;
        state = next;
        steps += 1;
        clipped_mass += log.clipped;
        max_balance_error = max_balance_error.max(log.balance_error());
        if let (Some(ts), Some(every)) = (next_snap, snapshot_every) {
            if state.t >= ts - 1e-12 * ts.abs().max(1.0) {
                snapshots.push((state.t, state.h_hat.clone()));
                next_snap = Some(ts + every);
            }
        }
        // guard against round-off leaving a sliver of time
        if t_stop - state.t <= 1e-14 * t_stop.max(1.0) {
            state.t = t_stop;
        }
    }
    if snapshots.last().map(|s| s.0) != Some(state.t) {
        snapshots.push((state.t, state.h_hat.clone()));
    }
    let final_sup_distance = target.map(|tg| {
        tg.iter().zip(&state.h_hat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    });
    Ok(RunSummary {
        final_state: state,
        steps,
        clipped_mass,
        max_balance_error,
        snapshots,
        final_sup_distance,
    })
}
