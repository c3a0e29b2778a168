//! Scenario configuration: one strict JSON document per scenario.
//!
//! Every table rejects unknown keys and every numeric constraint of the
//! kernel's problem type is checked at load time, so a config that parses
//! describes a runnable scenario.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use slopeflow_core::oracle::FdConfig;
use slopeflow_core::steady::ShooterConfig;
use slopeflow_core::transient::TransientConfig;
use slopeflow_core::{Grid, ProblemSpec, SourceFunction};

use crate::error::{Error, Result};

/// One polynomial piece of the source, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcePiece {
    pub interval: [f64; 2],
    pub coeffs: Vec<f64>,
}

/// Converts the on-disk piece list into a validated source.
pub fn source_from_pieces(pieces: &[SourcePiece]) -> Result<SourceFunction> {
    let raw = pieces.iter().map(|p| (p.interval[0], p.interval[1], p.coeffs.clone())).collect();
    SourceFunction::from_pieces(raw).map_err(|e| Error::Config(format!("source: {e}")))
}

/// Inverse of [`source_from_pieces`].
pub fn pieces_from_source(source: &SourceFunction) -> Vec<SourcePiece> {
    source
        .pieces()
        .iter()
        .map(|p| SourcePiece { interval: [p.a, p.b], coeffs: p.poly.coeffs().to_vec() })
        .collect()
}

fn default_conductivity() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub p: f64,
    /// Water level `H` at both ditches.
    pub head: f64,
    /// Bed inclination in radians.
    pub phi: f64,
    #[serde(default = "default_conductivity")]
    pub conductivity: f64,
    pub source: Vec<SourcePiece>,
    /// Margin `β >= ‖f‖₁` for the a priori derivative bound; defaults to `‖f‖₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

fn default_cells() -> usize {
    slopeflow_core::grid::DEFAULT_CELLS
}

fn default_hf_resolution() -> usize {
    128
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_cells")]
    pub n_cells: usize,
    /// Cells per direction of the tensor grid used for the integral hypothesis.
    #[serde(default = "default_hf_resolution")]
    pub hf_resolution: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n_cells: default_cells(), hf_resolution: default_hf_resolution() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShooterSection {
    pub bracket_init: [f64; 2],
    pub max_expansions: usize,
    pub root_tol: f64,
    pub ode_steps: usize,
    pub head_guard: f64,
    pub scan_samples: usize,
}

impl Default for ShooterSection {
    fn default() -> Self {
        let d = ShooterConfig::default();
        ShooterSection {
            bracket_init: [d.bracket_init.0, d.bracket_init.1],
            max_expansions: d.max_expansions,
            root_tol: d.root_tol,
            ode_steps: d.ode_steps,
            head_guard: d.head_guard,
            scan_samples: d.scan_samples,
        }
    }
}

impl ShooterSection {
    pub fn to_core(&self) -> ShooterConfig {
        ShooterConfig {
            bracket_init: (self.bracket_init[0], self.bracket_init[1]),
            max_expansions: self.max_expansions,
            root_tol: self.root_tol,
            ode_steps: self.ode_steps,
            head_guard: self.head_guard,
            scan_samples: self.scan_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSection {
    /// Oracle cells; `None` uses the scenario grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    pub newton_tol: f64,
    pub max_iters: usize,
    pub damping_min: f64,
    pub continuation_steps: usize,
}

impl Default for FdSection {
    fn default() -> Self {
        let d = FdConfig::default();
        FdSection {
            n_cells: None,
            newton_tol: d.newton_tol,
            max_iters: d.max_iters,
            damping_min: d.damping_min,
            continuation_steps: d.continuation_steps,
        }
    }
}

impl FdSection {
    pub fn to_core(&self, grid_cells: usize) -> FdConfig {
        FdConfig {
            n_cells: self.n_cells.unwrap_or(grid_cells),
            newton_tol: self.newton_tol,
            max_iters: self.max_iters,
            damping_min: self.damping_min,
            continuation_steps: self.continuation_steps,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub shooter: ShooterSection,
    pub fd: FdSection,
}

/// Initial thickness `ĥ(x, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `ĥ0 ≡ value`.
    Constant { value: f64 },
    /// `ĥ0 = u + H` for the steady solution of the scenario.
    Steady,
    /// Piecewise-linear interpolation of the samples `(x, h)`.
    Samples { x: Vec<f64>, h: Vec<f64> },
}

fn default_cfl_safety() -> f64 {
    TransientConfig::default().cfl_safety
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransientSection {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<f64>,
    /// Boundary thicknesses; both default to `H`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_plus: Option<f64>,
    pub initial: InitialProfile,
    /// Cells for the time integration; `None` uses the scenario grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default)]
    pub upwind: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
}

impl TransientSection {
    pub fn to_core(&self) -> TransientConfig {
        TransientConfig { cfl_safety: self.cfl_safety, upwind: self.upwind, dt_max: self.dt_max }
    }
}

fn default_lipschitz_samples() -> usize {
    8
}

fn default_triples() -> usize {
    10_000
}

fn default_matrix_cap() -> usize {
    slopeflow_core::greens::DEFAULT_MATRIX_CAP
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenSection {
    /// Replace `D` by this constant and compare against the closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_diffusion: Option<f64>,
    #[serde(default = "default_lipschitz_samples")]
    pub lipschitz_samples: usize,
    /// Random `(s, t, y)` triples for the Lipschitz spot check.
    #[serde(default = "default_triples")]
    pub triples: usize,
    #[serde(default = "default_matrix_cap")]
    pub matrix_cap: usize,
    #[serde(default = "default_true")]
    pub write_matrix: bool,
}

impl Default for GreenSection {
    fn default() -> Self {
        GreenSection {
            constant_diffusion: None,
            lipschitz_samples: default_lipschitz_samples(),
            triples: default_triples(),
            matrix_cap: default_matrix_cap(),
            write_matrix: true,
        }
    }
}

fn default_inequality_samples() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Allowed `‖∫ G f - u‖∞`; defaults to `1e-4`, or `1e-5` from 2048 cells on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_tol: Option<f64>,
    /// Random samples for each scalar inequality sweep.
    #[serde(default = "default_inequality_samples")]
    pub inequality_samples: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { fixed_point_tol: None, inequality_samples: default_inequality_samples() }
    }
}

impl VerifySection {
    pub fn fixed_point_tol(&self, n_cells: usize) -> f64 {
        self.fixed_point_tol.unwrap_or(if n_cells >= 2048 { 1e-5 } else { 1e-4 })
    }
}

/// Parameter grid for `sweep`; each point scales the source by `amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub p: Vec<f64>,
    pub phi: Vec<f64>,
    pub amplitude: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient: Option<TransientSection>,
    #[serde(default)]
    pub green: GreenSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    /// Output directory; overridden by `SLOPEFLOW_OUT` and `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

/// Smallest grid accepted by the solvers and the oracle.
pub const MIN_CELLS: usize = 16;

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks every constraint that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        let cfg = |m: &str| Err(Error::Config(m.to_string()));
        if self.grid.n_cells < MIN_CELLS {
            return cfg("grid.n_cells must be >= 16");
        }
        if self.grid.hf_resolution < slopeflow_core::hypothesis::MIN_HF_RESOLUTION {
            return cfg("grid.hf_resolution must be >= 64");
        }
        self.solver.shooter.to_core().validate().map_err(|e| Error::Config(format!("solver.shooter: {e}")))?;
        self.solver
            .fd
            .to_core(self.grid.n_cells)
            .validate()
            .map_err(|e| Error::Config(format!("solver.fd: {e}")))?;
        if let Some(beta) = self.problem.beta {
            if !(beta.is_finite() && beta >= 0.0) {
                return cfg("problem.beta must be finite and >= 0");
            }
        }
        if let Some(t) = &self.transient {
            if !(t.t_end.is_finite() && t.t_end >= 0.0) {
                return cfg("transient.t_end must be finite and >= 0");
            }
            if t.snapshot_every.is_some_and(|s| !(s > 0.0)) {
                return cfg("transient.snapshot_every must be > 0");
            }
            if t.h_minus.is_some_and(|h| !(h >= 0.0)) || t.h_plus.is_some_and(|h| !(h >= 0.0)) {
                return cfg("transient boundary levels must be >= 0");
            }
            if t.n_cells.is_some_and(|n| n < MIN_CELLS) {
                return cfg("transient.n_cells must be >= 16");
            }
            if !(t.cfl_safety > 0.0 && t.cfl_safety <= 0.5) {
                return cfg("transient.cfl_safety must lie in (0, 0.5]");
            }
            if t.dt_max.is_some_and(|d| !(d > 0.0)) {
                return cfg("transient.dt_max must be > 0");
            }
            match &t.initial {
                InitialProfile::Constant { value } if !(*value >= 0.0) => {
                    return cfg("transient.initial.value must be >= 0");
                }
                InitialProfile::Samples { x, h } => {
                    if x.len() != h.len() || x.len() < 2 {
                        return cfg("transient.initial samples need matching x and h with >= 2 entries");
                    }
                    if x.windows(2).any(|w| !(w[0] < w[1])) || x[0] > -1.0 || x[x.len() - 1] < 1.0 {
                        return cfg("transient.initial.x must increase strictly and cover [-1, 1]");
                    }
                    if h.iter().any(|v| !(*v >= 0.0)) {
                        return cfg("transient.initial.h must be >= 0");
                    }
                }
                _ => {}
            }
        }
        if self.green.constant_diffusion.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
            return cfg("green.constant_diffusion must be > 0");
        }
        if self.green.lipschitz_samples == 0 {
            return cfg("green.lipschitz_samples must be >= 1");
        }
        if self.verify.fixed_point_tol.is_some_and(|t| !(t > 0.0)) {
            return cfg("verify.fixed_point_tol must be > 0");
        }
        if let Some(s) = &self.sweep {
            if s.p.is_empty() || s.phi.is_empty() || s.amplitude.is_empty() {
                return cfg("sweep axes must be non-empty");
            }
            for &p in &s.p {
                for &phi in &s.phi {
                    for &a in &s.amplitude {
                        if !a.is_finite() {
                            return cfg("sweep amplitudes must be finite");
                        }
                        ProblemSpec::new(p, self.problem.head, phi, SourceFunction::zero())
                            .map_err(|e| Error::Config(format!("sweep point p={p} phi={phi}: {e}")))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// The kernel problem described by this config.
    pub fn spec(&self) -> Result<ProblemSpec> {
        let pr = &self.problem;
        let source = source_from_pieces(&pr.source)?;
        ProblemSpec::new(pr.p, pr.head, pr.phi, source)
            .and_then(|s| s.with_conductivity(pr.conductivity))
            .map_err(|e| Error::Config(format!("problem: {e}")))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(self.grid.n_cells).map_err(|e| Error::Config(format!("grid: {e}")))
    }
}
