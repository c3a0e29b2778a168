//! Independent reference solver: piecewise-linear finite elements for the
//! weak formulation, solved by damped Newton with a finite-difference Jacobian
//! and continuation in the source amplitude.
//!
//! Nothing here uses the first-order reduction, so agreement with
//! [`crate::steady`] is a genuine cross-check.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::sqrt;
use crate::power::{phi_pow, truncate};
use crate::problem::ProblemSpec;
use crate::profile::SolutionProfile;
use crate::steady::{first_order_residual, kappa_for};

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub n_cells: usize,
    /// Target for the max-norm of the discrete residual.
    pub newton_tol: f64,
    /// Newton iterations allowed per continuation level.
    pub max_iters: usize,
    /// Smallest line-search step before Newton is declared divergent.
    pub damping_min: f64,
    /// Number of amplitude levels from `0` to the full source.
    pub continuation_steps: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            n_cells: 1024,
            newton_tol: 1e-13,
            max_iters: 50,
            damping_min: 1.0 / 1024.0,
            continuation_steps: 4,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 16 {
            return Err(Error::InvalidParameter("oracle needs n_cells >= 16"));
        }
        if !(self.damping_min > 0.0 && self.damping_min <= 1.0) {
            return Err(Error::InvalidParameter("damping_min must lie in (0, 1]"));
        }
        if !(self.newton_tol > 0.0) || self.max_iters == 0 || self.continuation_steps == 0 {
            return Err(Error::InvalidParameter(
                "newton_tol > 0, max_iters >= 1 and continuation_steps >= 1 required",
            ));
        }
        Ok(())
    }
}

/// Reference solution with iteration statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub profile: SolutionProfile,
    /// Newton iterations summed over continuation levels.
    pub iterations: usize,
    /// Final max-norm of the discrete residual.
    pub residual: f64,
}

struct Discretization<'a> {
    spec: &'a ProblemSpec,
    grid: Grid,
    load: Vec<f64>,
    truncation: Option<f64>,
}

impl<'a> Discretization<'a> {
    fn new(spec: &'a ProblemSpec, grid: Grid, truncation: Option<f64>) -> Self {
        let x = grid.nodes();
        let n = grid.n_cells();
        let src = spec.source();
        // ∫ f v_i with v_i the hat function at node i, exactly.
        let mut load = vec![0.0; n + 1];
        for i in 1..n {
            let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
            let left = src.moment(a, b, -a / (b - a), 1.0 / (b - a));
            let right = src.moment(b, c, c / (c - b), -1.0 / (c - b));
            load[i] = left + right;
        }
        Discretization { spec, grid, load, truncation }
    }

    /// Cell flux `(A(ū) + H) Φ_p(g cos φ + sin φ)` with midpoint `ū` and slope `g`.
    #[inline]
    fn flux(&self, ul: f64, ur: f64, h: f64) -> f64 {
        let mid = 0.5 * (ul + ur);
        let a = match self.truncation {
            Some(k) => truncate(mid, k),
            None => mid,
        };
        let g = (ur - ul) / h;
        (a + self.spec.head()) * phi_pow(self.spec.p(), g * self.spec.cos_phi() + self.spec.sin_phi())
    }

    /// Residual size attributable to floating-point cancellation alone.
    fn roundoff_level(&self, u: &[f64]) -> f64 {
        let x = self.grid.nodes();
        let fmax = (0..x.len() - 1)
            .map(|i| self.flux(u[i], u[i + 1], x[i + 1] - x[i]).abs())
            .fold(0.0, f64::max);
        64.0 * f64::EPSILON * (fmax + max_abs(&self.load))
    }

    #[inline]
    fn residual_at(&self, u: &[f64], i: usize, amp: f64) -> f64 {
        let x = self.grid.nodes();
        let fl = self.flux(u[i - 1], u[i], x[i] - x[i - 1]);
        let fr = self.flux(u[i], u[i + 1], x[i + 1] - x[i]);
        fl - fr - amp * self.load[i]
    }

    fn residual(&self, u: &[f64], amp: f64, out: &mut [f64]) {
        let n = self.grid.n_cells();
        out[0] = 0.0;
        out[n] = 0.0;
        for i in 1..n {
            out[i] = self.residual_at(u, i, amp);
        }
    }

    /// Tridiagonal Jacobian by central differences, three colors so columns
    /// sharing no row are perturbed together.
    fn jacobian(&self, u: &[f64], amp: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.n_cells();
        let mut lower = vec![0.0; n + 1];
        let mut diag = vec![1.0; n + 1];
        let mut upper = vec![0.0; n + 1];
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        let (mut rp, mut rm) = (vec![0.0; n + 1], vec![0.0; n + 1]);
        let step = |v: f64| 1e-7 * v.abs().max(1.0);
        for color in 0..3 {
            up.copy_from_slice(u);
            um.copy_from_slice(u);
            for j in (1..n).filter(|j| j % 3 == color) {
                let d = step(u[j]);
                up[j] += d;
                um[j] -= d;
            }
            self.residual(&up, amp, &mut rp);
            self.residual(&um, amp, &mut rm);
            for j in (1..n).filter(|j| j % 3 == color) {
                let d2 = up[j] - um[j];
                diag[j] = (rp[j] - rm[j]) / d2;
                if j > 1 {
                    // row j-1, column j
                    upper[j - 1] = (rp[j - 1] - rm[j - 1]) / d2;
                }
                if j + 1 < n {
                    // row j+1, column j
                    lower[j + 1] = (rp[j + 1] - rm[j + 1]) / d2;
                }
            }
        }
        (lower, diag, upper)
    }
}

/// Thomas algorithm on interior rows `1..n`; returns `None` on a vanishing pivot.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len() - 1;
    let mut c = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    let mut x = vec![0.0; n + 1];
    for i in 1..n {
        let denom = diag[i] - if i > 1 { lower[i] * c[i - 1] } else { 0.0 };
        if !(denom.abs() > 1e-300) || !denom.is_finite() {
            return None;
        }
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - if i > 1 { lower[i] * d[i - 1] } else { 0.0 }) / denom;
    }
    for i in (1..n).rev() {
        x[i] = d[i] - if i + 1 < n { c[i] * x[i + 1] } else { 0.0 };
    }
    Some(x)
}

fn l2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves the discrete weak problem on a uniform grid of `config.n_cells` cells.
///
/// With `truncation = Some(k)` the thickness factor `u + H` becomes
/// `T_k(u) + H`.
pub fn solve_fd(spec: &ProblemSpec, config: &FdConfig, truncation: Option<f64>) -> Result<OracleSolution> {
    config.validate()?;
    if let Some(k) = truncation {
        if !(k >= 0.0) {
            return Err(Error::InvalidParameter("truncation level k must be >= 0"));
        }
    }
    let spec = &spec.normalized();
    let grid = Grid::uniform(config.n_cells)?;
    let disc = Discretization::new(spec, grid, truncation);
    let n = config.n_cells;
    let mut u = vec![0.0; n + 1];
    let mut r = vec![0.0; n + 1];
    let mut trial = vec![0.0; n + 1];
    let mut rt = vec![0.0; n + 1];
    let mut iterations = 0;
    let mut res = 0.0;
    let admissible = |v: &[f64]| v.iter().all(|&x| x + spec.head() > 0.0);

    for level in 1..=config.continuation_steps {
        let amp = level as f64 / config.continuation_steps as f64;
        disc.residual(&u, amp, &mut r);
        res = max_abs(&r);
        let mut it = 0;
        while res > config.newton_tol {
            if it >= config.max_iters {
                return Err(Error::NewtonDiverged { level, iterations: it, residual: res });
            }
            it += 1;
            let (lo, di, up) = disc.jacobian(&u, amp);
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            let delta =
                solve_tridiagonal(&lo, &di, &up, &neg).ok_or(Error::JacobianSingular { level })?;
            let mut merit = l2(&r);
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha >= config.damping_min {
                for i in 0..=n {
                    trial[i] = u[i] + alpha * delta[i];
                }
                if admissible(&trial) {
                    disc.residual(&trial, amp, &mut rt);
                    let mt = l2(&rt);
                    if mt < (1.0 - 1e-4 * alpha) * merit {
                        u.copy_from_slice(&trial);
                        r.copy_from_slice(&rt);
                        res = max_abs(&r);
                        merit = mt;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // no descent left: accept only if the residual is at round-off level
                if res <= disc.roundoff_level(&u) {
                    break;
                }
                return Err(Error::NewtonDiverged { level, iterations: it, residual: res });
            }
        }
        iterations += it;
    }
    let du = nodal_derivative(disc.grid.nodes(), &u);
    let s_end = du[n];
    let min_head = u.iter().map(|v| v + spec.head()).fold(f64::INFINITY, f64::min);
    let mut profile = SolutionProfile {
        grid: disc.grid.clone(),
        u,
        du,
        s_end,
        kappa: kappa_for(spec, s_end),
        residual_first_order: 0.0,
        min_head,
    };
    profile.residual_first_order = first_order_residual(spec, &profile);
    Ok(OracleSolution { profile, iterations, residual: res })
}

/// Second-order nodal derivative: three-point central formula inside,
/// one-sided three-point formulas at the ends.
pub fn nodal_derivative(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let three = |i0: usize, at: usize| {
        let (a, b, c) = (x[i0], x[i0 + 1], x[i0 + 2]);
        let t = x[at];
        let la = ((t - b) + (t - c)) / ((a - b) * (a - c));
        let lb = ((t - a) + (t - c)) / ((b - a) * (b - c));
        let lc = ((t - a) + (t - b)) / ((c - a) * (c - b));
        la * u[i0] + lb * u[i0 + 1] + lc * u[i0 + 2]
    };
    (0..=n)
        .map(|i| {
            if i == 0 {
                three(0, 0)
            } else if i == n {
                three(n - 2, n)
            } else {
                three(i - 1, i)
            }
        })
        .collect()
}

/// Sup and discrete `L²` distances of the `u` values of two profiles.
///
/// Profiles on different grids are compared on the finer grid, the coarser
/// one interpolated piecewise linearly.
pub fn compare_profiles(a: &SolutionProfile, b: &SolutionProfile) -> Result<(f64, f64)> {
    if a.u.len() != a.grid.len() || b.u.len() != b.grid.len() {
        return Err(Error::IncompatibleDomains);
    }
    let (fine, coarse) = if a.grid.len() >= b.grid.len() { (a, b) } else { (b, a) };
    let same = fine.grid == coarse.grid;
    let x = fine.grid.nodes();
    let diff: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let other = if same { coarse.u[i] } else { coarse.grid.interpolate(&coarse.u, xi) };
            fine.u[i] - other
        })
        .collect();
    let sup = max_abs(&diff);
    let mut l2 = 0.0;
    for i in 0..x.len() - 1 {
        let h = x[i + 1] - x[i];
        l2 += 0.5 * h * (diff[i] * diff[i] + diff[i + 1] * diff[i + 1]);
    }
    Ok((sup, sqrt(l2)))
}
