//! Steady states by the exact first-order reduction and shooting on `u'(1)`.
//!
//! Integrating the steady equation once from `x` to `1` gives
//!
//! ```text
//! (u + H) Φ_p(u' cos φ + sin φ) = κ + F(x),   F(x) = ∫_x^1 f,   κ = H Φ_p(u'(1) cos φ + sin φ),
//! ```
//!
//! so for a trial slope `s = u'(1)` the profile follows from the explicit ODE
//!
//! ```text
//! u' = Φ_{p'}((κ + F(x)) / (u + H)) / cos φ - tan φ,   u(1) = 0,
//! ```
//!
//! integrated towards `x = -1`. The correct `s` makes `u(-1) = 0`.
//!
//! Solvers in this module work with unit conductivity; a spec with
//! conductivity `c` is replaced by [`ProblemSpec::normalized`].

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::power::phi_pow;
use crate::problem::ProblemSpec;
use crate::profile::SolutionProfile;

/// Shooting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ShooterConfig {
    /// Initial interval scanned for sign changes of `u(-1)` as a function of `s`.
    pub bracket_init: (f64, f64),
    /// Number of times the bracket may be doubled.
    pub max_expansions: usize,
    /// Accepted `|u(-1)|` at the returned root.
    pub root_tol: f64,
    /// RK4 substeps per grid cell.
    pub ode_steps: usize,
    /// Minimum admissible `u + H`, relative to `H`.
    pub head_guard: f64,
    /// Number of samples in the sign-change scan.
    pub scan_samples: usize,
}

impl Default for ShooterConfig {
    fn default() -> Self {
        ShooterConfig {
            bracket_init: (-1.0, 1.0),
            max_expansions: 40,
            root_tol: 1e-9,
            ode_steps: 1,
            head_guard: 1e-9,
            scan_samples: 32,
        }
    }
}

impl ShooterConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket_init;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter("bracket_init must be a finite interval lo < hi"));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::InvalidParameter("root_tol must be > 0"));
        }
        if !(self.head_guard > 0.0) {
            return Err(Error::InvalidParameter("head_guard must be > 0"));
        }
        if self.ode_steps == 0 || self.scan_samples < 2 {
            return Err(Error::InvalidParameter("ode_steps >= 1 and scan_samples >= 2 required"));
        }
        Ok(())
    }
}

/// A single backward integration for a trial end slope.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub s: f64,
    pub kappa: f64,
    /// Nodal values; truncated at the point where the guard was hit if infeasible.
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `u(-1)`; meaningful only when `feasible`.
    pub endpoint: f64,
    pub feasible: bool,
}

struct Rhs<'a> {
    spec: &'a ProblemSpec,
    kappa: f64,
    guard: f64,
}

impl Rhs<'_> {
    #[inline]
    fn eval(&self, x: f64, u: f64) -> Option<f64> {
        let thick = u + self.spec.head();
        if !(thick > self.guard) {
            return None;
        }
        let q = (self.kappa + self.spec.source().tail_unchecked(x)) / thick;
        Some(phi_pow(self.spec.conj_p(), q) / self.spec.cos_phi() - self.spec.tan_phi())
    }

    fn rk4(&self, x: f64, u: f64, h: f64) -> Option<f64> {
        let k1 = self.eval(x, u)?;
        let k2 = self.eval(x + 0.5 * h, u + 0.5 * h * k1)?;
        let k3 = self.eval(x + 0.5 * h, u + 0.5 * h * k2)?;
        let k4 = self.eval(x + h, u + h * k3)?;
        Some(u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    }
}

/// `κ = H Φ_p(s cos φ + sin φ)`.
pub fn kappa_for(spec: &ProblemSpec, s: f64) -> f64 {
    spec.head() * phi_pow(spec.p(), s * spec.cos_phi() + spec.sin_phi())
}

/// Halvings used to approach a zero of the flux `κ + F`.
const GRADED_LEVELS: usize = 48;

/// RK4 steps per halving level near a flux zero.
const GRADED_STEPS: usize = 8;

/// Step length cap as a fraction of the distance to the nearest flux zero.
const ZERO_PROXIMITY: f64 = 1.0 / 16.0;

/// Upper bound on RK4 steps per segment from the proximity rule.
const MAX_SEGMENT_STEPS: usize = 4096;

impl Rhs<'_> {
    #[inline]
    fn flux(&self, x: f64) -> f64 {
        self.kappa + self.spec.source().tail_unchecked(x)
    }

    /// Zero of `κ + F` strictly inside `(a, b)`, if the flux changes sign there.
    fn flux_zero(&self, a: f64, b: f64) -> Option<f64> {
        let (mut lo, mut hi) = (a, b);
        let (fl, fh) = (self.flux(lo), self.flux(hi));
        if !(fl * fh < 0.0) {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.flux(mid) < 0.0) == (fl < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Advances `u` from `from` to `to` in `steps` uniform RK4 steps.
    fn advance(&self, from: f64, to: f64, mut u: f64, steps: usize) -> Option<f64> {
        let h = (to - from) / steps as f64;
        for k in 0..steps {
            u = self.rk4(from + k as f64 * h, u, h).filter(|v| v.is_finite())?;
        }
        Some(u)
    }

    /// Advances across a segment whose start and/or end is a zero of the flux.
    ///
    /// `Φ_{p'}` is not Lipschitz at the origin when `p > 2`, so a uniform step
    /// loses the RK4 order there; the step is halved towards each singular end.
    fn advance_graded(&self, from: f64, to: f64, mut u: f64, singular_from: bool, singular_to: bool, steps: usize) -> Option<f64> {
        if !singular_from && !singular_to {
            return self.advance(from, to, u, steps);
        }
        if singular_from && singular_to {
            let mid = 0.5 * (from + to);
            u = self.advance_graded(from, mid, u, true, false, steps)?;
            return self.advance_graded(mid, to, u, false, true, steps);
        }
        let len = to - from;
        let per_level = steps * GRADED_STEPS;
        // offsets from the singular end, innermost first
        let offset = |k: usize| len / (1u64 << (GRADED_LEVELS - k)) as f64;
        if singular_from {
            u = self.advance(from, from + offset(0), u, per_level)?;
            for k in 0..GRADED_LEVELS {
                u = self.advance(from + offset(k), from + offset(k + 1), u, per_level)?;
            }
        } else {
            for k in (0..GRADED_LEVELS).rev() {
                u = self.advance(to - offset(k + 1), to - offset(k), u, per_level)?;
            }
            u = self.advance(to - offset(0), to, u, per_level)?;
        }
        Some(u)
    }
}

/// Integrates the reduced ODE from `x = 1` to `x = -1` for the trial slope `s`.
///
/// Each cell is split at source breakpoints so the RK4 stages never straddle
/// a kink of `F`, and at zeros of the flux `κ + F`, which are approached with
/// geometrically refined steps.
pub fn integrate_profile(spec: &ProblemSpec, s: f64, grid: &Grid, config: &ShooterConfig) -> Trajectory {
    let kappa = kappa_for(spec, s);
    let rhs = Rhs { spec, kappa, guard: config.head_guard * spec.head() };
    let nodes = grid.nodes();
    let n = grid.n_cells();
    let mut u = alloc::vec![0.0; n + 1];
    let mut feasible = true;
    let breaks: Vec<f64> = spec.source().breakpoints().collect();
    let mut cur = 0.0;
    let mut stops: Vec<f64> = Vec::new();
    let mut segments: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut zeros: Vec<f64> = Vec::new();
    for i in (0..n).rev() {
        let (a, b) = (nodes[i], nodes[i + 1]);
        stops.clear();
        stops.push(b);
        stops.extend(breaks.iter().rev().copied().filter(|&t| t > a && t < b));
        stops.push(a);
        // insert flux zeros between consecutive stops (descending order kept)
        let mut k = 0;
        while k + 1 < stops.len() {
            if let Some(z) = rhs.flux_zero(stops[k + 1], stops[k]) {
                stops.insert(k + 1, z);
                zeros.push(z);
                k += 1;
            }
            k += 1;
        }
        zeros.extend(stops.iter().copied().filter(|&x| rhs.flux(x) == 0.0));
        segments.push(stops.clone());
    }
    // Away from a zero the solution is smooth but its derivatives blow up
    // like a power of the distance, so steps shrink in proportion to it.
    let steps_for = |lo: f64, hi: f64| {
        let d = zeros
            .iter()
            .map(|&z| if z < lo { lo - z } else if z > hi { z - hi } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
        let m = (hi - lo) / (ZERO_PROXIMITY * d);
        if m.is_finite() && m > config.ode_steps as f64 {
            (m as usize + 1).min(MAX_SEGMENT_STEPS)
        } else {
            config.ode_steps
        }
    };
    'cells: for (i, stops) in (0..n).rev().zip(&segments) {
        for w in stops.windows(2) {
            let (sf, st) = (is_zero_of(&rhs, w[0]), is_zero_of(&rhs, w[1]));
            let steps = if sf || st { config.ode_steps } else { steps_for(w[1], w[0]) };
            match rhs.advance_graded(w[0], w[1], cur, sf, st, steps) {
                Some(v) => cur = v,
                None => {
                    feasible = false;
                    break 'cells;
                }
            }
        }
        u[i] = cur;
        if !(cur + spec.head() > rhs.guard) {
            feasible = false;
            break;
        }
    }
    let du = if feasible {
        (0..=n).map(|i| rhs.eval(nodes[i], u[i]).unwrap_or(f64::NAN)).collect()
    } else {
        Vec::new()
    };
    Trajectory { s, kappa, endpoint: if feasible { u[0] } else { f64::NAN }, u, du, feasible }
}

/// True when the flux vanishes at `x` or changes sign within a relative
/// round-off neighbourhood of it.
fn is_zero_of(rhs: &Rhs<'_>, x: f64) -> bool {
    let eps = 4.0 * f64::EPSILON * x.abs().max(1.0);
    let (l, c, r) = (rhs.flux(x - eps), rhs.flux(x), rhs.flux(x + eps));
    c == 0.0 || l * r < 0.0
}

/// Result of a shooting solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadySolution {
    pub profile: SolutionProfile,
    /// Every root found in the scanned bracket, the primary one included.
    pub roots: Vec<f64>,
    /// Final bracket that was scanned.
    pub bracket: (f64, f64),
    /// Number of trajectory integrations performed.
    pub evaluations: usize,
}

/// Signed endpoint used for bracketing: infeasible trajectories count as negative.
fn signed_endpoint(t: &Trajectory) -> f64 {
    if t.feasible {
        t.endpoint
    } else {
        f64::NEG_INFINITY
    }
}

/// Finds `s` with `u(-1) = 0` and returns the corresponding profile.
///
/// The bracket is scanned for sign changes of the endpoint (doubling it until
/// one is found), each sign change is bisected and then polished by one secant
/// step, and the root of smallest magnitude becomes the primary solution.
pub fn solve_steady(spec: &ProblemSpec, config: &ShooterConfig, grid: &Grid) -> Result<SteadySolution> {
    config.validate()?;
    let spec = &spec.normalized();
    let mut evaluations = 0usize;
    let mut shoot = |s: f64| {
        evaluations += 1;
        integrate_profile(spec, s, grid, config)
    };

    let (mut lo, mut hi) = config.bracket_init;
    let mut expansions = 0;
    let mut any_feasible = false;
    let (samples, changes) = loop {
        let m = config.scan_samples;
        let samples: Vec<(f64, f64)> = (0..m)
            .map(|k| {
                let s = lo + (hi - lo) * k as f64 / (m - 1) as f64;
                let t = shoot(s);
                (s, signed_endpoint(&t))
            })
            .collect();
        any_feasible |= samples.iter().any(|&(_, e)| e.is_finite());
        let mut changes = Vec::new();
        for k in 0..samples.len() {
            if samples[k].1 == 0.0 {
                changes.push((k, k));
            } else if k + 1 < samples.len()
                && samples[k + 1].1 != 0.0
                && (samples[k].1 > 0.0) != (samples[k + 1].1 > 0.0)
            {
                changes.push((k, k + 1));
            }
        }
        if !changes.is_empty() {
            break (samples, changes);
        }
        if expansions >= config.max_expansions {
            return Err(if any_feasible { Error::NoBracket { lo, hi } } else { Error::Infeasible });
        }
        let mid = 0.5 * (lo + hi);
        let half = hi - lo;
        lo = mid - half;
        hi = mid + half;
        expansions += 1;
    };

    let mut roots: Vec<(f64, f64)> = Vec::new();
    for &(ka, kb) in &changes {
        let (mut a, mut ea) = samples[ka];
        let (mut b, mut eb) = samples[kb];
        if ka == kb {
            roots.push((a, 0.0));
            continue;
        }
        while (b - a).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
            let m = 0.5 * (a + b);
            if m <= a.min(b) || m >= a.max(b) {
                break;
            }
            let em = signed_endpoint(&shoot(m));
            if em == 0.0 {
                a = m;
                ea = 0.0;
                b = m;
                eb = 0.0;
                break;
            }
            if (em > 0.0) == (ea > 0.0) {
                a = m;
                ea = em;
            } else {
                b = m;
                eb = em;
            }
        }
        let mut best = if ea.abs() <= eb.abs() { (a, ea) } else { (b, eb) };
        if ea.is_finite() && eb.is_finite() && ea != eb {
            let sec = b - eb * (b - a) / (eb - ea);
            if sec.is_finite() {
                let es = signed_endpoint(&shoot(sec));
                if es.is_finite() && es.abs() < best.1.abs() {
                    best = (sec, es);
                }
            }
        }
        roots.push(best);
    }
    // sign changes against infeasible trial slopes may bisect onto the
    // feasibility threshold instead of a root; those are discarded here
    let worst = roots.iter().map(|r| r.1.abs()).fold(f64::INFINITY, f64::min);
    roots.retain(|r| r.1.abs() <= config.root_tol);
    if roots.is_empty() {
        return Err(Error::Tolerance { residual: worst });
    }
    roots.sort_by(|x, y| x.0.abs().total_cmp(&y.0.abs()));
    let s_star = roots[0].0;
    let traj = shoot(s_star);
    let profile = profile_from_trajectory(spec, grid, traj);
    Ok(SteadySolution {
        profile,
        roots: roots.iter().map(|r| r.0).collect(),
        bracket: (lo, hi),
        evaluations,
    })
}

fn profile_from_trajectory(spec: &ProblemSpec, grid: &Grid, t: Trajectory) -> SolutionProfile {
    let min_head = t.u.iter().map(|&v| v + spec.head()).fold(f64::INFINITY, f64::min);
    let mut profile = SolutionProfile {
        grid: grid.clone(),
        u: t.u,
        du: t.du,
        s_end: t.s,
        kappa: t.kappa,
        residual_first_order: 0.0,
        min_head,
    };
    profile.residual_first_order = first_order_residual(spec, &profile);
    profile
}

/// `max_i |(u_i + H) Φ_p(u'_i cos φ + sin φ) - κ - F(x_i)|` with `κ` taken from the profile.
pub fn first_order_residual(spec: &ProblemSpec, profile: &SolutionProfile) -> f64 {
    let nodes = profile.grid.nodes();
    (0..nodes.len())
        .map(|i| {
            let flux = (profile.u[i] + spec.head())
                * phi_pow(spec.p(), profile.du[i] * spec.cos_phi() + spec.sin_phi());
            (flux - profile.kappa - spec.source().tail_unchecked(nodes[i])).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::SourceFunction;

    fn golden() -> ProblemSpec {
        ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.05)).unwrap()
    }

    #[test]
    fn zero_source_gives_zero_profile() {
        let spec = ProblemSpec::new(3.0, 1.0, 0.3, SourceFunction::zero()).unwrap();
        let grid = Grid::uniform(64).unwrap();
        let cfg = ShooterConfig::default();
        let t = integrate_profile(&spec, 0.0, &grid, &cfg);
        assert!(t.feasible);
        assert!(t.u.iter().all(|v| v.abs() < 1e-15));
        let t = integrate_profile(&spec, 0.1, &grid, &cfg);
        assert!(!t.feasible || t.endpoint.abs() > 1e-3);
        let sol = solve_steady(&spec, &cfg, &grid).unwrap();
        assert!(sol.profile.s_end.abs() < 1e-12);
        assert!(sol.profile.sup_norm() < 1e-10);
    }

    #[test]
    fn golden_scenario_solves_with_tiny_residual() {
        let spec = golden();
        let grid = Grid::uniform(256).unwrap();
        let sol = solve_steady(&spec, &ShooterConfig::default(), &grid).unwrap();
        let p = &sol.profile;
        assert!(p.u[0].abs() <= 1e-9 && p.u[256] == 0.0);
        assert!(p.residual_first_order <= 1e-8 * (1.0 + spec.source_l1()));
        assert!(p.min_head > 0.0);
        assert_eq!(p.kappa, kappa_for(&spec, p.s_end));
        assert!(p.interior_min() > 0.0);
    }

    #[test]
    fn residual_detects_perturbation() {
        let spec = golden();
        let grid = Grid::uniform(128).unwrap();
        let mut p = solve_steady(&spec, &ShooterConfig::default(), &grid).unwrap().profile;
        for (i, &x) in grid.nodes().iter().enumerate() {
            p.u[i] += 1e-3 * (1.0 - x * x);
            p.du[i] -= 2e-3 * x;
        }
        assert!(first_order_residual(&spec, &p) > 1e-4);
    }

    #[test]
    fn conductivity_rescales_source() {
        let base = golden();
        let scaled = ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.1))
            .unwrap()
            .with_conductivity(2.0)
            .unwrap();
        let grid = Grid::uniform(64).unwrap();
        let cfg = ShooterConfig::default();
        let a = solve_steady(&base, &cfg, &grid).unwrap().profile;
        let b = solve_steady(&scaled, &cfg, &grid).unwrap().profile;
        assert!((a.s_end - b.s_end).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = ShooterConfig { root_tol: 0.0, ..ShooterConfig::default() };
        assert!(solve_steady(&golden(), &cfg, &Grid::uniform(16).unwrap()).is_err());
    }
}
