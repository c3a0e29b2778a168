//! The theorem suite run by `verify` and `sweep`.
//!
//! A scenario is solved once; every check then reads the same profile, its
//! diffusion coefficient and the Green's table built from it. Randomized
//! checks draw from a ChaCha stream seeded by the scenario seed, so a rerun
//! reproduces every sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slopeflow_core::greens::{fixed_point_check, FixedPointReport};
use slopeflow_core::hypothesis::bounds_report;
use slopeflow_core::linearize::lemma_half_bound;
use slopeflow_core::steady::{solve_steady, SteadySolution};
use slopeflow_core::verify::{self, Check, Tolerances, VerificationReport};
use slopeflow_core::{BoundsReport, Grid, ProblemSpec};

use crate::config::ScenarioConfig;
use crate::error::Result;

/// A solved scenario; `spec` is normalized to unit conductivity.
#[derive(Debug, Clone)]
pub struct Solved {
    pub spec: ProblemSpec,
    pub grid: Grid,
    pub bounds: BoundsReport,
    pub steady: SteadySolution,
}

pub fn solve(cfg: &ScenarioConfig) -> Result<Solved> {
    let spec = cfg.spec()?.normalized();
    let grid = cfg.grid()?;
    let bounds = bounds_report(&spec, cfg.grid.hf_resolution, cfg.problem.beta)?;
    let steady = solve_steady(&spec, &cfg.solver.shooter.to_core(), &grid)?;
    Ok(Solved { spec, grid, bounds, steady })
}

pub fn tolerances(cfg: &ScenarioConfig) -> Tolerances {
    Tolerances { fixed_point: cfg.verify.fixed_point_tol(cfg.grid.n_cells), ..Tolerances::default() }
}

/// Checks on the steady profile alone.
pub fn profile_checks(s: &Solved, tol: &Tolerances) -> Vec<Check> {
    let u = &s.steady.profile;
    let hf = s.bounds.hf_holds();
    vec![
        verify::sup_bound_check(&s.spec, u, hf, tol.sup_slack),
        verify::no_touch_check(u, hf),
        verify::first_order_check(&s.spec, u, tol.residual),
        verify::wmp_check(&s.spec, u),
    ]
}

const P_GATE: &str = "requires p > 2";

/// Checks that go through the linearization and its Green's function.
///
/// Returns the fixed-point report when `p > 2`.
pub fn green_checks(
    cfg: &ScenarioConfig,
    s: &Solved,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Check>, Option<FixedPointReport>)> {
    if !(s.spec.p() > 2.0) {
        let names = [
            ("diffusion_floor", "D(x) >= certified floor"),
            ("green_positivity", "G(x, y) > 0 on the open square"),
            ("green_lipschitz", "G(., y) is Lipschitz uniformly in y"),
            ("linearization_fixed_point", "u solves its own linearized problem"),
            ("strong_maximum_principle", "strong maximum principle: f >= 0, f != 0 implies u > 0 inside"),
            ("derivative_bounds", "bounds on u'(1) and ||u'||"),
        ];
        return Ok((names.iter().map(|(n, a)| Check::skip(n, a, P_GATE)).collect(), None));
    }
    let u = &s.steady.profile;
    let fp = fixed_point_check(&s.spec, u, cfg.green.matrix_cap)?;
    let mut checks = verify::diffusion_floor_checks(&s.spec, &fp.diffusion);
    checks.push(verify::green_positivity_check(&fp.table));
    let kappa = fp.table.lipschitz_estimate(cfg.green.lipschitz_samples);
    let triples = random_triples(rng, cfg.green.triples);
    checks.push(verify::lipschitz_check(&fp.table, kappa, &triples, tol.lipschitz_rel));
    checks.push(verify::fixed_point_check_of(fp.discrepancy, tol.fixed_point));
    checks.push(verify::smp_check(&s.spec, u, &fp.table, tol.fixed_point));
    checks.extend(verify::derivative_checks(&s.spec, u, &fp.diffusion, cfg.problem.beta, tol.derivative_slack));
    Ok((checks, Some(fp)))
}

/// `(s, t, y)` uniform on `[-1, 1]³`.
pub fn random_triples(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64, f64)> {
    (0..n)
        .map(|_| (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect()
}

/// Values of `a` and `p` for the dense scan of the θ-integral bound:
/// `a ∈ [-50, 50]` in steps of `0.05` and `p ∈ (2, 8]` in steps of `0.1`.
pub fn half_bound_grid() -> (Vec<f64>, Vec<f64>) {
    let a = (0..=2000).map(|k| -50.0 + 0.05 * k as f64).collect();
    let p = (1..=60).map(|k| 2.0 + 0.1 * k as f64).collect();
    (a, p)
}

/// Spot values `(p-1) ∫₀¹ |1 - 2θ|^{p-2} dθ = 1` at `p = 3` and `p = 2.5`.
pub fn half_bound_spot_check() -> Check {
    let v3 = lemma_half_bound(-2.0, 3.0).unwrap_or(f64::NAN);
    let v25 = lemma_half_bound(-2.0, 2.5).unwrap_or(f64::NAN);
    Check::new(
        "theta_half_bound_spot",
        "closed-form values at a = -2",
        (v3 - 1.0).abs() <= 1e-10 && (v25 - 1.0).abs() <= 1e-10,
        vec![("p3", v3), ("p2_5", v25)],
    )
}

/// Scalar inequalities that depend on the scenario only through `p`, `φ` and `H`.
pub fn scalar_checks(spec: &ProblemSpec, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (a, p) = half_bound_grid();
    let simon: Vec<(f64, f64, f64)> = (0..samples)
        .map(|_| (rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0), rng.random_range(2.0..=6.0)))
        .collect();
    let mut checks = vec![verify::half_bound_scan(&a, &p), half_bound_spot_check(), verify::simon_sweep(&simon)];
    let h = spec.head();
    if spec.p() >= 2.0 {
        let mono: Vec<(f64, f64, f64)> = (0..samples)
            .map(|_| (rng.random_range(-2.0 * h..=2.0 * h), rng.random_range(-5.0..=5.0), rng.random_range(-5.0..=5.0)))
            .collect();
        checks.push(verify::monotonicity_sweep(spec, 0.5 * h, &mono));
    } else {
        checks.push(Check::skip("main_part_monotonicity", "strong monotonicity of the main part in the gradient", "requires p >= 2"));
    }
    checks.push(verify::coercivity_quadratic_check(spec.phi(), 1e-10));
    checks
}

/// Outcome of the full suite on one scenario.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub solved: Solved,
    pub fixed_point: Option<FixedPointReport>,
    pub report: VerificationReport,
}

/// Solves `cfg` and runs every check; `scalar` adds the scalar inequality sweeps.
pub fn run_suite(cfg: &ScenarioConfig, scalar: bool) -> Result<SuiteOutcome> {
    let solved = solve(cfg)?;
    let tol = tolerances(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = profile_checks(&solved, &tol);
    let (green, fixed_point) = green_checks(cfg, &solved, &tol, &mut rng)?;
    checks.extend(green);
    if scalar {
        checks.extend(scalar_checks(&solved.spec, cfg.verify.inequality_samples, &mut rng));
    }
    let report = VerificationReport { scenario: cfg.name.clone(), checks, tolerances: tol.entries() };
    Ok(SuiteOutcome { solved, fixed_point, report })
}
