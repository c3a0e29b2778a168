//! Consistency of the transient scheme with the steady problem.

use slopeflow_core::steady::{solve_steady, ShooterConfig};
use slopeflow_core::transient::{flux, run, TransientConfig, TransientState};
use slopeflow_core::{Grid, ProblemSpec, SourceFunction};

fn golden() -> ProblemSpec {
    ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.05)).unwrap()
}

fn steady_thickness(spec: &ProblemSpec, grid: &Grid) -> Vec<f64> {
    let sol = solve_steady(spec, &ShooterConfig::default(), grid).unwrap();
    sol.profile.u.iter().map(|u| u + spec.head()).collect()
}

/// `max_j |Q_{j+1/2} + κ + F(x_{j+1/2})|` relative to `max |Q|` for ĥ = u + H.
fn flux_identity_error(spec: &ProblemSpec, n: usize) -> f64 {
    let grid = Grid::uniform(n).unwrap();
    let sol = solve_steady(spec, &ShooterConfig::default(), &grid).unwrap();
    let h: Vec<f64> = sol.profile.u.iter().map(|u| u + spec.head()).collect();
    let q = flux(spec, &grid, &h);
    let x = grid.nodes();
    let err = (0..x.len() - 1)
        .map(|j| {
            let mid = 0.5 * (x[j] + x[j + 1]);
            (q[j] + sol.profile.kappa + spec.source().tail(mid).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    err / q.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[test]
fn steady_flux_matches_the_first_order_identity() {
    // second order where the flux keeps its sign
    let smooth = ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.01)).unwrap();
    let (a, b) = (flux_identity_error(&smooth, 256), flux_identity_error(&smooth, 512));
    assert!(b <= 1e-6 && a / b >= 3.5, "{a:e} {b:e}");
    // the golden profile has a flux zero with unbounded curvature next to it
    assert!(flux_identity_error(&golden(), 512) <= 1e-3);
}

fn drift_over_unit_time(spec: &ProblemSpec) -> f64 {
    let grid = Grid::uniform(512).unwrap();
    let h = steady_thickness(spec, &grid);
    let state = TransientState::new(grid, h.clone(), spec.head(), spec.head()).unwrap();
    let summary = run(spec, &state, 1.0, None, Some(&h), &TransientConfig::default()).unwrap();
    assert!(summary.max_balance_error <= 1e-12);
    summary.final_sup_distance.unwrap()
}

#[test]
fn steady_initial_data_barely_drifts() {
    let smooth = ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.01)).unwrap();
    let d = drift_over_unit_time(&smooth);
    assert!(d <= 1e-6, "{d:e}");
    // discrete and exact steady states differ more next to a flux zero
    let d = drift_over_unit_time(&golden());
    assert!(d <= 1e-5, "{d:e}");
}

#[test]
fn halving_the_step_halves_the_time_error() {
    let spec = ProblemSpec::new(3.0, 1.0, 0.3, SourceFunction::constant(0.02)).unwrap();
    let grid = Grid::uniform(32).unwrap();
    let state = TransientState::new(grid.clone(), vec![1.0; grid.len()], 1.0, 1.0).unwrap();
    let final_state = |dt: f64| {
        let cfg = TransientConfig { dt_max: Some(dt), ..TransientConfig::default() };
        run(&spec, &state, 0.5, None, None, &cfg).unwrap().final_state.h_hat
    };
    let dt = 1e-4;
    let (a, b, c) = (final_state(dt), final_state(dt / 2.0), final_state(dt / 4.0));
    let d1 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let d2 = b.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let ratio = d1 / d2;
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}, differences {d1:e} {d2:e}");
}
