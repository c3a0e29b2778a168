//! Acceptance gate: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the lines reach the terminal as they
//! are produced. The process exits nonzero if any criterion fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slopeflow::suite::{self, Solved};
use slopeflow::ScenarioConfig;
use slopeflow_core::greens::{constant_table, fixed_point_check};
use slopeflow_core::hypothesis::existence_condition;
use slopeflow_core::linearize::{build_diffusion, lemma_half_bound};
use slopeflow_core::oracle::{compare_profiles, solve_fd, FdConfig};
use slopeflow_core::steady::{first_order_residual, solve_steady, ShooterConfig};
use slopeflow_core::transient::{run, TransientConfig, TransientState};
use slopeflow_core::verify::{self, Tolerances};
use slopeflow_core::{Grid, ProblemSpec, SolutionProfile, SourceFunction};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn scenarios() -> Vec<ScenarioConfig> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| ScenarioConfig::load(p).unwrap()).collect()
}

fn with_cells(cfg: &ScenarioConfig, n: usize) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.grid.n_cells = n;
    c
}

fn golden() -> ProblemSpec {
    ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.05)).unwrap()
}

/// Same geometry as the golden scenario with a flux that keeps one sign.
fn smooth() -> ProblemSpec {
    ProblemSpec::new(3.0, 1.0, 0.2, SourceFunction::constant(0.01)).unwrap()
}

fn shoot(spec: &ProblemSpec, n: usize) -> SolutionProfile {
    solve_steady(spec, &ShooterConfig::default(), &Grid::uniform(n).unwrap()).unwrap().profile
}

fn fd(spec: &ProblemSpec, n: usize) -> SolutionProfile {
    solve_fd(spec, &FdConfig { n_cells: n, ..FdConfig::default() }, None).unwrap().profile
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn fmt_orders(o: &[f64]) -> String {
    o.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join("/")
}

/// `(sin φ)^{p-2} cos φ`, evaluated here independently of the kernel.
fn slope_scale(s: &ProblemSpec) -> f64 {
    s.phi().sin().powf(s.p() - 2.0) * s.phi().cos()
}

fn solved_suite(n: usize) -> Vec<(ScenarioConfig, Solved)> {
    scenarios()
        .into_iter()
        .map(|c| {
            let c = with_cells(&c, n);
            let s = suite::solve(&c).unwrap();
            (c, s)
        })
        .collect()
}

fn c1_sup_bound() -> Outcome {
    let start = Instant::now();
    let solved = solved_suite(2048);
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for (_, s) in &solved {
        if !s.bounds.hf_holds() {
            continue;
        }
        count += 1;
        let bound = s.spec.source_l1() / s.spec.phi().sin().powf(s.spec.p() - 1.0);
        let sup = s.steady.profile.sup_norm();
        pass &= sup <= bound + 1e-9;
        if bound > 0.0 {
            worst = worst.max(sup / bound);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pass && count >= 20 && secs < 30.0,
        format!("{count} scenarios with HF, max ||u||/bound = {worst:.3}, {secs:.1} s"),
    )
}

fn c2_no_touch() -> Outcome {
    let solved = solved_suite(2048);
    let signed = solved.iter().filter(|(_, s)| !s.spec.source_nonnegative() && s.bounds.hf_holds()).count();
    let min = solved.iter().map(|(_, s)| s.steady.profile.min_head).fold(f64::INFINITY, f64::min);
    outcome(min > 0.0 && signed > 0, format!("{} scenarios ({signed} sign-changing with HF), min u+H = {min:.4}", solved.len()))
}

fn c3_first_order() -> Outcome {
    let ns = [128, 256, 512, 1024];
    let res: Vec<f64> = ns.iter().map(|&n| first_order_residual(&smooth(), &fd(&smooth(), n))).collect();
    let o = orders(&res);
    let golden_o = orders(&ns.iter().map(|&n| first_order_residual(&golden(), &fd(&golden(), n))).collect::<Vec<_>>());
    let mut worst_ratio: f64 = 0.0;
    for (_, s) in solved_suite(2048) {
        let bound = 1e-8 * (1.0 + s.spec.source_l1());
        worst_ratio = worst_ratio.max(s.steady.profile.residual_first_order / bound);
    }
    let g = shoot(&golden(), 2048).residual_first_order / (1e-8 * 1.1);
    worst_ratio = worst_ratio.max(g);
    outcome(
        o.iter().all(|&v| v >= 1.9) && worst_ratio <= 1.0,
        format!(
            "FD residual orders {} (smooth companion; golden {}), shooting residual <= {worst_ratio:.1e} of bound",
            fmt_orders(&o),
            fmt_orders(&golden_o)
        ),
    )
}

fn c4_oracle() -> Outcome {
    let (a, b) = (shoot(&golden(), 1024), fd(&golden(), 1024));
    let sup = compare_profiles(&a, &b).unwrap().0;
    let threshold = 5e-5 * (1.0 + a.sup_norm());
    let ns = [128, 256, 512, 1024];
    let reference = shoot(&smooth(), 4096);
    let dist: Vec<f64> = ns.iter().map(|&n| compare_profiles(&reference, &fd(&smooth(), n)).unwrap().0).collect();
    let o = orders(&dist);
    let gref = shoot(&golden(), 4096);
    let gdist: Vec<f64> = ns.iter().map(|&n| compare_profiles(&gref, &fd(&golden(), n)).unwrap().0).collect();
    outcome(
        sup <= threshold && o.iter().all(|&v| v >= 1.9),
        format!(
            "golden sup distance {sup:.2e} <= {threshold:.2e} at n=1024; orders {} (smooth companion; golden {})",
            fmt_orders(&o),
            fmt_orders(&orders(&gdist))
        ),
    )
}

fn c5_fixed_point() -> Outcome {
    let mut worst = [0.0f64; 2];
    let mut count = 0;
    for (k, (n, tol)) in [(1024, 1e-4), (2048, 1e-5)].into_iter().enumerate() {
        for (_, s) in solved_suite(n) {
            if s.spec.p() <= 2.0 {
                continue;
            }
            if k == 0 {
                count += 1;
            }
            let fp = fixed_point_check(&s.spec, &s.steady.profile, 0).unwrap();
            worst[k] = worst[k].max(fp.discrepancy / tol);
        }
    }
    outcome(
        worst[0] <= 1.0 && worst[1] <= 1.0,
        format!("{count} scenarios, max discrepancy/tol {:.2e} (n=1024) {:.2e} (n=2048)", worst[0], worst[1]),
    )
}

fn c6_floors() -> Outcome {
    let mut pass = true;
    let (mut nonneg, mut kp) = (0, 0);
    for (_, s) in solved_suite(1024) {
        if s.spec.p() <= 2.0 {
            continue;
        }
        let d = build_diffusion(&s.spec, &s.steady.profile).unwrap();
        let min = d.min();
        let h = s.spec.head();
        if s.spec.source_nonnegative() {
            nonneg += 1;
            pass &= min >= 0.5 * h * slope_scale(&s.spec);
        }
        let lam = s.spec.phi().sin().powf(s.spec.p() - 1.0);
        let l1 = s.spec.source_l1();
        if l1 < h * lam {
            kp += 1;
            pass &= min >= 0.5 * (h - l1 / lam) * slope_scale(&s.spec);
        }
    }
    outcome(pass, format!("{nonneg} scenarios against the f >= 0 floor, {kp} against K'"))
}

/// `G` for `-d0 u'' - λ u' = δ_y` as `α w1` / `β w2` from continuity and the jump.
fn constant_green(d0: f64, lambda: f64, x: f64, y: f64) -> f64 {
    let a = lambda / d0;
    let w1 = |s: f64| 1.0 - (-a * (s + 1.0)).exp();
    let w2 = |s: f64| 1.0 - (a * (1.0 - s)).exp();
    let dw1 = |s: f64| a * (-a * (s + 1.0)).exp();
    let dw2 = |s: f64| a * (a * (1.0 - s)).exp();
    let (m11, m12, m21, m22) = (w1(y), -w2(y), -dw1(y), dw2(y));
    let det = m11 * m22 - m12 * m21;
    let rhs = -1.0 / d0;
    if x <= y {
        -m12 * rhs / det * w1(x)
    } else {
        m11 * rhs / det * w2(x)
    }
}

fn c7_green() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pass = true;
    let (mut count, mut min_g) = (0, f64::INFINITY);
    for (_, s) in solved_suite(1024) {
        if s.spec.p() <= 2.0 {
            continue;
        }
        count += 1;
        let fp = fixed_point_check(&s.spec, &s.steady.profile, 0).unwrap();
        let (g, _) = fp.table.positivity_scan();
        min_g = min_g.min(g);
        let kappa = fp.table.lipschitz_estimate(8);
        let triples = suite::random_triples(&mut rng, 10_000);
        pass &= g > 0.0 && verify::lipschitz_check(&fp.table, kappa, &triples, 1e-8).passed();
    }
    let mut err: f64 = 0.0;
    for (d0, lambda) in [(0.5, 0.5), (0.2, 0.05), (1.3, 0.9)] {
        let table = constant_table(d0, lambda, 256, 0).unwrap();
        for i in 0..=60 {
            for j in 0..=60 {
                let (x, y) = (-1.0 + i as f64 / 30.0, -1.0 + j as f64 / 30.0);
                err = err.max((table.green_eval(x, y).unwrap() - constant_green(d0, lambda, x, y)).abs());
            }
        }
    }
    outcome(
        pass && err <= 1e-8,
        format!("{count} scenarios, min interior G {min_g:.2e}, 1e4 triples each, constant-D error {err:.1e}"),
    )
}

fn c8_max_principles() -> Outcome {
    let mut pass = true;
    let tol = Tolerances::default();
    let (mut wmp, mut smp) = (0, 0);
    let mut compact_outside = f64::NAN;
    for (c, s) in solved_suite(2048) {
        let u = &s.steady.profile;
        if s.spec.source_nonnegative() {
            wmp += 1;
            pass &= verify::wmp_check(&s.spec, u).passed();
        }
        if s.spec.source_nonnegative() && !s.spec.source().is_zero() {
            smp += 1;
            let fp = fixed_point_check(&s.spec, u, 0).unwrap();
            pass &= verify::smp_check(&s.spec, u, &fp.table, 1e-5).passed();
            if c.name == "compact_support" {
                // positivity outside the support [0, 0.5]
                let x = u.grid.nodes();
                compact_outside = (1..x.len() - 1)
                    .filter(|&i| x[i] < 0.0 || x[i] > 0.5)
                    .map(|i| u.u[i])
                    .fold(f64::INFINITY, f64::min);
            }
        }
    }
    // injected violations
    let spec = golden();
    let mut dipped = shoot(&spec, 256);
    let mid = dipped.u.len() / 2;
    dipped.u[mid] = -1e-6;
    let wmp_dual = verify::wmp_check(&spec, &dipped).failed();
    let mut flat = shoot(&spec, 256);
    flat.u[mid] = 0.0;
    let fp = fixed_point_check(&spec, &shoot(&spec, 256), 0).unwrap();
    let smp_dual = verify::smp_check(&spec, &flat, &fp.table, tol.fixed_point).failed();
    outcome(
        pass && compact_outside > 0.0 && wmp_dual && smp_dual,
        format!(
            "WMP on {wmp}, SMP on {smp} scenarios, compact-support min u off support {compact_outside:.2e}, duals fail: {}",
            wmp_dual && smp_dual
        ),
    )
}

fn c9_half_bound() -> Outcome {
    let a: Vec<f64> = (0..=10_000).map(|k| -50.0 + 0.01 * k as f64).collect();
    let p: Vec<f64> = (1..=120).map(|k| 2.0 + 0.05 * k as f64).collect();
    let scan = verify::half_bound_scan(&a, &p);
    let v3 = lemma_half_bound(-2.0, 3.0).unwrap();
    let v25 = lemma_half_bound(-2.0, 2.5).unwrap();
    let spots = (v3 - 1.0).abs() <= 1e-10 && (v25 - 1.0).abs() <= 1e-10;
    outcome(
        scan.passed() && spots,
        format!(
            "{} samples, min {:.4}, spot errors {:.1e} {:.1e}",
            a.len() * p.len(),
            scan.witness[0].1,
            (v3 - 1.0).abs(),
            (v25 - 1.0).abs()
        ),
    )
}

fn c10_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let simon: Vec<(f64, f64, f64)> = (0..100_000)
        .map(|_| (rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0), rng.random_range(2.0..=6.0)))
        .collect();
    let simon = verify::simon_sweep(&simon);
    let mut mono_pass = true;
    let mut mono_min = f64::INFINITY;
    for _ in 0..100 {
        let (p, phi, h) = (rng.random_range(2.0..=6.0), rng.random_range(0.05..=1.5), rng.random_range(0.5..=2.0));
        let spec = ProblemSpec::new(p, h, phi, SourceFunction::zero()).unwrap();
        let samples: Vec<(f64, f64, f64)> = (0..1000)
            .map(|_| (rng.random_range(-2.0 * h..=2.0 * h), rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0)))
            .collect();
        let c = verify::monotonicity_sweep(&spec, 0.5 * h, &samples);
        mono_pass &= c.passed();
        mono_min = mono_min.min(c.witness[0].1);
    }
    let mut mu_err: f64 = 0.0;
    for phi in [0.05, 0.2, 0.5, 1.0, 1.4] {
        let mu = verify::coercivity_gap(2.0, phi).unwrap();
        mu_err = mu_err.max((mu - 0.5 * phi.tan() * phi.tan()).abs());
    }
    outcome(
        simon.passed() && mono_pass && mu_err <= 1e-10,
        format!(
            "Simon min margin {:.1e}, monotonicity min margin {mono_min:.1e} (1e5 each), p=2 mu error {mu_err:.1e}",
            simon.witness[0].1
        ),
    )
}

fn c11_transient() -> Outcome {
    let start = Instant::now();
    let spec = golden();
    let grid = Grid::uniform(512).unwrap();
    let target: Vec<f64> = shoot(&spec, 512).u.iter().map(|u| u + 1.0).collect();
    let state = TransientState::new(grid.clone(), vec![1.0; grid.len()], 1.0, 1.0).unwrap();
    let relax = run(&spec, &state, 10.0, None, Some(&target), &TransientConfig::default()).unwrap();
    let dist = relax.final_sup_distance.unwrap();
    let zero = golden().with_source(SourceFunction::zero());
    let state = TransientState::new(grid.clone(), vec![1.0; grid.len()], 1.0, 1.0).unwrap();
    let still = run(&zero, &state, 1.0, None, Some(&vec![1.0; grid.len()]), &TransientConfig::default()).unwrap();
    let moved = still.final_sup_distance.unwrap();
    let balance = relax.max_balance_error.max(still.max_balance_error);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        dist <= 1e-3 && moved == 0.0 && balance <= 1e-12 && secs < 120.0,
        format!(
            "distance to u+H {dist:.2e} at T=10 ({} steps), f=0 drift {moved:e}, balance {balance:.1e}, {secs:.1} s",
            relax.steps
        ),
    )
}

fn c12_derivatives() -> Outcome {
    let tol = Tolerances::default();
    let mut pass = true;
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (c, s) in solved_suite(2048) {
        if s.spec.p() <= 2.0 || !existence_condition(&s.spec) {
            continue;
        }
        count += 1;
        let u = &s.steady.profile;
        let d = build_diffusion(&s.spec, u).unwrap();
        for check in verify::derivative_checks(&s.spec, u, &d, c.problem.beta, tol.derivative_slack) {
            pass &= check.passed();
        }
        let end = s.spec.source_l1() / (s.spec.head() * slope_scale(&s.spec));
        let end = if u.s_end >= 0.0 { end } else { 2.0 * end };
        if end > 0.0 {
            worst = worst.max(u.s_end.abs() / end);
        }
        pass &= u.s_end.abs() <= end + tol.derivative_slack;
    }
    outcome(pass && count > 0, format!("{count} scenarios with beta margin, max |u'(1)|/bound = {worst:.3}"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("sup-norm bound", c1_sup_bound),
        ("no-touch bound", c2_no_touch),
        ("first-order identity", c3_first_order),
        ("oracle equivalence", c4_oracle),
        ("linearization fixed point", c5_fixed_point),
        ("diffusion floors", c6_floors),
        ("Green positivity and Lipschitz", c7_green),
        ("maximum principles", c8_max_principles),
        ("theta-integral bound", c9_half_bound),
        ("structural inequalities", c10_inequalities),
        ("transient relaxation", c11_transient),
        ("derivative bounds", c12_derivatives),
    ];
    let mut failed = 0;
    let mut err = std::io::stderr();
    for (k, (title, f)) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(f).unwrap_or_else(|_| outcome(false, "panicked".into()));
        failed += usize::from(!o.pass);
        let _ = writeln!(err, "acceptance {:>2} {} {title}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let _ = writeln!(err, "acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
