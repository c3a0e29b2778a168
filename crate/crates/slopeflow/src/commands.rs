//! Subcommands: each reads one scenario, writes its artifacts and returns
//! `Ok` only if every non-skipped check passed.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use slopeflow_core::greens::{constant_table, fixed_point_check, GreensTable};
use slopeflow_core::hypothesis::bounds_report;
use slopeflow_core::linearize::build_diffusion;
use slopeflow_core::oracle::{compare_profiles, solve_fd};
use slopeflow_core::steady::solve_steady;
use slopeflow_core::transient::{self, TransientState};
use slopeflow_core::verify::{self, Check, VerificationReport};
use slopeflow_core::{DiffusionProfile, Grid, SolutionProfile};

use crate::config::{InitialProfile, ScenarioConfig};
use crate::error::{Error, Result};
use crate::hash::{grid_hash, scenario_hash};
use crate::io::{artifact, ensure_dir, write_columns, write_f64_le, write_json};
use crate::report::{self, BoundsRecord, CheckRecord, Counts, VerificationRecord};
use crate::suite::{self, Solved};

/// Command-line overrides of the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

/// Environment variable overriding the output directory of the config.
pub const OUT_ENV: &str = "SLOPEFLOW_OUT";
/// Environment variable bounding the sweep worker pool.
pub const THREADS_ENV: &str = "SLOPEFLOW_THREADS";

/// Reads, overrides and validates a scenario.
pub fn load(path: &Path, ov: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(n) = ov.grid {
        cfg.grid.n_cells = n;
    }
    if let Some(seed) = ov.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(cfg)
}

/// `--out`, then `SLOPEFLOW_OUT`, then `outputs` of the config, then `out/`.
pub fn output_dir(cfg: Option<&ScenarioConfig>, ov: &Overrides) -> PathBuf {
    ov.out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.and_then(|c| c.outputs.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn gate(checks: &[Check], what: &str) -> Result<()> {
    let failed: Vec<&str> = checks.iter().filter(|c| c.failed()).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::ChecksFailed(format!("{what}: failed checks: {}", failed.join(", "))))
    }
}

fn records(checks: &[Check]) -> Vec<CheckRecord> {
    checks.iter().map(CheckRecord::from).collect()
}

fn write_profile(path: &Path, p: &SolutionProfile) -> Result<()> {
    write_columns(path, &["x", "u", "du"], &[p.grid.nodes(), &p.u, &p.du])
}

fn require_p_above_two(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.problem.p > 2.0 {
        Ok(())
    } else {
        Err(slopeflow_core::Error::UnsupportedExponent { p: cfg.problem.p }.into())
    }
}

#[derive(Serialize)]
struct SteadyRecord {
    s_end: f64,
    kappa: f64,
    roots: Vec<f64>,
    bracket: [f64; 2],
    evaluations: usize,
    sup_u: f64,
    sup_du: f64,
    min_head: f64,
    residual_first_order: f64,
}

#[derive(Serialize)]
struct OracleRecord {
    n_cells: usize,
    iterations: usize,
    residual: f64,
    sup_distance: f64,
    l2_distance: f64,
    threshold: f64,
    within_threshold: bool,
}

#[derive(Serialize)]
struct SteadyReport {
    scenario: String,
    scenario_hash: String,
    passed: bool,
    warnings: Vec<String>,
    steady: SteadyRecord,
    oracle: OracleRecord,
    checks: Vec<CheckRecord>,
}

/// Relative threshold of the shooting/oracle sup distance, per unit of `1 + ‖u‖∞`.
pub const ORACLE_AGREEMENT: f64 = 5e-5;

fn existence_warning(solved_bounds: &slopeflow_core::BoundsReport) -> Vec<String> {
    if solved_bounds.existence_ok {
        Vec::new()
    } else {
        vec!["existence condition ||f||_1 < H sin(phi)^(p-1) fails; it is only sufficient, so the solve was attempted".into()]
    }
}

/// Shooting solve, oracle solve, their distance and the a priori bounds.
pub fn cmd_steady(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let spec = cfg.spec()?.normalized();
    let grid = cfg.grid()?;
    let bounds = bounds_report(&spec, cfg.grid.hf_resolution, cfg.problem.beta)?;
    write_json(&out.join("bounds.json"), &BoundsRecord::from(&bounds))?;
    let warnings = existence_warning(&bounds);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let steady = solve_steady(&spec, &cfg.solver.shooter.to_core(), &grid)?;
    write_profile(&out.join("steady.csv"), &steady.profile)?;
    let fd_cfg = cfg.solver.fd.to_core(cfg.grid.n_cells);
    let oracle = solve_fd(&spec, &fd_cfg, None)?;
    write_profile(&out.join("oracle.csv"), &oracle.profile)?;
    let (sup_distance, l2_distance) = compare_profiles(&steady.profile, &oracle.profile)?;
    let u = &steady.profile;
    let threshold = ORACLE_AGREEMENT * (1.0 + u.sup_norm());

    let solved = Solved { spec, grid, bounds, steady: steady.clone() };
    let tol = suite::tolerances(cfg);
    let mut checks = suite::profile_checks(&solved, &tol);
    if solved.spec.p() > 2.0 {
        let d = build_diffusion(&solved.spec, u)?;
        checks.extend(verify::derivative_checks(&solved.spec, u, &d, cfg.problem.beta, tol.derivative_slack));
    }
    let report = SteadyReport {
        scenario: cfg.name.clone(),
        scenario_hash: scenario_hash(cfg),
        passed: !checks.iter().any(Check::failed),
        warnings,
        steady: SteadyRecord {
            s_end: u.s_end,
            kappa: u.kappa,
            roots: steady.roots.clone(),
            bracket: [steady.bracket.0, steady.bracket.1],
            evaluations: steady.evaluations,
            sup_u: u.sup_norm(),
            sup_du: u.du_sup_norm(),
            min_head: u.min_head,
            residual_first_order: u.residual_first_order,
        },
        oracle: OracleRecord {
            n_cells: fd_cfg.n_cells,
            iterations: oracle.iterations,
            residual: oracle.residual,
            sup_distance,
            l2_distance,
            threshold,
            within_threshold: sup_distance <= threshold,
        },
        checks: records(&checks),
    };
    write_json(&out.join("report.json"), &report)?;
    gate(&checks, &cfg.name)
}

/// `G` for `-d0 u'' - λ u' = f`, `u(±1) = 0`, from `w1 = 1 - e^{-a(x+1)}`,
/// `w2 = 1 - e^{a(1-x)}`, `a = λ/d0`: `G = -w1(min) w2(max) / (d0 W(y))`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantGreen {
    pub d0: f64,
    pub a: f64,
}

impl ConstantGreen {
    pub fn new(d0: f64, lambda: f64) -> Self {
        ConstantGreen { d0, a: lambda / d0 }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let a = self.a;
        let w1 = |s: f64| -(-a * (s + 1.0)).exp_m1();
        let w2 = |s: f64| -(a * (1.0 - s)).exp_m1();
        let wronskian = w1(y) * a * (a * (1.0 - y)).exp() - a * (-a * (y + 1.0)).exp() * w2(y);
        -w1(x.min(y)) * w2(x.max(y)) / (self.d0 * wronskian)
    }
}

/// Sup difference between `table` and the closed form on a 97 × 97 lattice.
pub fn closed_form_error(table: &GreensTable, exact: &ConstantGreen) -> f64 {
    let m = 97;
    let mut err: f64 = 0.0;
    for i in 0..=m {
        for j in 0..=m {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            let y = -1.0 + 2.0 * j as f64 / m as f64;
            let g = table.green_eval(x, y).unwrap_or(f64::NAN);
            err = err.max((g - exact.eval(x, y)).abs());
        }
    }
    err
}

/// Allowed closed-form error of the constant-coefficient table.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

#[derive(Serialize)]
struct DiffusionSidecar {
    floor_kind: &'static str,
    floor_value: f64,
    min_d: f64,
    max_jump: f64,
}

#[derive(Serialize)]
struct GreenHeader {
    n: usize,
    n_cells: usize,
    lambda: f64,
    grid_hash: String,
    layout: &'static str,
    indices: Vec<usize>,
}

#[derive(Serialize)]
struct GreenReport {
    scenario: String,
    scenario_hash: String,
    passed: bool,
    mode: &'static str,
    lambda: f64,
    kappa: f64,
    min_green: f64,
    fixed_point_discrepancy: Option<f64>,
    closed_form_error: Option<f64>,
    checks: Vec<CheckRecord>,
}

fn write_green_tables(out: &Path, d: &DiffusionProfile, table: &GreensTable, write_matrix: bool) -> Result<()> {
    let x = table.grid.nodes();
    write_columns(&out.join("diffusion.csv"), &["x", "D"], &[x, &d.d])?;
    write_json(
        &out.join("diffusion.json"),
        &DiffusionSidecar { floor_kind: d.floor_kind.name(), floor_value: d.floor_value, min_d: d.min(), max_jump: d.max_jump() },
    )?;
    write_columns(&out.join("weights.csv"), &["x", "e_minus", "e_plus"], &[x, &table.e_minus, &table.e_plus])?;
    if write_matrix && table.matrix.dim() > 0 {
        write_f64_le(&out.join("green.bin"), &table.matrix.values)?;
        write_json(
            &out.join("green.json"),
            &GreenHeader {
                n: table.matrix.dim(),
                n_cells: table.grid.n_cells(),
                lambda: table.lambda,
                grid_hash: grid_hash(x),
                layout: "row-major f64 little-endian, G(x_indices[i], x_indices[j])",
                indices: table.matrix.indices.clone(),
            },
        )?;
    }
    Ok(())
}

/// Diffusion coefficient, Green's table and its checks; `p > 2` only.
pub fn cmd_green(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    require_p_above_two(cfg)?;
    ensure_dir(out)?;
    let tol = suite::tolerances(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = cfg.spec()?.normalized();
    let lambda = spec.lambda();
    let (d, table, discrepancy, closed, mut checks) = match cfg.green.constant_diffusion {
        Some(d0) => {
            let table = constant_table(d0, lambda, cfg.grid.n_cells, cfg.green.matrix_cap)?;
            let err = closed_form_error(&table, &ConstantGreen::new(d0, lambda));
            let d = DiffusionProfile {
                grid: table.grid.clone(),
                d: table.diffusion(),
                floor_kind: slopeflow_core::FloorKind::MeasuredHead,
                floor_value: d0,
                head: 0.0,
            };
            let check = Check::new(
                "green_closed_form",
                "constant-coefficient table matches the closed form",
                err <= CLOSED_FORM_TOL,
                vec![("max_error", err), ("tolerance", CLOSED_FORM_TOL)],
            );
            (d, table, None, Some(err), vec![check])
        }
        None => {
            let solved = suite::solve(cfg)?;
            let fp = fixed_point_check(&solved.spec, &solved.steady.profile, cfg.green.matrix_cap)?;
            let mut checks = verify::diffusion_floor_checks(&solved.spec, &fp.diffusion);
            checks.push(verify::fixed_point_check_of(fp.discrepancy, tol.fixed_point));
            checks.push(verify::smp_check(&solved.spec, &solved.steady.profile, &fp.table, tol.fixed_point));
            (fp.diffusion, fp.table, Some(fp.discrepancy), None, checks)
        }
    };
    checks.push(verify::green_positivity_check(&table));
    let kappa = table.lipschitz_estimate(cfg.green.lipschitz_samples);
    let triples = suite::random_triples(&mut rng, cfg.green.triples);
    checks.push(verify::lipschitz_check(&table, kappa, &triples, tol.lipschitz_rel));
    write_green_tables(out, &d, &table, cfg.green.write_matrix)?;
    let report = GreenReport {
        scenario: cfg.name.clone(),
        scenario_hash: scenario_hash(cfg),
        passed: !checks.iter().any(Check::failed),
        mode: if closed.is_some() { "constant_diffusion" } else { "linearized" },
        lambda,
        kappa,
        min_green: table.positivity_scan().0,
        fixed_point_discrepancy: discrepancy,
        closed_form_error: closed,
        checks: records(&checks),
    };
    write_json(&out.join("green_report.json"), &report)?;
    gate(&checks, &cfg.name)
}

#[derive(Serialize)]
struct SnapshotRecord {
    index: usize,
    t: f64,
    file: String,
}

#[derive(Serialize)]
struct TransientSummary {
    scenario: String,
    scenario_hash: String,
    passed: bool,
    t_end: f64,
    n_cells: usize,
    steps: usize,
    clipped_mass: f64,
    max_balance_error: f64,
    final_sup_distance: Option<f64>,
    warnings: Vec<String>,
    snapshots: Vec<SnapshotRecord>,
    checks: Vec<CheckRecord>,
}

/// Allowed relative mass-balance error of a single step.
pub const MASS_BALANCE_TOL: f64 = 1e-12;

fn interpolate_samples(xs: &[f64], hs: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (x - x0) / (x1 - x0);
    hs[k - 1] + w * (hs[k] - hs[k - 1])
}

/// Explicit time integration from the configured initial thickness.
pub fn cmd_transient(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let t = cfg.transient.as_ref().ok_or_else(|| Error::Config("scenario has no transient section".into()))?;
    ensure_dir(out)?;
    let spec = cfg.spec()?;
    let head = spec.head();
    let n_cells = t.n_cells.unwrap_or(cfg.grid.n_cells);
    let grid = Grid::uniform(n_cells)?;
    let (h_minus, h_plus) = (t.h_minus.unwrap_or(head), t.h_plus.unwrap_or(head));
    let mut warnings = Vec::new();
    // a steady target exists only for equal ditch levels at `H`
    let steady = if h_minus == head && h_plus == head {
        match solve_steady(&spec, &cfg.solver.shooter.to_core(), &grid) {
            Ok(s) => Some(s.profile.u.iter().map(|u| u + head).collect::<Vec<f64>>()),
            Err(e) => {
                warnings.push(format!("no steady target: {e}"));
                None
            }
        }
    } else {
        warnings.push("ditch levels differ from H; no steady target".into());
        None
    };
    let h0: Vec<f64> = match &t.initial {
        InitialProfile::Constant { value } => vec![*value; grid.len()],
        InitialProfile::Steady => steady
            .clone()
            .ok_or_else(|| Error::Config("initial profile 'steady' needs a steady solution at equal levels H".into()))?,
        InitialProfile::Samples { x, h } => grid.nodes().iter().map(|&xi| interpolate_samples(x, h, xi)).collect(),
    };
    let state = TransientState::new(grid.clone(), h0, h_minus, h_plus)?;
    let run = transient::run(&spec, &state, t.t_end, t.snapshot_every, steady.as_deref(), &t.to_core())?;
    let snap_dir = out.join("snapshots");
    let mut snapshots = Vec::with_capacity(run.snapshots.len());
    for (index, (time, h)) in run.snapshots.iter().enumerate() {
        let file = format!("snapshot_{index:04}.csv");
        write_columns(&artifact(&snap_dir, &file)?, &["x", "h_hat"], &[grid.nodes(), h])?;
        snapshots.push(SnapshotRecord { index, t: *time, file: format!("snapshots/{file}") });
    }
    let checks = vec![Check::new(
        "mass_balance",
        "every step conserves mass up to boundary flux, source and clipping",
        run.max_balance_error <= MASS_BALANCE_TOL,
        vec![("max_balance_error", run.max_balance_error), ("tolerance", MASS_BALANCE_TOL)],
    )];
    let summary = TransientSummary {
        scenario: cfg.name.clone(),
        scenario_hash: scenario_hash(cfg),
        passed: !checks.iter().any(Check::failed),
        t_end: run.final_state.t,
        n_cells,
        steps: run.steps,
        clipped_mass: run.clipped_mass,
        max_balance_error: run.max_balance_error,
        final_sup_distance: run.final_sup_distance,
        warnings,
        snapshots,
        checks: records(&checks),
    };
    write_json(&out.join("summary.json"), &summary)?;
    gate(&checks, &cfg.name)
}

/// Worker pool sized by `SLOPEFLOW_THREADS`, defaulting to the logical cores.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

/// Scenario files of a directory in name order, or the single file given.
pub fn scenario_paths(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = std::fs::read_dir(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!("{} holds no scenario files", path.display())));
    }
    Ok(paths)
}

/// Theorem suite on one scenario: prints the table and writes `verify.json`.
pub fn verify_one(cfg: &ScenarioConfig, out: &Path) -> Result<VerificationReport> {
    ensure_dir(out)?;
    let outcome = suite::run_suite(cfg, true)?;
    write_json(&out.join("verify.json"), &VerificationRecord::new(&outcome.report, scenario_hash(cfg)))?;
    Ok(outcome.report)
}

#[derive(Serialize)]
struct VerifySummaryRow {
    scenario: String,
    scenario_hash: String,
    passed: bool,
    counts: Counts,
    error: Option<String>,
}

/// Runs the suite on a scenario file, or on every scenario of a directory
/// (each into its own subdirectory of `out`).
pub fn cmd_verify(path: &Path, ov: &Overrides) -> Result<()> {
    let paths = scenario_paths(path)?;
    let configs = paths.iter().map(|p| load(p, ov)).collect::<Result<Vec<_>>>()?;
    if !path.is_dir() {
        let cfg = &configs[0];
        let report = verify_one(cfg, &output_dir(Some(cfg), ov))?;
        print!("{}", report::table(&report));
        return gate(&report.checks, &cfg.name);
    }
    let root = output_dir(None, ov);
    let pool = thread_pool()?;
    let results: Vec<Result<VerificationReport>> =
        pool.install(|| configs.par_iter().map(|cfg| verify_one(cfg, &root.join(&cfg.name))).collect());
    let mut rows = Vec::with_capacity(configs.len());
    let mut bad = Vec::new();
    for (cfg, res) in configs.iter().zip(results) {
        let hash = scenario_hash(cfg);
        match res {
            Ok(report) => {
                print!("{}", report::table(&report));
                println!();
                if !report.all_passed() {
                    bad.push(cfg.name.clone());
                }
                rows.push(VerifySummaryRow {
                    scenario: cfg.name.clone(),
                    scenario_hash: hash,
                    passed: report.all_passed(),
                    counts: Counts::of(&report.checks),
                    error: None,
                });
            }
            Err(e) => {
                eprintln!("{}: {e}", cfg.name);
                bad.push(cfg.name.clone());
                rows.push(VerifySummaryRow {
                    scenario: cfg.name.clone(),
                    scenario_hash: hash,
                    passed: false,
                    counts: Counts::default(),
                    error: Some(e.to_string()),
                });
            }
        }
    }
    write_json(&artifact(&root, "verify_summary.json")?, &rows)?;
    println!("{} of {} scenarios passed", rows.len() - bad.len(), rows.len());
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::ChecksFailed(format!("scenarios with failures: {}", bad.join(", "))))
    }
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub p: f64,
    pub phi: f64,
    pub amplitude: f64,
    pub status: String,
    pub s_end: Option<f64>,
    pub sup_u: Option<f64>,
    pub min_head: Option<f64>,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub message: String,
}

/// The sweep points in `p`-major order.
pub fn sweep_points(cfg: &ScenarioConfig) -> Result<Vec<(f64, f64, f64)>> {
    let s = cfg.sweep.as_ref().ok_or_else(|| Error::Config("scenario has no sweep section".into()))?;
    let mut pts = Vec::with_capacity(s.p.len() * s.phi.len() * s.amplitude.len());
    for &p in &s.p {
        for &phi in &s.phi {
            for &a in &s.amplitude {
                pts.push((p, phi, a));
            }
        }
    }
    Ok(pts)
}

fn sweep_point(cfg: &ScenarioConfig, index: usize, (p, phi, a): (f64, f64, f64)) -> SweepRow {
    let mut point = cfg.clone();
    point.name = format!("{}#{index}", cfg.name);
    point.problem.p = p;
    point.problem.phi = phi;
    for piece in &mut point.problem.source {
        for c in &mut piece.coeffs {
            *c *= a;
        }
    }
    point.sweep = None;
    let mut row = SweepRow {
        index,
        p,
        phi,
        amplitude: a,
        status: String::new(),
        s_end: None,
        sup_u: None,
        min_head: None,
        pass: 0,
        fail: 0,
        skip: 0,
        message: String::new(),
    };
    match point.validate().and_then(|_| suite::run_suite(&point, false)) {
        Ok(outcome) => {
            let u = &outcome.solved.steady.profile;
            let counts = Counts::of(&outcome.report.checks);
            row.status = if counts.fail == 0 { "pass" } else { "fail" }.into();
            row.s_end = Some(u.s_end);
            row.sup_u = Some(u.sup_norm());
            row.min_head = Some(u.min_head);
            (row.pass, row.fail, row.skip) = (counts.pass, counts.fail, counts.skip);
            row.message = outcome.report.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(";");
        }
        Err(e) => {
            row.status = match e.exit_code() {
                2 => "config_error",
                3 => "unsupported",
                _ => "solver_error",
            }
            .into();
            row.message = e.to_string();
        }
    }
    row
}

/// Evaluates every sweep point in parallel; rows keep the enumeration order.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let points = sweep_points(cfg)?;
    let pool = thread_pool()?;
    Ok(pool.install(|| points.par_iter().enumerate().map(|(i, &pt)| sweep_point(cfg, i, pt)).collect()))
}

fn opt(v: Option<f64>) -> String {
    v.map(crate::io::fmt_f64).unwrap_or_default()
}

/// Writes `sweep.csv` and `sweep.json`.
pub fn cmd_sweep(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let rows = run_sweep(cfg)?;
    ensure_dir(out)?;
    let path = out.join("sweep.csv");
    let csv_err = |source| Error::Csv { path: path.clone(), source };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(["index", "p", "phi", "amplitude", "status", "s_end", "sup_u", "min_head", "pass", "fail", "skip", "message"])
        .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.index.to_string(),
            crate::io::fmt_f64(r.p),
            crate::io::fmt_f64(r.phi),
            crate::io::fmt_f64(r.amplitude),
            r.status.clone(),
            opt(r.s_end),
            opt(r.sup_u),
            opt(r.min_head),
            r.pass.to_string(),
            r.fail.to_string(),
            r.skip.to_string(),
            r.message.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.clone(), source })?;
    write_json(&out.join("sweep.json"), &rows)?;
    let bad: Vec<String> = rows.iter().filter(|r| r.status != "pass").map(|r| r.index.to_string()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::ChecksFailed(format!("sweep points without a pass: {}", bad.join(", "))))
    }
}
