//! Serializable records of kernel results and the text table printed by `verify`.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use slopeflow_core::verify::{Check, VerificationReport};
use slopeflow_core::BoundsReport;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: &'static str,
    pub status: &'static str,
    /// Values that decided the check; `null` marks an unavailable value.
    pub witness: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            anchor: c.anchor,
            status: c.status.name(),
            witness: c.witness.iter().copied().collect(),
            note: c.note.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub scenario: String,
    pub scenario_hash: String,
    pub passed: bool,
    pub counts: Counts,
    pub checks: Vec<CheckRecord>,
    pub tolerances: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

impl Counts {
    pub fn of(checks: &[Check]) -> Self {
        let mut c = Counts::default();
        for check in checks {
            match check.status {
                slopeflow_core::verify::Status::Pass => c.pass += 1,
                slopeflow_core::verify::Status::Fail => c.fail += 1,
                slopeflow_core::verify::Status::Skip => c.skip += 1,
            }
        }
        c
    }
}

impl VerificationRecord {
    pub fn new(report: &VerificationReport, scenario_hash: String) -> Self {
        VerificationRecord {
            scenario: report.scenario.clone(),
            scenario_hash,
            passed: report.all_passed(),
            counts: Counts::of(&report.checks),
            checks: report.checks.iter().map(CheckRecord::from).collect(),
            tolerances: report.tolerances.iter().copied().collect(),
        }
    }
}

/// Flat form of [`BoundsReport`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundsRecord {
    pub hf_verdict: &'static str,
    pub hf_min_value: f64,
    pub hf_argmin_x0: f64,
    pub hf_argmin_x: f64,
    pub hf_grid_min: f64,
    pub hf_fast_path: bool,
    pub sup_bound: f64,
    pub existence_ok: bool,
    pub margin_beta: f64,
    pub k_prime: Option<f64>,
    pub du_end_bound_pos: f64,
    pub du_end_bound_neg: f64,
    pub du_uniform_bound: Option<f64>,
}

impl From<&BoundsReport> for BoundsRecord {
    fn from(b: &BoundsReport) -> Self {
        BoundsRecord {
            hf_verdict: b.hf.verdict.name(),
            hf_min_value: b.hf.min_value,
            hf_argmin_x0: b.hf.argmin.0,
            hf_argmin_x: b.hf.argmin.1,
            hf_grid_min: b.hf.grid_min,
            hf_fast_path: b.hf.fast_path,
            sup_bound: b.sup_bound,
            existence_ok: b.existence_ok,
            margin_beta: b.margin_beta,
            k_prime: b.k_prime,
            du_end_bound_pos: b.du_end_bound_pos,
            du_end_bound_neg: b.du_end_bound_neg,
            du_uniform_bound: b.du_uniform_bound,
        }
    }
}

/// Human-readable table of a report, one row per check.
pub fn table(report: &VerificationReport) -> String {
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "scenario {}", report.scenario);
    let _ = writeln!(out, "{:<width$}  {:<6}  detail", "check", "result");
    for c in &report.checks {
        let detail = if c.note.is_empty() {
            c.witness.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect::<Vec<_>>().join(" ")
        } else {
            c.note.clone()
        };
        let _ = writeln!(out, "{:<width$}  {:<6}  {detail}", c.name, c.status.name());
    }
    let counts = Counts::of(&report.checks);
    let _ = writeln!(out, "{} passed, {} failed, {} skipped", counts.pass, counts.fail, counts.skip);
    out
}
