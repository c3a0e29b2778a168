//! Maximum principles and the structural inequalities behind the existence
//! theory, as executable checks.
//!
//! Each check returns a [`Check`] naming the statement it exercises, whether it
//! passed, failed or was skipped because its hypotheses do not hold, and the
//! witness values that decided it.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::greens::{green_solve, GreensTable};
use crate::hypothesis::{c_prime, derivative_bounds, existence_condition, k_prime, sup_norm_bound};
use crate::linearize::lemma_half_bound;
use crate::math::{abs_pow, powf};
use crate::power::{phi_pow, truncate};
use crate::problem::ProblemSpec;
use crate::profile::{DiffusionProfile, SolutionProfile};

/// Nodal values of `u` below this count as negative in the weak maximum principle.
pub const WMP_TOLERANCE: f64 = 1e-10;

/// Slack allowed in the scalar inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

/// Outcome of one check with the values that decided it.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Statement exercised by the check.
    pub anchor: &'static str,
    pub status: Status,
    pub witness: Vec<(&'static str, f64)>,
    /// Reason for a skip, empty otherwise.
    pub note: String,
}

impl Check {
    pub fn new(name: &str, anchor: &'static str, pass: bool, witness: Vec<(&'static str, f64)>) -> Self {
        Check {
            name: name.into(),
            anchor,
            status: if pass { Status::Pass } else { Status::Fail },
            witness,
            note: String::new(),
        }
    }

    pub fn skip(name: &str, anchor: &'static str, note: &str) -> Self {
        Check { name: name.into(), anchor, status: Status::Skip, witness: Vec::new(), note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Collection of checks for one scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub tolerances: Vec<(&'static str, f64)>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }
}

fn argmin(values: &[f64], range: core::ops::Range<usize>) -> (usize, f64) {
    range.map(|i| (i, values[i])).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// Weak maximum principle: `f >= 0` forces `u >= 0`.
pub fn wmp_check(spec: &ProblemSpec, profile: &SolutionProfile) -> Check {
    const NAME: &str = "weak_maximum_principle";
    const ANCHOR: &str = "weak maximum principle: f >= 0 implies u >= 0";
    if !spec.source_nonnegative() {
        return Check::skip(NAME, ANCHOR, "source takes negative values");
    }
    if !(spec.p() > 2.0) {
        return Check::skip(NAME, ANCHOR, "requires p > 2");
    }
    let (i, min) = argmin(&profile.u, 0..profile.u.len());
    let x = profile.grid.nodes()[i];
    Check::new(NAME, ANCHOR, min >= -WMP_TOLERANCE, alloc::vec![("min_u", min), ("x", x)])
}

/// Strong maximum principle along its proof: interior positivity of `u`,
/// positivity of `G`, and reproduction of `u` as `∫ G f`.
pub fn smp_check(
    spec: &ProblemSpec,
    profile: &SolutionProfile,
    table: &GreensTable,
    fixed_point_tol: f64,
) -> Check {
    const NAME: &str = "strong_maximum_principle";
    const ANCHOR: &str = "strong maximum principle: f >= 0, f != 0 implies u > 0 inside";
    if !spec.source_nonnegative() {
        return Check::skip(NAME, ANCHOR, "source takes negative values");
    }
    if spec.source().is_zero() {
        return Check::skip(NAME, ANCHOR, "source vanishes identically");
    }
    if !(spec.p() > 2.0) {
        return Check::skip(NAME, ANCHOR, "requires p > 2");
    }
    let n = profile.u.len();
    let (i, min_u) = argmin(&profile.u, 1..n - 1);
    let (min_g, _) = table.positivity_scan();
    let spec = spec.normalized();
    let reproduced = green_solve(table, spec.source());
    let discrepancy = reproduced
        .u
        .iter()
        .zip(&profile.u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pass = min_u > 0.0 && min_g > 0.0 && discrepancy <= fixed_point_tol;
    Check::new(
        NAME,
        ANCHOR,
        pass,
        alloc::vec![
            ("min_interior_u", min_u),
            ("x", profile.grid.nodes()[i]),
            ("min_green", min_g),
            ("fixed_point_discrepancy", discrepancy),
        ],
    )
}

/// `c_p = 2^{2-p}` for `p >= 2`.
pub fn simon_constant(p: f64) -> f64 {
    powf(2.0, 2.0 - p)
}

/// `(Φ_p(x) - Φ_p(y))(x - y) - c_p |x - y|^p` with `c_p = 2^{2-p}`.
pub fn simon_margin(x: f64, y: f64, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::Domain("the power form of the inequality needs p >= 2"));
    }
    Ok((phi_pow(p, x) - phi_pow(p, y)) * (x - y) - simon_constant(p) * abs_pow(x - y, p))
}

/// `(Φ_p(x) - Φ_p(y))(x - y) - (p-1) |x - y|² (|x| + |y|)^{p-2}` for `1 < p < 2`.
///
/// Evaluated for scans only; the constant `p - 1` is not certified here.
pub fn simon_margin_subquadratic(x: f64, y: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Domain("the subquadratic form of the inequality needs 1 < p < 2"));
    }
    if x == y {
        return Ok(0.0);
    }
    let d = x - y;
    Ok((phi_pow(p, x) - phi_pow(p, y)) * d - (p - 1.0) * d * d * powf(x.abs() + y.abs(), p - 2.0))
}

/// `ψ(s) = Φ_p(s + tan φ) s - ½ |s|^p`.
fn coercivity_integrand(s: f64, p: f64, t: f64) -> f64 {
    phi_pow(p, s + t) * s - 0.5 * abs_pow(s, p)
}

/// `μ = -min(0, min_s ψ(s))`.
///
/// `ψ > 0` for `s > 0` and for `s < -t / (1 - 2^{-1/(p-1)})`, so the scan
/// covers the complementary interval densely and refines the best sample by
/// golden section.
pub fn coercivity_gap(p: f64, phi: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain("coercivity gap needs p > 1"));
    }
    if !(phi > 0.0 && phi < core::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain("phi must lie in (0, pi/2)"));
    }
    let t = crate::math::tan(phi);
    let reach = t / (1.0 - powf(2.0, -1.0 / (p - 1.0)));
    let samples = 20_000;
    let lo = -reach;
    let step = reach / samples as f64;
    let g = |s: f64| coercivity_integrand(s, p, t);
    let mut best = (0.0f64, 0.0f64);
    for k in 0..=samples {
        let s = lo + step * k as f64;
        let v = g(s);
        if v < best.0 {
            best = (v, s);
        }
    }
    if best.0 < 0.0 {
        let (mut a, mut b) = ((best.1 - step).max(lo), (best.1 + step).min(0.0));
        let r = 0.618_033_988_749_894_8;
        for _ in 0..100 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if g(c) < g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        best.0 = best.0.min(g(0.5 * (a + b)));
    }
    Ok(-best.0.min(0.0))
}

/// `a(r, s) = (H + T_k(r)) (cos φ)^{p-1} Φ_p(s + tan φ)`.
pub fn main_part(spec: &ProblemSpec, k: f64, r: f64, s: f64) -> f64 {
    (spec.head() + truncate(r, k))
        * abs_pow(spec.cos_phi(), spec.p() - 1.0)
        * phi_pow(spec.p(), s + spec.tan_phi())
}

/// `(a(r,s) - a(r,s̃))(s - s̃) - c_p (H + T_k(r)) (cos φ)^{p-1} |s - s̃|^p`.
pub fn main_part_monotonicity_margin(
    spec: &ProblemSpec,
    k: f64,
    r: f64,
    s: f64,
    s_tilde: f64,
) -> Result<f64> {
    if !(k > 0.0 && k < spec.head()) {
        return Err(Error::Domain("main-part monotonicity needs 0 < k < H"));
    }
    if !(spec.p() >= 2.0) {
        return Err(Error::Domain("main-part monotonicity needs p >= 2"));
    }
    let weight = (spec.head() + truncate(r, k)) * abs_pow(spec.cos_phi(), spec.p() - 1.0);
    let lhs = (main_part(spec, k, r, s) - main_part(spec, k, r, s_tilde)) * (s - s_tilde);
    Ok(lhs - simon_constant(spec.p()) * weight * abs_pow(s - s_tilde, spec.p()))
}

/// `a(r,s) s - [½ (H-k) (cos φ)^{p-1} |s|^p - (H+k) (cos φ)^{p-1} μ]`.
///
/// The constant in front of `μ` is `H + k`: where `Φ_p(s + tan φ) s < 0` the
/// factor `H + T_k(r)` can reach `H + k`.
pub fn coercivity_margin(spec: &ProblemSpec, k: f64, mu: f64, r: f64, s: f64) -> Result<f64> {
    if !(k > 0.0 && k < spec.head()) {
        return Err(Error::Domain("coercivity needs 0 < k < H"));
    }
    let c = abs_pow(spec.cos_phi(), spec.p() - 1.0);
    let lower = 0.5 * (spec.head() - k) * c * abs_pow(s, spec.p()) - (spec.head() + k) * c * mu;
    Ok(main_part(spec, k, r, s) * s - lower)
}

/// Thresholds used by the scenario checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute slack on `‖u‖∞ <= ‖f‖₁ / (sin φ)^{p-1}`.
    pub sup_slack: f64,
    /// First-order residual allowed per unit of `1 + ‖f‖₁`.
    pub residual: f64,
    /// Allowed `‖∫ G f - u‖∞`.
    pub fixed_point: f64,
    /// Absolute slack on the derivative bounds.
    pub derivative_slack: f64,
    /// Relative slack on the Lipschitz bound.
    pub lipschitz_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { sup_slack: 1e-9, residual: 1e-8, fixed_point: 1e-4, derivative_slack: 1e-12, lipschitz_rel: 1e-8 }
    }
}

impl Tolerances {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        alloc::vec![
            ("sup_slack", self.sup_slack),
            ("residual", self.residual),
            ("fixed_point", self.fixed_point),
            ("derivative_slack", self.derivative_slack),
            ("lipschitz_rel", self.lipschitz_rel),
            ("wmp", WMP_TOLERANCE),
            ("inequality_slack", INEQUALITY_SLACK),
        ]
    }
}

/// `‖u‖∞ <= ‖f‖₁ / (sin φ)^{p-1}` under the integral hypothesis on `f`.
pub fn sup_bound_check(spec: &ProblemSpec, profile: &SolutionProfile, hf_holds: bool, slack: f64) -> Check {
    const NAME: &str = "sup_norm_bound";
    const ANCHOR: &str = "sup-norm bound ||u|| <= ||f||_1 / sin^(p-1)";
    if !hf_holds {
        return Check::skip(NAME, ANCHOR, "integral hypothesis on f not established");
    }
    let (measured, bound) = (profile.sup_norm(), sup_norm_bound(spec));
    Check::new(NAME, ANCHOR, measured <= bound + slack, alloc::vec![("sup_u", measured), ("bound", bound)])
}

/// `u > -H` everywhere, i.e. the water table never touches the bed.
pub fn no_touch_check(profile: &SolutionProfile, hf_holds: bool) -> Check {
    const NAME: &str = "no_touch";
    const ANCHOR: &str = "u > -H on [-1, 1] under the integral hypothesis";
    if !hf_holds {
        return Check::skip(NAME, ANCHOR, "integral hypothesis on f not established");
    }
    Check::new(NAME, ANCHOR, profile.min_head > 0.0, alloc::vec![("min_head", profile.min_head)])
}

/// Residual of `(u+H) Φ_p(u' cos φ + sin φ) = κ + F` within `tol (1 + ‖f‖₁)`.
pub fn first_order_check(spec: &ProblemSpec, profile: &SolutionProfile, tol: f64) -> Check {
    let bound = tol * (1.0 + spec.source_l1());
    Check::new(
        "first_order_identity",
        "first-order identity holds pointwise",
        profile.residual_first_order <= bound,
        alloc::vec![("residual", profile.residual_first_order), ("bound", bound)],
    )
}

/// Certified floors of `D`: the one attached to the profile and, when the
/// existence condition holds, `K'`.
pub fn diffusion_floor_checks(spec: &ProblemSpec, d: &DiffusionProfile) -> Vec<Check> {
    let mut out = alloc::vec![Check::new(
        "diffusion_floor",
        "D(x) >= certified floor",
        d.floor_holds(),
        alloc::vec![("min_d", d.min()), ("floor", d.floor_value)],
    )];
    const KP: &str = "diffusion_floor_k_prime";
    const KP_ANCHOR: &str = "D(x) >= K' when ||f||_1 < H sin^(p-1)";
    if existence_condition(spec) {
        let kp = k_prime(spec, spec.source_l1());
        out.push(Check::new(KP, KP_ANCHOR, d.min() >= kp, alloc::vec![("min_d", d.min()), ("k_prime", kp)]));
    } else {
        out.push(Check::skip(KP, KP_ANCHOR, "existence condition fails"));
    }
    out
}

/// `G > 0` on interior nodes and `E⁺ - E⁻ >= 1 - exp(-∫ λ/D)`.
pub fn green_positivity_check(table: &GreensTable) -> Check {
    let (min_g, (x, y)) = table.positivity_scan();
    let (gap, bound) = (table.weight_gap_min(), table.weight_gap_bound());
    Check::new(
        "green_positivity",
        "G(x, y) > 0 on the open square",
        min_g > 0.0 && gap >= bound * (1.0 - 1e-12) && bound > 0.0,
        alloc::vec![("min_green", min_g), ("x", x), ("y", y), ("weight_gap", gap), ("gap_bound", bound)],
    )
}

/// `|G(s,y) - G(t,y)| <= κ |s - t|` on the given triples.
pub fn lipschitz_check(table: &GreensTable, kappa: f64, triples: &[(f64, f64, f64)], rel: f64) -> Check {
    let mut worst = (0.0f64, 0.0, 0.0, 0.0);
    let mut pass = kappa.is_finite() && kappa > 0.0;
    for &(s, t, y) in triples {
        let g = |x: f64| table.green_eval(x, y).unwrap_or(f64::INFINITY);
        let lhs = (g(s) - g(t)).abs();
        let rhs = kappa * (s - t).abs();
        if lhs > rhs * (1.0 + rel) + 1e-300 {
            pass = false;
        }
        let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        if ratio > worst.0 {
            worst = (ratio, s, t, y);
        }
    }
    Check::new(
        "green_lipschitz",
        "G(., y) is Lipschitz uniformly in y",
        pass,
        alloc::vec![
            ("kappa", kappa),
            ("triples", triples.len() as f64),
            ("worst_ratio", worst.0),
            ("s", worst.1),
            ("t", worst.2),
            ("y", worst.3),
        ],
    )
}

/// `‖∫ G f - u‖∞ <= tol`.
pub fn fixed_point_check_of(discrepancy: f64, tol: f64) -> Check {
    Check::new(
        "linearization_fixed_point",
        "u solves its own linearized problem",
        discrepancy <= tol,
        alloc::vec![("discrepancy", discrepancy), ("tolerance", tol)],
    )
}

/// End-slope and uniform derivative bounds, plus `D(1) <= C'`.
pub fn derivative_checks(spec: &ProblemSpec, profile: &SolutionProfile, d: &DiffusionProfile, beta: Option<f64>, slack: f64) -> Vec<Check> {
    let d_end = d.d[d.d.len() - 1];
    let bounds = match derivative_bounds(spec, profile, d_end, d.floor_value, beta) {
        Ok(b) => b,
        Err(_) => {
            return alloc::vec![Check::skip("derivative_bounds", "bounds on u'(1) and ||u'||", "requires p > 2")];
        }
    };
    let s_abs = profile.s_end.abs();
    let du = profile.du_sup_norm();
    let beta = beta.unwrap_or(spec.source_l1());
    let cp = c_prime(spec, beta);
    let mut out = alloc::vec![
        Check::new(
            "end_slope_bound",
            "bound on |u'(1)| by the sign of u'(1)",
            s_abs <= bounds.end_bound + slack,
            alloc::vec![("abs_du_end", s_abs), ("bound", bounds.end_bound), ("s_end", profile.s_end)],
        ),
        Check::new(
            "derivative_sup_bound",
            "bound on ||u'|| from the diffusion floor",
            du <= bounds.uniform() + slack,
            alloc::vec![
                ("sup_du", du),
                ("profile_bound", bounds.profile_bound),
                ("apriori_bound", bounds.apriori_bound.unwrap_or(f64::NAN)),
            ],
        ),
    ];
    if bounds.apriori_bound.is_some() {
        out.push(Check::new(
            "end_diffusion_bound",
            "0 < D(1) <= C'",
            d_end > 0.0 && d_end <= cp,
            alloc::vec![("d_end", d_end), ("c_prime", cp)],
        ));
    } else {
        out.push(Check::skip("end_diffusion_bound", "0 < D(1) <= C'", "beta margin not satisfied"));
    }
    out
}

/// `(p-1) ∫₀¹ |1 + θa|^{p-2} dθ >= ½` over a tensor scan.
pub fn half_bound_scan(a_values: &[f64], p_values: &[f64]) -> Check {
    let mut worst = (f64::INFINITY, 0.0, 0.0);
    let mut pass = true;
    for &p in p_values {
        for &a in a_values {
            match lemma_half_bound(a, p) {
                Ok(v) => {
                    if v < worst.0 {
                        worst = (v, a, p);
                    }
                    if v < 0.5 - INEQUALITY_SLACK {
                        pass = false;
                    }
                }
                Err(_) => pass = false,
            }
        }
    }
    Check::new(
        "theta_half_bound",
        "(p-1) int |1 + theta a|^(p-2) >= 1/2 for p > 2",
        pass,
        alloc::vec![("min_value", worst.0), ("a", worst.1), ("p", worst.2)],
    )
}

fn margin_sweep(name: &str, anchor: &'static str, margins: impl Iterator<Item = (Result<f64>, [f64; 3])>) -> Check {
    let mut worst = (f64::INFINITY, [0.0; 3]);
    let mut pass = true;
    let mut count = 0usize;
    for (m, at) in margins {
        count += 1;
        match m {
            Ok(v) => {
                if v < worst.0 {
                    worst = (v, at);
                }
                if !(v >= -INEQUALITY_SLACK) {
                    pass = false;
                }
            }
            Err(_) => pass = false,
        }
    }
    Check::new(
        name,
        anchor,
        pass,
        alloc::vec![
            ("min_margin", worst.0),
            ("samples", count as f64),
            ("at_0", worst.1[0]),
            ("at_1", worst.1[1]),
            ("at_2", worst.1[2]),
        ],
    )
}

/// Simon's inequality on `(x, y, p)` samples with `p >= 2`.
pub fn simon_sweep(samples: &[(f64, f64, f64)]) -> Check {
    margin_sweep(
        "simon_inequality",
        "(Phi_p(x) - Phi_p(y))(x - y) >= 2^(2-p) |x - y|^p",
        samples.iter().map(|&(x, y, p)| (simon_margin(x, y, p), [x, y, p])),
    )
}

/// Strong monotonicity of the main part on `(r, s, s̃)` samples.
pub fn monotonicity_sweep(spec: &ProblemSpec, k: f64, samples: &[(f64, f64, f64)]) -> Check {
    margin_sweep(
        "main_part_monotonicity",
        "strong monotonicity of the main part in the gradient",
        samples.iter().map(|&(r, s, t)| (main_part_monotonicity_margin(spec, k, r, s, t), [r, s, t])),
    )
}

/// For `p = 2` the coercivity gap is `½ tan² φ` exactly.
pub fn coercivity_quadratic_check(phi: f64, tol: f64) -> Check {
    let mu = coercivity_gap(2.0, phi).unwrap_or(f64::NAN);
    let exact = 0.5 * crate::math::tan(phi) * crate::math::tan(phi);
    Check::new(
        "coercivity_gap_quadratic",
        "mu = tan^2(phi) / 2 for p = 2",
        (mu - exact).abs() <= tol,
        alloc::vec![("mu", mu), ("exact", exact), ("phi", phi)],
    )
}
