//! The integral hypothesis on the source and the explicit a priori constants.
//!
//! The hypothesis asks that
//!
//! ```text
//! min_{x0 ∈ [-1,1]} min_{x ∈ [x0,1]}  H^{p'} + p/((p-1) cos φ) ∫_x^1 Φ_{p'}(∫_{x0}^τ f) dτ  > 0.
//! ```
//!
//! It guarantees that every weak solution stays strictly above the bed. The
//! remaining functions evaluate the sup-norm bound, the existence threshold,
//! the lower bounds for the diffusion coefficient of the linearization and the
//! bounds on `u'`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs_pow, powf};
use crate::power::phi_pow;
use crate::problem::ProblemSpec;
use crate::profile::{FloorKind, SolutionProfile};
use crate::quad::Rule;

/// Minimum accepted tensor-grid resolution for [`check_hf`].
pub const MIN_HF_RESOLUTION: usize = 64;

/// Values of the hypothesis functional within this band are not decided.
pub const HF_VERDICT_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
        }
    }

    fn from_value(v: f64) -> Self {
        if v.abs() <= HF_VERDICT_BAND {
            Verdict::Indeterminate
        } else if v > 0.0 {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// Outcome of the hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HfResult {
    pub verdict: Verdict,
    /// Best (smallest) value found, after refinement.
    pub min_value: f64,
    /// `(x0, x)` attaining `min_value`.
    pub argmin: (f64, f64),
    /// Minimum over the tensor grid alone.
    pub grid_min: f64,
    /// True when the nonnegative-source shortcut answered.
    pub fast_path: bool,
}

impl HfResult {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Checks the hypothesis, answering immediately when `f >= 0`.
pub fn check_hf(spec: &ProblemSpec, resolution: usize) -> Result<HfResult> {
    if resolution < MIN_HF_RESOLUTION {
        return Err(Error::InvalidParameter("HF resolution must be at least 64 cells"));
    }
    if spec.source_nonnegative() {
        let v = powf(spec.head(), spec.conj_p());
        return Ok(HfResult {
            verdict: Verdict::from_value(v),
            min_value: v,
            argmin: (-1.0, 1.0),
            grid_min: v,
            fast_path: true,
        });
    }
    evaluate_hf(spec, resolution)
}

/// Grid evaluation plus refinement, without the nonnegative-source shortcut.
pub fn evaluate_hf(spec: &ProblemSpec, resolution: usize) -> Result<HfResult> {
    if resolution < MIN_HF_RESOLUTION {
        return Err(Error::InvalidParameter("HF resolution must be at least 64 cells"));
    }
    let hf = HfFunctional::new(spec);
    let n = resolution;
    let h = 2.0 / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| if i == n { 1.0 } else { -1.0 + h * i as f64 }).collect();
    let rule = Rule::new(3);
    let tails: Vec<f64> = xs.iter().map(|&x| spec.source().tail_unchecked(x)).collect();

    let mut best = (f64::INFINITY, 0usize, 0usize);
    let mut outer = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let base = tails[i];
        // ∫_{x_j}^1 Φ_{p'}(F(x0) - F(τ)) dτ accumulated from the right.
        outer.clear();
        outer.resize(n + 1, 0.0);
        for j in (i..n).rev() {
            let cell = rule.integrate(xs[j], xs[j + 1], |t| {
                phi_pow(hf.conj_p, base - spec.source().tail_unchecked(t))
            });
            outer[j] = outer[j + 1] + cell;
        }
        for j in i..=n {
            let v = hf.offset + hf.factor * outer[j];
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    let grid_min = best.0;
    let (mut x0, mut x) = (xs[best.1], xs[best.2]);
    let mut value = hf.value(x0, x);
    for _ in 0..4 {
        let lo0 = (x0 - h).max(-1.0);
        let hi0 = (x0 + h).min(x);
        x0 = golden_min(|t| hf.value(t, x), lo0, hi0, 1e-12);
        let lo = (x - h).max(x0);
        let hi = (x + h).min(1.0);
        x = golden_min(|t| hf.value(x0, t), lo, hi, 1e-12);
        value = hf.value(x0, x);
    }
    let (min_value, argmin) =
        if value <= grid_min { (value, (x0, x)) } else { (grid_min, (xs[best.1], xs[best.2])) };
    Ok(HfResult {
        verdict: Verdict::from_value(min_value),
        min_value,
        argmin,
        grid_min,
        fast_path: false,
    })
}

struct HfFunctional<'a> {
    spec: &'a ProblemSpec,
    conj_p: f64,
    offset: f64,
    factor: f64,
    rule: Rule,
}

impl<'a> HfFunctional<'a> {
    fn new(spec: &'a ProblemSpec) -> Self {
        let p = spec.p();
        HfFunctional {
            spec,
            conj_p: spec.conj_p(),
            offset: powf(spec.head(), spec.conj_p()),
            factor: p / ((p - 1.0) * spec.cos_phi()),
            rule: Rule::new(8),
        }
    }

    /// Functional at `(x0, x)` with the outer integral split at the source
    /// breakpoints and evaluated by composite Gauss–Legendre.
    fn value(&self, x0: f64, x: f64) -> f64 {
        let src = self.spec.source();
        let base = src.tail_unchecked(x0);
        let mut cuts: Vec<f64> = Vec::new();
        cuts.push(x);
        cuts.extend(src.breakpoints().filter(|&b| b > x && b < 1.0));
        cuts.push(1.0);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let panels = 16;
            let hp = (w[1] - w[0]) / panels as f64;
            for k in 0..panels {
                let lo = w[0] + hp * k as f64;
                total += self.rule.integrate(lo, lo + hp, |t| {
                    phi_pow(self.conj_p, base - src.tail_unchecked(t))
                });
            }
        }
        self.offset + self.factor * total
    }
}

fn golden_min(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return a;
    }
    let r = 0.5 * (crate::math::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let mid = 0.5 * (a + b);
    // endpoints are admissible too
    [a, mid, b]
        .into_iter()
        .map(|t| (g(t), t))
        .fold((f64::INFINITY, mid), |acc, v| if v.0 < acc.0 { v } else { acc })
        .1
}

/// `‖f‖₁ / (sin φ)^{p-1}`, an upper bound for `‖u‖∞`.
pub fn sup_norm_bound(spec: &ProblemSpec) -> f64 {
    spec.source_l1() / spec.lambda()
}

/// `‖f‖₁ < H (sin φ)^{p-1}`.
pub fn existence_condition(spec: &ProblemSpec) -> bool {
    spec.source_l1() < spec.head() * spec.lambda()
}

/// `(sin φ)^{p-2} cos φ`.
fn slope_scale(spec: &ProblemSpec) -> f64 {
    abs_pow(spec.sin_phi(), spec.p() - 2.0) * spec.cos_phi()
}

fn require_p_above_two(spec: &ProblemSpec) -> Result<()> {
    if spec.p() > 2.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedExponent { p: spec.p() })
    }
}

/// `K'(β) = ½ (H - β / (sin φ)^{p-1}) (sin φ)^{p-2} cos φ`.
pub fn k_prime(spec: &ProblemSpec, beta: f64) -> f64 {
    0.5 * (spec.head() - beta / spec.lambda()) * slope_scale(spec)
}

/// `K = ½ M (sin φ)^{p-2} cos φ` for a measured minimum thickness `M = min (u + H)`.
pub fn measured_floor(spec: &ProblemSpec, min_head: f64) -> f64 {
    0.5 * min_head * slope_scale(spec)
}

/// Strongest certified lower bound for the diffusion coefficient that holds
/// without looking at a solution.
pub fn diffusion_floor(spec: &ProblemSpec) -> Result<(FloorKind, f64)> {
    require_p_above_two(spec)?;
    if spec.source_nonnegative() {
        Ok((FloorKind::NonnegativeSource, 0.5 * spec.head() * slope_scale(spec)))
    } else if existence_condition(spec) {
        Ok((FloorKind::KPrime, k_prime(spec, spec.source_l1())))
    } else {
        Err(Error::ConditionViolated("diffusion floor needs f >= 0 or ||f||_1 < H sin^(p-1)"))
    }
}

/// `C'(β) = (p-1) H m cos φ (sin φ)^{p-2} + 2 m (cos φ)^{p-2} (sin φ)^{2-p} β`
/// with `m = max(1, 2^{p-1})`, the bound used for `D(1)`.
pub fn c_prime(spec: &ProblemSpec, beta: f64) -> f64 {
    let p = spec.p();
    let m = powf(2.0, p - 1.0).max(1.0);
    (p - 1.0) * spec.head() * m * slope_scale(spec)
        + 2.0 * m * abs_pow(spec.cos_phi(), p - 2.0) / abs_pow(spec.sin_phi(), p - 2.0) * beta
}

/// Bounds on the end slope and on `‖u'‖∞` for a computed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBounds {
    /// Bound on `|u'(1)|` for the observed sign of `u'(1)`.
    pub end_bound: f64,
    /// Bound on `‖u'‖∞` from the diffusion floor `K` and the measured `D(1)`.
    pub profile_bound: f64,
    /// Bound `C(φ, H, p, β) ‖f‖₁`, available when `‖f‖₁ <= β < H (sin φ)^{p-1}`.
    pub apriori_bound: Option<f64>,
}

impl DerivativeBounds {
    pub fn uniform(&self) -> f64 {
        match self.apriori_bound {
            Some(a) => a.min(self.profile_bound),
            None => self.profile_bound,
        }
    }
}

/// End-slope bound: `‖f‖₁ / (H (sin φ)^{p-2} cos φ)` if `u'(1) >= 0`, twice that otherwise.
pub fn end_slope_bound(spec: &ProblemSpec, s_end: f64) -> f64 {
    let base = spec.source_l1() / (spec.head() * slope_scale(spec));
    if s_end >= 0.0 {
        base
    } else {
        2.0 * base
    }
}

/// A priori `‖u'‖∞` bound `2/K'(β) (1 + C'(β) / (H cos φ (sin φ)^{p-2})) ‖f‖₁`.
pub fn apriori_derivative_bound(spec: &ProblemSpec, beta: f64) -> Result<f64> {
    require_p_above_two(spec)?;
    if !(beta >= spec.source_l1() && beta < spec.head() * spec.lambda()) {
        return Err(Error::ConditionViolated("beta must satisfy ||f||_1 <= beta < H sin^(p-1)"));
    }
    let scale = spec.head() * slope_scale(spec);
    Ok(2.0 / k_prime(spec, beta) * (1.0 + c_prime(spec, beta) / scale) * spec.source_l1())
}

/// Derivative bounds for `profile`, given `D(1)` and a certified floor `k` of `D`.
pub fn derivative_bounds(
    spec: &ProblemSpec,
    profile: &SolutionProfile,
    d_end: f64,
    floor: f64,
    beta: Option<f64>,
) -> Result<DerivativeBounds> {
    require_p_above_two(spec)?;
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter("diffusion floor must be positive"));
    }
    let l1 = spec.source_l1();
    let scale = spec.head() * slope_scale(spec);
    let profile_bound = if profile.s_end >= 0.0 {
        (2.0 + d_end / scale) * l1 / floor
    } else {
        2.0 * (1.0 + d_end / scale) * l1 / floor
    };
    let beta = beta.unwrap_or(l1);
    Ok(DerivativeBounds {
        end_bound: end_slope_bound(spec, profile.s_end),
        profile_bound,
        apriori_bound: apriori_derivative_bound(spec, beta).ok(),
    })
}

/// Every explicit constant of a scenario in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub hf: HfResult,
    pub sup_bound: f64,
    pub existence_ok: bool,
    pub margin_beta: f64,
    /// `K'(‖f‖₁)` when the existence condition holds and `p > 2`.
    pub k_prime: Option<f64>,
    pub du_end_bound_pos: f64,
    pub du_end_bound_neg: f64,
    /// `C(φ, H, p, β) ‖f‖₁` when `p > 2` and `β` is admissible.
    pub du_uniform_bound: Option<f64>,
}

impl BoundsReport {
    pub fn hf_holds(&self) -> bool {
        self.hf.holds()
    }
}

/// Builds the report; `beta` defaults to `‖f‖₁`.
pub fn bounds_report(spec: &ProblemSpec, resolution: usize, beta: Option<f64>) -> Result<BoundsReport> {
    let hf = check_hf(spec, resolution)?;
    let beta = beta.unwrap_or(spec.source_l1());
    let existence_ok = existence_condition(spec);
    let p_ok = spec.p() > 2.0;
    Ok(BoundsReport {
        hf,
        sup_bound: sup_norm_bound(spec),
        existence_ok,
        margin_beta: beta,
        k_prime: (p_ok && existence_ok).then(|| k_prime(spec, spec.source_l1())),
        du_end_bound_pos: end_slope_bound(spec, 0.0),
        du_end_bound_neg: end_slope_bound(spec, -1.0),
        du_uniform_bound: apriori_derivative_bound(spec, beta).ok(),
    })
}
