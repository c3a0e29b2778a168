//! Green's function of the linearized operator `L u = -(D u')' - λ u'` with
//! homogeneous Dirichlet conditions on `[-1, 1]`, `λ = (sin φ)^{p-1}`.
//!
//! With `I(s) = ∫_{-1}^s λ/D` and `T = I(1)` the weights are
//! `E⁻(s) = exp(-I(s))` and `E⁺(s) = exp(T - I(s))`, and
//!
//! ```text
//! G(x, y) = (E⁺(y) - 1) / (E⁻(y) - E⁺(y)) · (E⁻(x) - 1) / λ    for x <= y,
//! G(x, y) = (E⁻(y) - 1) / (E⁻(y) - E⁺(y)) · (E⁺(x) - 1) / λ    for x >  y.
//! ```
//!
//! The table evaluates the equivalent forms
//! `expm1(-I(x))·(e^{I(y)} - e^T) / (expm1(T) λ)` and
//! `expm1(I(y))·expm1(T - I(x)) / (expm1(T) λ)`, which avoid cancellation near
//! the ends. `λ/D` is represented piecewise linearly between nodes, so the
//! trapezoid rule gives `I` exactly at the nodes and a quadratic in between.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linearize::build_diffusion;
use crate::math::{exp, expm1};
use crate::problem::ProblemSpec;
use crate::profile::{DiffusionProfile, SolutionProfile};
use crate::quad::Rule;
use crate::source::SourceFunction;

/// Default bound on the dimension of the dense `G` matrix.
pub const DEFAULT_MATRIX_CAP: usize = 2048;

/// `(E⁻, E⁺)` at the nodes of `d`, with `∫ λ/D` by the trapezoid rule.
pub fn exp_weights(d: &DiffusionProfile, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let integral = cumulative_weight(d, lambda)?;
    let total = *integral.last().unwrap();
    Ok((
        integral.iter().map(|&i| exp(-i)).collect(),
        integral.iter().map(|&i| exp(total - i)).collect(),
    ))
}

fn cumulative_weight(d: &DiffusionProfile, lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("lambda must be > 0"));
    }
    if d.d.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::ConditionViolated("diffusion coefficient must be positive"));
    }
    let x = d.grid.nodes();
    let mut out = Vec::with_capacity(x.len());
    out.push(0.0);
    for i in 0..x.len() - 1 {
        let cell = 0.5 * (x[i + 1] - x[i]) * (lambda / d.d[i] + lambda / d.d[i + 1]);
        out.push(out[i] + cell);
    }
    Ok(out)
}

/// Dense samples `G(x_i, y_j)` on a strided subset of the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    /// Grid node indices of the rows and columns.
    pub indices: Vec<usize>,
    /// Row-major values, `indices.len()²` entries.
    pub values: Vec<f64>,
}

impl GreenMatrix {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.dim() + col]
    }
}

/// Tabulated weights and Green's function for one diffusion profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensTable {
    pub grid: Grid,
    pub e_minus: Vec<f64>,
    pub e_plus: Vec<f64>,
    pub lambda: f64,
    /// `I(x_i)`.
    pub integral: Vec<f64>,
    /// `λ / D(x_i)`.
    pub weight: Vec<f64>,
    pub total: f64,
    pub head: f64,
    pub matrix: GreenMatrix,
}

impl GreensTable {
    /// Builds the table; the dense matrix uses at most `matrix_cap + 1` nodes per axis.
    pub fn new(d: &DiffusionProfile, lambda: f64, matrix_cap: usize) -> Result<Self> {
        let integral = cumulative_weight(d, lambda)?;
        let total = *integral.last().unwrap();
        if !(total < 700.0) {
            return Err(Error::Domain("exp(∫ λ/D) overflows; diffusion too small"));
        }
        let weight = d.d.iter().map(|&v| lambda / v).collect();
        let mut table = GreensTable {
            grid: d.grid.clone(),
            e_minus: integral.iter().map(|&i| exp(-i)).collect(),
            e_plus: integral.iter().map(|&i| exp(total - i)).collect(),
            lambda,
            integral,
            weight,
            total,
            head: d.head,
            matrix: GreenMatrix { indices: Vec::new(), values: Vec::new() },
        };
        let n = d.grid.n_cells();
        let stride = n.div_ceil(matrix_cap.max(1)).max(1);
        let mut indices: Vec<usize> = (0..=n).step_by(stride).collect();
        if *indices.last().unwrap() != n {
            indices.push(n);
        }
        let x = d.grid.nodes();
        let mut values = Vec::with_capacity(indices.len() * indices.len());
        for &i in &indices {
            for &j in &indices {
                values.push(table.kernel(x[i], x[j]));
            }
        }
        table.matrix = GreenMatrix { indices, values };
        Ok(table)
    }

    /// `I(s)` from the piecewise-linear representation of `λ/D`.
    pub fn integral_at(&self, s: f64) -> f64 {
        let x = self.grid.nodes();
        let j = self.grid.locate(s);
        let h = x[j + 1] - x[j];
        let t = (s - x[j]).clamp(0.0, h);
        self.integral[j] + self.weight[j] * t + (self.weight[j + 1] - self.weight[j]) * t * t / (2.0 * h)
    }

    /// `λ / D(s)`, linear between nodes.
    pub fn weight_at(&self, s: f64) -> f64 {
        self.grid.interpolate(&self.weight, s)
    }

    pub fn e_minus_at(&self, s: f64) -> f64 {
        exp(-self.integral_at(s))
    }

    pub fn e_plus_at(&self, s: f64) -> f64 {
        exp(self.total - self.integral_at(s))
    }

    #[inline]
    fn denom(&self) -> f64 {
        expm1(self.total) * self.lambda
    }

    fn kernel(&self, x: f64, y: f64) -> f64 {
        let (ix, iy) = (self.integral_at(x), self.integral_at(y));
        if x <= y {
            -expm1(-ix) * (exp(self.total) - exp(iy)) / self.denom()
        } else {
            expm1(iy) * expm1(self.total - ix) / self.denom()
        }
    }

    /// `G(x, y)`.
    pub fn green_eval(&self, x: f64, y: f64) -> Result<f64> {
        if !((-1.0..=1.0).contains(&x) && (-1.0..=1.0).contains(&y)) {
            return Err(Error::Domain("Green's function arguments must lie in [-1, 1]"));
        }
        Ok(self.kernel(x, y))
    }

    /// The two branches of the defining formula evaluated literally, for checks.
    pub fn green_branches(&self, x: f64, y: f64) -> (f64, f64) {
        let (em_x, ep_x) = (self.e_minus_at(x), self.e_plus_at(x));
        let (em_y, ep_y) = (self.e_minus_at(y), self.e_plus_at(y));
        let lower = (ep_y - 1.0) / (em_y - ep_y) / self.lambda * (em_x - 1.0);
        let upper = (em_y - 1.0) / (em_y - ep_y) / self.lambda * (ep_x - 1.0);
        (lower, upper)
    }

    /// `∂G/∂x` away from the diagonal; at `x = y` the `x < y` side is returned.
    pub fn green_dx(&self, x: f64, y: f64) -> f64 {
        let (ix, iy) = (self.integral_at(x), self.integral_at(y));
        let w = self.weight_at(x);
        if x <= y {
            w * exp(-ix) * (exp(self.total) - exp(iy)) / self.denom()
        } else {
            -w * exp(self.total - ix) * expm1(iy) / self.denom()
        }
    }

    /// One-sided suprema of `|∂G/∂x|` over `y` at a fixed `x`; their sum is `1/D(x)`.
    fn slope_envelopes(&self, x: f64) -> (f64, f64) {
        let i = self.integral_at(x);
        let w = self.weight_at(x);
        let left = w * expm1(self.total - i) / self.denom();
        let right = w * (exp(self.total) - exp(self.total - i)) / self.denom();
        (left, right)
    }

    /// Lipschitz constant of `G(·, y)` uniformly in `y`.
    ///
    /// The envelopes are sampled at the nodes and `samples` interior points per
    /// cell, then refined by golden section in the cell holding the maximum.
    pub fn lipschitz_estimate(&self, samples: usize) -> f64 {
        let x = self.grid.nodes();
        let env = |s: f64| {
            let (a, b) = self.slope_envelopes(s);
            a.max(b)
        };
        let mut best = (0.0, 0usize);
        for j in 0..x.len() - 1 {
            for k in 0..=samples + 1 {
                let s = x[j] + (x[j + 1] - x[j]) * k as f64 / (samples + 1) as f64;
                let v = env(s);
                if v > best.0 {
                    best = (v, j);
                }
            }
        }
        let (mut a, mut b) = (x[best.1], x[best.1 + 1]);
        let r = 0.618_033_988_749_894_8;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        for _ in 0..80 {
            if env(c) > env(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - r * (b - a);
            d = a + r * (b - a);
        }
        best.0.max(env(a)).max(env(b)).max(env(0.5 * (a + b)))
    }

    /// Minimum of `G` over all pairs of interior nodes and where it occurs.
    ///
    /// Both branches factor as a function of `x` times a function of `y`, so
    /// the scan costs one multiplication per pair and does not depend on the
    /// resolution of the dense matrix.
    pub fn positivity_scan(&self) -> (f64, (f64, f64)) {
        let x = self.grid.nodes();
        let n = x.len();
        let (t, den) = (self.total, self.denom());
        let below: Vec<f64> = self.integral.iter().map(|&i| -expm1(-i)).collect();
        let above: Vec<f64> = self.integral.iter().map(|&i| (exp(t) - exp(i)) / den).collect();
        let rise: Vec<f64> = self.integral.iter().map(|&i| expm1(i)).collect();
        let fall: Vec<f64> = self.integral.iter().map(|&i| expm1(t - i) / den).collect();
        let mut best = (f64::INFINITY, (0.0, 0.0));
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let v = if i <= j { below[i] * above[j] } else { rise[j] * fall[i] };
                if v < best.0 {
                    best = (v, (x[i], x[j]));
                }
            }
        }
        best
    }

    /// `min_s (E⁺ - E⁻)(s)` over the nodes.
    pub fn weight_gap_min(&self) -> f64 {
        self.e_plus.iter().zip(&self.e_minus).map(|(p, m)| p - m).fold(f64::INFINITY, f64::min)
    }

    /// Lower bound `1 - exp(-T)` for [`Self::weight_gap_min`].
    pub fn weight_gap_bound(&self) -> f64 {
        -expm1(-self.total)
    }

    /// `D(x_i)` recovered from the stored weights.
    pub fn diffusion(&self) -> Vec<f64> {
        self.weight.iter().map(|w| self.lambda / w).collect()
    }
}

/// `u(x) = ∫ G(x, y) f(y) dy` at the table nodes.
///
/// `G` separates into `A(x)·expm1(I(y))` below the diagonal and
/// `B(x)·(e^T - e^{I(y)})` above it, so two running integrals (Gauss–Legendre
/// per cell, cells split at source breakpoints) give every nodal value.
/// `u'` comes from differentiating the same representation.
pub fn green_solve(table: &GreensTable, f: &SourceFunction) -> SolutionProfile {
    let x = table.grid.nodes();
    let n = table.grid.n_cells();
    let rule = Rule::new(6);
    let breaks: Vec<f64> = f.breakpoints().collect();
    let e_total = exp(table.total);
    let mut lower_cells = Vec::with_capacity(n);
    let mut upper_cells = Vec::with_capacity(n);
    for j in 0..n {
        let (a, b) = (x[j], x[j + 1]);
        let mut cuts = alloc::vec![a];
        cuts.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
        cuts.push(b);
        let (mut lo, mut up) = (0.0, 0.0);
        for w in cuts.windows(2) {
            for (y, wt) in rule.points(w[0], w[1]) {
                let iy = table.integral_at(y);
                let fy = f.eval(y);
                lo += wt * expm1(iy) * fy;
                up += wt * (e_total - exp(iy)) * fy;
            }
        }
        lower_cells.push(lo);
        upper_cells.push(up);
    }
    let mut left = alloc::vec![0.0; n + 1];
    for j in 0..n {
        left[j + 1] = left[j] + lower_cells[j];
    }
    let mut right = alloc::vec![0.0; n + 1];
    for j in (0..n).rev() {
        right[j] = right[j + 1] + upper_cells[j];
    }
    let denom = table.denom();
    let mut u = alloc::vec![0.0; n + 1];
    let mut du = alloc::vec![0.0; n + 1];
    for i in 0..=n {
        let ix = table.integral[i];
        let w = table.weight[i];
        let a = expm1(table.total - ix) / denom;
        let b = -expm1(-ix) / denom;
        u[i] = a * left[i] + b * right[i];
        du[i] = -w * exp(table.total - ix) / denom * left[i] + w * exp(-ix) / denom * right[i];
    }
    u[0] = 0.0;
    u[n] = 0.0;
    let d_end = table.lambda / table.weight[n];
    let kappa = d_end * du[n];
    let mut residual: f64 = 0.0;
    for i in 0..=n {
        let d = table.lambda / table.weight[i];
        let r = d * du[i] + table.lambda * u[i] - f.tail_unchecked(x[i]) - kappa;
        residual = residual.max(r.abs());
    }
    let min_head = u.iter().map(|v| v + table.head).fold(f64::INFINITY, f64::min);
    SolutionProfile {
        grid: table.grid.clone(),
        u,
        s_end: du[n],
        du,
        kappa,
        residual_first_order: residual,
        min_head,
    }
}

/// Outcome of reproducing a steady solution through its own linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub diffusion: DiffusionProfile,
    pub table: GreensTable,
    pub reproduced: SolutionProfile,
    /// `‖green_solve(f) - u‖∞` over the nodes.
    pub discrepancy: f64,
}

/// Builds `D` from `profile`, the Green's table from `D`, and compares
/// `∫ G f` with `u`.
pub fn fixed_point_check(
    spec: &ProblemSpec,
    profile: &SolutionProfile,
    matrix_cap: usize,
) -> Result<FixedPointReport> {
    let spec = &spec.normalized();
    let diffusion = build_diffusion(spec, profile)?;
    let table = GreensTable::new(&diffusion, spec.lambda(), matrix_cap)?;
    let reproduced = green_solve(&table, spec.source());
    let discrepancy = reproduced
        .u
        .iter()
        .zip(&profile.u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(FixedPointReport { diffusion, table, reproduced, discrepancy })
}

/// Table for a constant coefficient `D ≡ d0` on a uniform grid.
pub fn constant_table(d0: f64, lambda: f64, n_cells: usize, matrix_cap: usize) -> Result<GreensTable> {
    let grid = Grid::uniform(n_cells)?;
    let profile = DiffusionProfile {
        d: alloc::vec![d0; grid.len()],
        grid,
        floor_kind: crate::profile::FloorKind::MeasuredHead,
        floor_value: d0,
        head: 0.0,
    };
    GreensTable::new(&profile, lambda, matrix_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_for_unit_ratio() {
        let t = constant_table(0.5, 0.5, 64, 64).unwrap();
        for (i, &s) in t.grid.nodes().iter().enumerate() {
            assert_relative_eq!(t.e_minus[i], (-(s + 1.0)).exp(), max_relative = 1e-13);
            assert_relative_eq!(t.e_plus[i], (1.0 - s).exp(), max_relative = 1e-13);
        }
        assert_eq!(t.e_minus[0], 1.0);
        assert_eq!(t.e_plus[64], 1.0);
    }

    #[test]
    fn boundary_rows_vanish_and_branches_agree() {
        let t = constant_table(0.3, 0.2, 32, 32).unwrap();
        for &y in &[-0.7, 0.0, 0.4] {
            assert_eq!(t.green_eval(-1.0, y).unwrap(), 0.0);
            assert!(t.green_eval(1.0, y).unwrap().abs() < 1e-16);
            let (lo, up) = t.green_branches(y, y);
            assert_relative_eq!(lo, up, max_relative = 1e-12);
            assert_relative_eq!(lo, t.green_eval(y, y).unwrap(), max_relative = 1e-12);
        }
        assert!(t.green_eval(1.1, 0.0).is_err());
    }

    #[test]
    fn zero_source_solves_to_zero() {
        let t = constant_table(0.3, 0.2, 32, 32).unwrap();
        let u = green_solve(&t, &SourceFunction::zero());
        assert!(u.u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn matrix_is_capped() {
        let t = constant_table(0.3, 0.2, 100, 16).unwrap();
        assert!(t.matrix.dim() <= 18);
        assert_eq!(*t.matrix.indices.last().unwrap(), 100);
        let (min, _) = t.positivity_scan();
        assert!(min > 0.0);
    }

    #[test]
    fn positivity_scan_ignores_matrix_cap() {
        let t = constant_table(0.4, 0.3, 40, 0).unwrap();
        let x = t.grid.nodes();
        let mut brute = f64::INFINITY;
        for &a in &x[1..40] {
            for &b in &x[1..40] {
                brute = brute.min(t.green_eval(a, b).unwrap());
            }
        }
        let (min, (a, b)) = t.positivity_scan();
        assert_relative_eq!(min, brute, max_relative = 1e-12);
        assert_relative_eq!(t.green_eval(a, b).unwrap(), min, max_relative = 1e-12);
    }
}
