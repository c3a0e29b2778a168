//! Piecewise-polynomial source functions with exact integral calculus.
//!
//! Every integral of `f` the solvers need (tail integrals, moments against
//! hat functions, `L¹` norms) is evaluated through polynomial antiderivatives,
//! so quadrature error never mixes with solver error.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::constant(0.0);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Polynomial::new(out)
    }

    /// Product with `c0 + c1 x`.
    pub fn mul_linear(&self, c0: f64, c1: f64) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c * c0;
            out[k + 1] += c * c1;
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// Real roots in the open interval `(a, b)`, isolated recursively between
    /// the critical points (where the polynomial is monotone) and refined by
    /// bisection.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r > a && r < b { vec![r] } else { Vec::new() };
        }
        let mut knots = vec![a];
        knots.extend(self.derivative().roots_in(a, b));
        knots.push(b);
        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (l, r) = (w[0], w[1]);
            let (fl, fr) = (self.eval(l), self.eval(r));
            if fl == 0.0 && l > a {
                roots.push(l);
            } else if fl * fr < 0.0 {
                roots.push(bisect(|x| self.eval(x), l, r, fl));
            }
        }
        roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + x.abs()));
        roots
    }

    /// Minimum over `[a, b]`, attained at an endpoint or a critical point.
    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        self.derivative()
            .roots_in(a, b)
            .into_iter()
            .chain([a, b])
            .map(|x| self.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `∫_a^b |p|`.
    pub fn abs_integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        let mut knots = vec![a];
        knots.extend(self.roots_in(a, b));
        knots.push(b);
        knots.windows(2).map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs()).sum()
    }
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut glo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One polynomial piece of a source on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub poly: Polynomial,
}

/// Piecewise-polynomial source `f` on `[-1, 1]`.
///
/// Pieces partition the interval; at an interior breakpoint the piece to the
/// right is used for point evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFunction {
    pieces: Vec<Piece>,
    antiderivatives: Vec<Polynomial>,
    /// `∫_{b_i}^1 f` for each piece `i`.
    tail_after: Vec<f64>,
}

const BREAK_TOL: f64 = 1e-14;

impl SourceFunction {
    pub fn from_pieces(raw: Vec<(f64, f64, Vec<f64>)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidSource("at least one piece is required"));
        }
        let mut pieces = Vec::with_capacity(raw.len());
        for (a, b, coeffs) in raw {
            if !(a.is_finite() && b.is_finite()) || !(b > a) {
                return Err(Error::InvalidSource("piece intervals must satisfy a < b"));
            }
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSource("coefficients must be finite and non-empty"));
            }
            pieces.push(Piece { a, b, poly: Polynomial::new(coeffs) });
        }
        if (pieces[0].a + 1.0).abs() > BREAK_TOL || (pieces.last().unwrap().b - 1.0).abs() > BREAK_TOL
        {
            return Err(Error::InvalidSource("pieces must span [-1, 1]"));
        }
        pieces[0].a = -1.0;
        pieces.last_mut().unwrap().b = 1.0;
        for i in 1..pieces.len() {
            if (pieces[i].a - pieces[i - 1].b).abs() > BREAK_TOL {
                return Err(Error::InvalidSource("pieces must be contiguous and ordered"));
            }
            pieces[i].a = pieces[i - 1].b;
        }
        Ok(Self::assemble(pieces))
    }

    fn assemble(pieces: Vec<Piece>) -> Self {
        let antiderivatives: Vec<Polynomial> =
            pieces.iter().map(|pc| pc.poly.antiderivative()).collect();
        let mut tail_after = vec![0.0; pieces.len()];
        for i in (0..pieces.len().saturating_sub(1)).rev() {
            let next = &pieces[i + 1];
            let anti = &antiderivatives[i + 1];
            tail_after[i] = tail_after[i + 1] + anti.eval(next.b) - anti.eval(next.a);
        }
        SourceFunction { pieces, antiderivatives, tail_after }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::assemble(vec![Piece { a: -1.0, b: 1.0, poly: Polynomial::constant(c) }])
    }

    /// Single polynomial on the whole interval.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::from_pieces(vec![(-1.0, 1.0, coeffs)])
    }

    /// `value` on `[a, b] ⊂ [-1, 1]`, zero elsewhere.
    pub fn indicator(a: f64, b: f64, value: f64) -> Result<Self> {
        if !(-1.0 <= a && a < b && b <= 1.0) {
            return Err(Error::InvalidSource("indicator support must lie in [-1, 1]"));
        }
        let mut raw = Vec::new();
        if a > -1.0 {
            raw.push((-1.0, a, vec![0.0]));
        }
        raw.push((a, b, vec![value]));
        if b < 1.0 {
            raw.push((b, 1.0, vec![0.0]));
        }
        Self::from_pieces(raw)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior breakpoints.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().skip(1).map(|pc| pc.a)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::assemble(
            self.pieces
                .iter()
                .map(|pc| Piece { a: pc.a, b: pc.b, poly: pc.poly.scale(s) })
                .collect(),
        )
    }

    fn piece_index(&self, x: f64) -> usize {
        // first piece whose right end exceeds x; the last piece owns x = 1
        let idx = self.pieces.partition_point(|pc| pc.b <= x);
        idx.min(self.pieces.len() - 1)
    }

    fn check_domain(x: f64) -> Result<()> {
        if (-1.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(Error::Domain("source functions are defined on [-1, 1]"))
        }
    }

    /// `f(x)`; `x` is clamped to `[-1, 1]`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        self.pieces[self.piece_index(x)].poly.eval(x)
    }

    /// `F(x) = ∫_x^1 f`, exact; `x` is clamped to `[-1, 1]`.
    #[inline]
    pub fn tail_unchecked(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let i = self.piece_index(x);
        let anti = &self.antiderivatives[i];
        anti.eval(self.pieces[i].b) - anti.eval(x) + self.tail_after[i]
    }

    /// `F(x) = ∫_x^1 f` with domain checking.
    pub fn tail(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        Ok(self.tail_unchecked(x))
    }

    /// `∫_a^b f` for `-1 <= a <= b <= 1`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.tail_unchecked(a) - self.tail_unchecked(b)
    }

    /// `∫_a^b f(x) (c0 + c1 x) dx`, exact.
    pub fn moment(&self, a: f64, b: f64, c0: f64, c1: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let mut total = 0.0;
        for pc in &self.pieces {
            let lo = pc.a.max(a);
            let hi = pc.b.min(b);
            if hi > lo {
                total += pc.poly.mul_linear(c0, c1).integral(lo, hi);
            }
        }
        total
    }

    /// `‖f‖_{L¹(-1,1)}`.
    pub fn l1_norm(&self) -> f64 {
        self.pieces.iter().map(|pc| pc.poly.abs_integral(pc.a, pc.b)).sum()
    }

    /// Minimum of `f` over `[-1, 1]` (infimum over the closed pieces).
    pub fn min_value(&self) -> f64 {
        self.pieces.iter().map(|pc| pc.poly.min_on(pc.a, pc.b)).fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.min_value() >= 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|pc| pc.poly.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn tail_examples() {
        let zero = SourceFunction::zero();
        assert_eq!(zero.tail(0.3).unwrap(), 0.0);
        let c = SourceFunction::constant(0.7);
        for &x in &[-1.0, -0.2, 0.5, 1.0] {
            assert_abs_diff_eq!(c.tail(x).unwrap(), 0.7 * (1.0 - x), epsilon = 1e-15);
        }
        let odd = SourceFunction::polynomial(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(odd.tail(-1.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(odd.tail(1.5).is_err());
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        assert!(SourceFunction::from_pieces(vec![(-1.0, 0.0, vec![1.0]), (0.1, 1.0, vec![1.0])]).is_err());
        assert!(SourceFunction::from_pieces(vec![(-1.0, 0.5, vec![1.0]), (0.2, 1.0, vec![1.0])]).is_err());
        assert!(SourceFunction::from_pieces(vec![(-0.9, 1.0, vec![1.0])]).is_err());
        assert!(SourceFunction::from_pieces(vec![]).is_err());
    }

    #[test]
    fn indicator_tail_is_continuous() {
        let f = SourceFunction::indicator(0.0, 0.5, 2.0).unwrap();
        assert_abs_diff_eq!(f.tail(-1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.tail(0.25).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.tail(0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(f.eval(0.0), 2.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.0), 0.0);
    }

    #[test]
    fn l1_norm_and_sign() {
        let odd = SourceFunction::polynomial(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(odd.l1_norm(), 1.0, epsilon = 1e-15);
        assert!(!odd.is_nonnegative());
        // x^2 - 1/4 changes sign at ±1/2: ∫|.| = 2(1/12 + 1/6·...) computed by hand = 1/2
        let q = SourceFunction::polynomial(vec![-0.25, 0.0, 1.0]).unwrap();
        // ∫_{-1}^{1} |x² − 1/4| = 2[∫_0^{1/2}(1/4 − x²) + ∫_{1/2}^1 (x² − 1/4)] = 2[1/12 + 1/6] = 1/2
        assert_abs_diff_eq!(q.l1_norm(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(q.min_value(), -0.25, epsilon = 1e-15);
        let bump = SourceFunction::polynomial(vec![1.0, 0.0, -1.0]).unwrap();
        assert!(bump.is_nonnegative());
    }

    #[test]
    fn moment_against_linear_weight() {
        let f = SourceFunction::polynomial(vec![1.0, 2.0]).unwrap();
        // ∫_0^1 (1 + 2x)(3 − x) dx = ∫ 3 + 5x − 2x² = 3 + 5/2 − 2/3
        assert_abs_diff_eq!(f.moment(0.0, 1.0, 3.0, -1.0), 3.0 + 2.5 - 2.0 / 3.0, epsilon = 1e-14);
    }

    fn arb_source() -> impl Strategy<Value = SourceFunction> {
        (1usize..4, prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 1..5), 4), prop::collection::vec(0.1f64..1.0, 4))
            .prop_map(|(n, coeffs, widths)| {
                let total: f64 = widths[..n].iter().sum();
                let mut a = -1.0;
                let mut raw = Vec::new();
                for i in 0..n {
                    let b = if i + 1 == n { 1.0 } else { a + 2.0 * widths[i] / total };
                    raw.push((a, b, coeffs[i].clone()));
                    a = b;
                }
                SourceFunction::from_pieces(raw).unwrap()
            })
    }

    proptest! {
        #[test]
        fn tail_derivative_is_minus_f(f in arb_source(), t in 0.05f64..0.95) {
            let pc = &f.pieces()[0];
            let x = pc.a + t * (pc.b - pc.a);
            let h = 1e-4 * (pc.b - pc.a);
            let fd = (f.tail_unchecked(x + h) - f.tail_unchecked(x - h)) / (2.0 * h);
            let scale = 1.0 + f.eval(x).abs();
            prop_assert!((fd + f.eval(x)).abs() <= 1e-6 * scale);
        }

        #[test]
        fn tail_is_continuous_and_vanishes_at_one(f in arb_source()) {
            prop_assert!(f.tail_unchecked(1.0).abs() <= 1e-15);
            for x in f.breakpoints() {
                let jump = (f.tail_unchecked(x - 1e-12) - f.tail_unchecked(x + 1e-12)).abs();
                prop_assert!(jump < 1e-9);
            }
        }

        #[test]
        fn l1_norm_dominates_integrals(f in arb_source(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(f.integral(lo, hi).abs() <= f.l1_norm() + 1e-12);
        }
    }
}
