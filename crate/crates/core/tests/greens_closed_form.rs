//! Constant-coefficient Green's function against an independent derivation.
//!
//! For `D ≡ d0` the operator `-d0 u'' - λ u'` has the homogeneous solutions
//! `1` and `e^{-a x}`, `a = λ/d0`. The Green's function is assembled here from
//! `w1(x) = 1 - e^{-a(x+1)}` (zero at `-1`), `w2(x) = 1 - e^{a(1-x)}` (zero at
//! `1`), continuity at `y` and the jump `[∂G/∂x] = -1/d0`, solved as a 2×2
//! system rather than through the weight functions used by the crate.

use proptest::prelude::*;
use slopeflow_core::greens::{constant_table, green_solve};
use slopeflow_core::SourceFunction;

struct ConstantGreen {
    d0: f64,
    a: f64,
}

impl ConstantGreen {
    fn new(d0: f64, lambda: f64) -> Self {
        ConstantGreen { d0, a: lambda / d0 }
    }

    fn w1(&self, x: f64) -> f64 {
        1.0 - (-self.a * (x + 1.0)).exp()
    }

    fn w2(&self, x: f64) -> f64 {
        1.0 - (self.a * (1.0 - x)).exp()
    }

    fn dw1(&self, x: f64) -> f64 {
        self.a * (-self.a * (x + 1.0)).exp()
    }

    fn dw2(&self, x: f64) -> f64 {
        self.a * (self.a * (1.0 - x)).exp()
    }

    /// Coefficients `(α, β)` with `G = α w1` left of `y` and `G = β w2` right of it.
    fn coefficients(&self, y: f64) -> (f64, f64) {
        // α w1(y) - β w2(y) = 0,  β w2'(y) - α w1'(y) = -1/d0
        let (m11, m12, m21, m22) = (self.w1(y), -self.w2(y), -self.dw1(y), self.dw2(y));
        let det = m11 * m22 - m12 * m21;
        let rhs2 = -1.0 / self.d0;
        let alpha = (-m12 * rhs2) / det;
        let beta = (m11 * rhs2) / det;
        (alpha, beta)
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        let (alpha, beta) = self.coefficients(y);
        if x <= y {
            alpha * self.w1(x)
        } else {
            beta * self.w2(x)
        }
    }

    /// `sup_{x, y} |∂G/∂x|`; `|w1'|` peaks at `x = -1` and `|w2'|` at `x = 1`,
    /// so only a scan over `y` remains.
    fn lipschitz(&self) -> f64 {
        let m = 200_000;
        (0..=m)
            .map(|k| -1.0 + 2.0 * k as f64 / m as f64)
            .map(|y| {
                let (alpha, beta) = self.coefficients(y);
                (alpha * self.dw1(-1.0)).abs().max((beta * self.dw2(1.0)).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Solution of `-d0 u'' - λ u' = 1` with `u(±1) = 0`.
    fn unit_load(&self, x: f64) -> f64 {
        let lambda = self.a * self.d0;
        let c2 = -1.0 / (lambda * self.a.sinh());
        let c1 = 1.0 / lambda - c2 * (-self.a).exp();
        -x / lambda + c1 + c2 * (-self.a * x).exp()
    }
}

const CASES: [(f64, f64); 4] = [(0.5, 0.5), (0.2, 0.05), (1.3, 0.9), (0.05, 0.2)];

#[test]
fn table_matches_closed_form() {
    for (d0, lambda) in CASES {
        let table = constant_table(d0, lambda, 256, 256).unwrap();
        let exact = ConstantGreen::new(d0, lambda);
        let m = 97;
        let mut err: f64 = 0.0;
        for i in 0..=m {
            for j in 0..=m {
                let x = -1.0 + 2.0 * i as f64 / m as f64;
                let y = -1.0 + 2.0 * j as f64 / m as f64;
                err = err.max((table.green_eval(x, y).unwrap() - exact.eval(x, y)).abs());
            }
        }
        assert!(err <= 1e-8, "d0={d0} lambda={lambda}: max error {err:e}");
    }
}

#[test]
fn unit_load_matches_closed_form() {
    for (d0, lambda) in CASES {
        let table = constant_table(d0, lambda, 512, 0).unwrap();
        let exact = ConstantGreen::new(d0, lambda);
        let u = green_solve(&table, &SourceFunction::constant(1.0));
        let err = table
            .grid
            .nodes()
            .iter()
            .zip(&u.u)
            .map(|(&x, &v)| (v - exact.unit_load(x)).abs())
            .fold(0.0, f64::max);
        let scale = exact.unit_load(0.0).abs().max(1.0);
        assert!(err <= 1e-10 * scale, "d0={d0} lambda={lambda}: max error {err:e}");
        assert_eq!(u.u[0], 0.0);
        assert_eq!(*u.u.last().unwrap(), 0.0);
    }
}

#[test]
fn lipschitz_constant_matches_closed_form() {
    for (d0, lambda) in CASES {
        let table = constant_table(d0, lambda, 256, 0).unwrap();
        let exact = ConstantGreen::new(d0, lambda).lipschitz();
        let estimate = table.lipschitz_estimate(8);
        assert!(
            ((estimate - exact) / exact).abs() <= 1e-6,
            "d0={d0} lambda={lambda}: {estimate} vs {exact}"
        );
    }
}

#[test]
fn positivity_and_weight_gap() {
    for (d0, lambda) in CASES {
        let table = constant_table(d0, lambda, 128, 128).unwrap();
        let (min, _) = table.positivity_scan();
        assert!(min > 0.0);
        assert!(table.weight_gap_min() >= table.weight_gap_bound() * (1.0 - 1e-12));
        assert!(table.weight_gap_bound() > 0.0);
        for (&em, &ep) in table.e_minus.iter().zip(&table.e_plus).skip(1).take(127) {
            assert!(0.0 < em && em < 1.0 && ep > 1.0);
        }
    }
}

proptest! {
    #[test]
    fn random_triples_respect_lipschitz_bound(
        s in -1.0f64..=1.0,
        t in -1.0f64..=1.0,
        y in -1.0f64..=1.0,
        case in 0usize..CASES.len(),
    ) {
        let (d0, lambda) = CASES[case];
        let table = constant_table(d0, lambda, 64, 0).unwrap();
        let kappa = table.lipschitz_estimate(8);
        let lhs = (table.green_eval(s, y).unwrap() - table.green_eval(t, y).unwrap()).abs();
        prop_assert!(lhs <= kappa * (s - t).abs() * (1.0 + 1e-8) + 1e-15);
    }
}
