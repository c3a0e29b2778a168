//! Odd power functions and the remainder integral of their Taylor formula.

use crate::error::{Error, Result};
use crate::math::{abs_pow, expm1, ln_1p};

/// Relative size of `b` below which [`theta_integral`] uses the constant-integrand limit.
pub const THETA_DEGENERACY: f64 = 1e-12;

/// `Φ_q(z) = |z|^{q-1} sign z`, with `Φ_q(0) = 0`.
///
/// Odd and strictly increasing for `q > 1`; `Φ_{q'}` with `1/q + 1/q' = 1`
/// is its inverse.
#[inline]
pub fn phi_pow(q: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let m = abs_pow(z, q - 1.0);
    if z > 0.0 {
        m
    } else {
        -m
    }
}

/// Conjugate exponent `q / (q - 1)`.
#[inline]
pub fn conjugate(q: f64) -> f64 {
    q / (q - 1.0)
}

/// `∫_0^1 |a + θ b|^{p-2} dθ`.
///
/// Closed form `(ψ(a+b) - ψ(a)) / ((p-1) b)` with `ψ(t) = |t|^{p-2} t`. When
/// the segment `[a, a+b]` does not cross zero and `|b| < |a|/2` the difference
/// is evaluated through `expm1`/`log1p` so that no digits cancel; below the
/// degeneracy threshold the constant-integrand limit with a first-order
/// correction is returned.
pub fn theta_integral(a: f64, b: f64, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain("theta_integral requires p > 1"));
    }
    if p == 2.0 {
        return Ok(1.0);
    }
    let e = p - 2.0;
    if a == 0.0 {
        if b == 0.0 {
            return if p > 2.0 {
                Ok(0.0)
            } else {
                Err(Error::Domain("theta_integral integrand is singular for p < 2 at a = b = 0"))
            };
        }
        return Ok(abs_pow(b, e) / (p - 1.0));
    }
    if b.abs() <= THETA_DEGENERACY * a.abs().max(1.0) {
        return Ok(abs_pow(a, e) * (1.0 + 0.5 * e * b / a));
    }
    let r = b / a;
    if r.abs() < 0.5 {
        // 1 + r > 0: the integrand never vanishes.
        let growth = expm1((p - 1.0) * ln_1p(r));
        return Ok(abs_pow(a, e) * growth / ((p - 1.0) * r));
    }
    let psi = |t: f64| phi_pow(p, t);
    Ok((psi(a + b) - psi(a)) / ((p - 1.0) * b))
}

/// `T_k(v) = max(-k, min(v, k))`.
#[inline]
pub fn truncate(value: f64, k: f64) -> f64 {
    value.min(k).max(-k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Adaptive Simpson on `θ -> |a + θ b|^{p-2}`, split at the zero of the
    /// integrand so each panel is smooth on its interior.
    fn theta_by_quadrature(a: f64, b: f64, p: f64) -> f64 {
        let g = |t: f64| (a + t * b).abs().powf(p - 2.0);
        let mut cuts = vec![0.0, 1.0];
        if b != 0.0 {
            let z = -a / b;
            if z > 0.0 && z < 1.0 {
                cuts.insert(1, z);
            }
        }
        cuts.windows(2).map(|w| adaptive_simpson(&g, w[0], w[1], 1e-13, 50)).sum()
    }

    fn adaptive_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (g(a) + 4.0 * g(m) + g(b));
        recurse(g, a, b, g(a), g(m), g(b), whole, tol, depth)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        g: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = g(lm);
        let frm = g(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    #[test]
    fn phi_pow_examples() {
        assert_eq!(phi_pow(3.0, 2.0), 4.0);
        assert_relative_eq!(phi_pow(1.5, -4.0), -2.0, max_relative = 1e-15);
        assert_eq!(phi_pow(2.7, 0.0), 0.0);
    }

    #[test]
    fn theta_integral_examples() {
        assert_relative_eq!(theta_integral(1.0, 1.0, 4.0).unwrap(), 7.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(theta_integral(-2.0, 0.0, 3.0).unwrap(), 2.0, max_relative = 1e-15);
        // ∫|−1+2θ| = 2·∫_0^{1/2} (1 − 2θ) dθ = 1/2.
        assert_relative_eq!(theta_integral(-1.0, 2.0, 3.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(theta_by_quadrature(-1.0, 2.0, 3.0), 0.5, max_relative = 1e-10);
    }

    #[test]
    fn theta_integral_rejects_bad_exponent() {
        assert!(theta_integral(1.0, 1.0, 1.0).is_err());
        assert!(theta_integral(0.0, 0.0, 1.5).is_err());
        assert_eq!(theta_integral(0.0, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_integral_is_continuous_across_regimes() {
        let a = 0.7;
        for &b in &[1e-13, 1e-11, 1e-6, 0.349, 0.351, 0.5] {
            let exact = theta_by_quadrature(a, b, 3.7);
            assert_relative_eq!(theta_integral(a, b, 3.7).unwrap(), exact, max_relative = 1e-11);
        }
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(truncate(0.3, 1.0), 0.3);
        assert_eq!(truncate(-5.0, 1.0), -1.0);
        let once = truncate(2.5, 1.2);
        assert_eq!(truncate(once, 1.2), once);
    }

    proptest! {
        #[test]
        fn phi_conjugate_inverts(z in -10.0f64..10.0, p in 1.05f64..6.0) {
            let back = phi_pow(conjugate(p), phi_pow(p, z));
            prop_assert!((back - z).abs() <= 1e-10 * z.abs().max(1e-300));
        }

        #[test]
        fn phi_is_odd_and_monotone(z in -10.0f64..10.0, dz in 1e-6f64..1.0, q in 1.05f64..6.0) {
            prop_assert_eq!(phi_pow(q, -z), -phi_pow(q, z));
            prop_assert!(phi_pow(q, z + dz) > phi_pow(q, z));
        }

        #[test]
        fn theta_closed_form_matches_quadrature(a in -5.0f64..5.0, b in -5.0f64..5.0, p in 2.1f64..6.0) {
            let closed = theta_integral(a, b, p).unwrap();
            let quad = theta_by_quadrature(a, b, p);
            prop_assert!((closed - quad).abs() <= 1e-8, "closed {closed} quad {quad}");
            prop_assert!(closed >= 0.0);
        }

        #[test]
        fn truncate_is_nonexpansive_and_odd(a in -20.0f64..20.0, b in -20.0f64..20.0, k in 0.0f64..10.0) {
            prop_assert!((truncate(a, k) - truncate(b, k)).abs() <= (a - b).abs());
            prop_assert_eq!(truncate(-a, k), -truncate(a, k));
            prop_assert_eq!(truncate(truncate(a, k), k), truncate(a, k));
        }
    }
}
