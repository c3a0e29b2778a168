//! The diffusion coefficient of the linearization at a steady solution.
//!
//! For `p > 2` a steady solution `u` also solves the linear problem
//! `-(D u')' - (sin φ)^{p-1} u' = f` with
//!
//! ```text
//! D(x) = (u + H) (p - 1) ∫_0^1 |sin φ + θ u'(x) cos φ|^{p-2} dθ · cos φ,
//! ```
//!
//! which follows from the zero-order Taylor formula for `Φ_p` around `sin φ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypothesis::{diffusion_floor, measured_floor};
use crate::power::{phi_pow, theta_integral};
use crate::problem::ProblemSpec;
use crate::profile::{DiffusionProfile, FloorKind, SolutionProfile};

/// `D` at a single point from `u` and `u'`.
pub fn diffusion_at(spec: &ProblemSpec, u: f64, du: f64) -> Result<f64> {
    let theta = theta_integral(spec.sin_phi(), du * spec.cos_phi(), spec.p())?;
    Ok((u + spec.head()) * (spec.p() - 1.0) * theta * spec.cos_phi())
}

/// Nodal `D` for `profile`, carrying the strongest certified floor that applies.
pub fn build_diffusion(spec: &ProblemSpec, profile: &SolutionProfile) -> Result<DiffusionProfile> {
    if !(spec.p() > 2.0) {
        return Err(Error::UnsupportedExponent { p: spec.p() });
    }
    if !(profile.min_head > 0.0) {
        return Err(Error::ConditionViolated("linearization needs u + H > 0 on the grid"));
    }
    let spec = &spec.normalized();
    let d = profile
        .u
        .iter()
        .zip(&profile.du)
        .map(|(&u, &du)| diffusion_at(spec, u, du))
        .collect::<Result<Vec<f64>>>()?;
    let (floor_kind, floor_value) = match diffusion_floor(spec) {
        Ok(pair) => pair,
        Err(Error::ConditionViolated(_)) => {
            (FloorKind::MeasuredHead, measured_floor(spec, profile.min_head))
        }
        Err(e) => return Err(e),
    };
    Ok(DiffusionProfile {
        grid: profile.grid.clone(),
        d,
        floor_kind,
        floor_value,
        head: spec.head(),
    })
}

/// `(p - 1) ∫_0^1 |1 + θ a|^{p-2} dθ`, which is at least `1/2` for `p > 2`.
pub fn lemma_half_bound(a: f64, p: f64) -> Result<f64> {
    if !(p > 2.0) {
        return Err(Error::UnsupportedExponent { p });
    }
    Ok((p - 1.0) * theta_integral(1.0, a, p)?)
}

/// `|(Φ_p(a) - Φ_p(b)) - (p-1) ∫_0^1 |b + θ(a-b)|^{p-2} dθ · (a - b)|`.
pub fn taylor_remainder_check(a: f64, b: f64, p: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let lhs = phi_pow(p, a) - phi_pow(p, b);
    let rhs = (p - 1.0) * theta_integral(b, a - b, p)? * (a - b);
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::source::SourceFunction;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_profile_gives_constant_coefficient() {
        let spec = ProblemSpec::new(3.5, 1.2, 0.4, SourceFunction::zero()).unwrap();
        let grid = Grid::uniform(8).unwrap();
        let profile = SolutionProfile {
            grid: grid.clone(),
            u: vec![0.0; 9],
            du: vec![0.0; 9],
            s_end: 0.0,
            kappa: 0.0,
            residual_first_order: 0.0,
            min_head: 1.2,
        };
        let d = build_diffusion(&spec, &profile).unwrap();
        // (p - 1) H (sin φ)^{p-2} cos φ
        let expected = 2.5 * 1.2 * 0.4f64.sin().powf(1.5) * 0.4f64.cos();
        for v in d.d {
            assert_relative_eq!(v, expected, max_relative = 1e-14);
        }
        assert_eq!(d.floor_kind, FloorKind::NonnegativeSource);
    }

    #[test]
    fn half_bound_examples() {
        assert_relative_eq!(lemma_half_bound(0.0, 4.0).unwrap(), 3.0, max_relative = 1e-15);
        assert_relative_eq!(lemma_half_bound(-2.0, 3.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(lemma_half_bound(-2.0, 2.5).unwrap(), 1.0, max_relative = 1e-12);
        assert!(lemma_half_bound(1.0, 2.0).is_err());
    }

    #[test]
    fn taylor_examples() {
        assert_eq!(taylor_remainder_check(1.0, 1.0, 3.3).unwrap(), 0.0);
        assert!(taylor_remainder_check(2.0, 0.0, 3.0).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_p_at_most_two() {
        let spec = ProblemSpec::new(2.0, 1.0, 0.4, SourceFunction::zero()).unwrap();
        let grid = Grid::uniform(4).unwrap();
        let profile = SolutionProfile {
            grid,
            u: vec![0.0; 5],
            du: vec![0.0; 5],
            s_end: 0.0,
            kappa: 0.0,
            residual_first_order: 0.0,
            min_head: 1.0,
        };
        assert!(matches!(build_diffusion(&spec, &profile), Err(Error::UnsupportedExponent { .. })));
    }

    proptest! {
        #[test]
        fn half_bound_holds(a in -50.0f64..50.0, p in 2.0001f64..8.0) {
            prop_assert!(lemma_half_bound(a, p).unwrap() >= 0.5 - 1e-12);
        }

        #[test]
        fn taylor_identity(a in -5.0f64..5.0, b in -5.0f64..5.0, p in 2.1f64..6.0) {
            let tol = 1e-10 * (1.0 + a.abs().powf(p - 1.0) + b.abs().powf(p - 1.0));
            prop_assert!(taylor_remainder_check(a, b, p).unwrap() <= tol);
        }
    }
}
