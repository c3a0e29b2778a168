//! Physical parameters of a scenario.

use crate::error::{Error, Result};
use crate::math::{abs_pow, cos, sin, tan};
use crate::source::SourceFunction;

/// Parameters of the steady problem and of the transient problem with equal
/// ditch levels.
///
/// Trigonometric values, the drift coefficient and the `L¹` norm of the
/// source are computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    p: f64,
    conj_p: f64,
    head: f64,
    phi: f64,
    conductivity: f64,
    source: SourceFunction,
    sin_phi: f64,
    cos_phi: f64,
    tan_phi: f64,
    l1_norm: f64,
    nonnegative: bool,
}

impl ProblemSpec {
    /// `p > 1`, ditch level `head > 0`, slope angle `phi ∈ (0, π/2)`; unit conductivity.
    pub fn new(p: f64, head: f64, phi: f64, source: SourceFunction) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter("p must be a finite number > 1"));
        }
        if !(head.is_finite() && head > 0.0) {
            return Err(Error::InvalidParameter("H must be finite and > 0"));
        }
        if !(phi > 0.0 && phi < core::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter("phi must lie in (0, pi/2)"));
        }
        let conj_p = p / (p - 1.0);
        debug_assert!((conj_p * (p - 1.0) - p).abs() <= 1e-12 * p);
        Ok(ProblemSpec {
            p,
            conj_p,
            head,
            phi,
            conductivity: 1.0,
            l1_norm: source.l1_norm(),
            nonnegative: source.is_nonnegative(),
            source,
            sin_phi: sin(phi),
            cos_phi: cos(phi),
            tan_phi: tan(phi),
        })
    }

    pub fn with_conductivity(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter("conductivity must be finite and > 0"));
        }
        self.conductivity = c;
        Ok(self)
    }

    pub fn with_source(&self, source: SourceFunction) -> Self {
        let mut out = self.clone();
        out.l1_norm = source.l1_norm();
        out.nonnegative = source.is_nonnegative();
        out.source = source;
        out
    }

    /// Equivalent problem with unit conductivity: the steady state for
    /// conductivity `c` and source `f` solves the normalized problem with `f / c`.
    pub fn normalized(&self) -> Self {
        if self.conductivity == 1.0 {
            return self.clone();
        }
        let mut out = self.with_source(self.source.scaled(1.0 / self.conductivity));
        out.conductivity = 1.0;
        out
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn conj_p(&self) -> f64 {
        self.conj_p
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn conductivity(&self) -> f64 {
        self.conductivity
    }

    pub fn source(&self) -> &SourceFunction {
        &self.source
    }

    pub fn sin_phi(&self) -> f64 {
        self.sin_phi
    }

    pub fn cos_phi(&self) -> f64 {
        self.cos_phi
    }

    pub fn tan_phi(&self) -> f64 {
        self.tan_phi
    }

    /// Drift coefficient `λ = (sin φ)^{p-1}`.
    pub fn lambda(&self) -> f64 {
        abs_pow(self.sin_phi, self.p - 1.0)
    }

    /// `‖f‖_{L¹(-1,1)}`.
    pub fn source_l1(&self) -> f64 {
        self.l1_norm
    }

    pub fn source_nonnegative(&self) -> bool {
        self.nonnegative
    }
}
