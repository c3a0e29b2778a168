//! Numerical kernel for the generalized Boussinesq equation on an inclined
//! impermeable bed.
//!
//! Groundwater between two parallel ditches at `x = -1` and `x = 1` is
//! modelled with a power-law (Smreker–Izbash) constitutive relation of
//! exponent `p - 1`. The steady state `ĥ = u + H` solves
//!
//! ```text
//! -d/dx [ (u + H) Φ_p(u' cos φ + sin φ) ] = f,   u(-1) = u(1) = 0,
//! ```
//!
//! and the full time-dependent problem is the degenerate parabolic equation
//! `∂ĥ/∂t - c ∂/∂x [ĥ Φ_p(∂ĥ/∂x cos φ + sin φ)] = f`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! - [`power`]: odd power functions, the θ-integral remainder, truncation.
//! - [`source`]: piecewise-polynomial sources with exact integrals.
//! - [`hypothesis`]: the integral hypothesis on `f` and every explicit a priori
//!   constant derived from it.
//! - [`steady`]: first-order reduction plus shooting on `u'(1)`.
//! - [`oracle`]: an independent damped-Newton finite-element solver.
//! - [`linearize`]: the diffusion coefficient of the linearized problem.
//! - [`greens`]: Green's function of the linearized drift-diffusion operator.
//! - [`transient`]: explicit conservative time stepping.
//! - [`verify`]: maximum principles and structural inequalities as checks.
//!
//! File formats, the CLI and parallel sweeps live in the `slopeflow` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod grid;
pub mod greens;
pub mod hypothesis;
pub mod linearize;
pub mod oracle;
pub mod power;
pub mod problem;
pub mod profile;
pub mod quad;
pub mod source;
pub mod steady;
pub mod transient;
pub mod verify;

pub use error::{Error, Result};
pub use grid::Grid;
pub use greens::GreensTable;
pub use hypothesis::BoundsReport;
pub use problem::ProblemSpec;
pub use profile::{DiffusionProfile, FloorKind, SolutionProfile};
pub use source::{Polynomial, SourceFunction};
