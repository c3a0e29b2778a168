//! Scenario runner for the `slopeflow-core` kernel.
//!
//! A scenario is one strict JSON document ([`config::ScenarioConfig`]). The
//! subcommands in [`commands`] solve it, run the theorem suite in [`suite`],
//! and write CSV and JSON artifacts whose floats round-trip exactly, so
//! identical inputs produce byte-identical outputs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod hash;
pub mod io;
pub mod report;
pub mod suite;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
