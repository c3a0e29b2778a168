//! Content hashes that key golden files and Green's matrix dumps.

use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the canonical JSON of the problem and the cell count.
///
/// `serde_json::Value` objects keep their keys sorted, so the encoding does
/// not depend on field order in the source file.
pub fn scenario_hash(cfg: &ScenarioConfig) -> String {
    let value = serde_json::json!({ "problem": cfg.problem, "n_cells": cfg.grid.n_cells });
    hex(&Sha256::digest(value.to_string().as_bytes()))
}

/// SHA-256 of the node coordinates as little-endian doubles.
pub fn grid_hash(nodes: &[f64]) -> String {
    let mut h = Sha256::new();
    for x in nodes {
        h.update(x.to_le_bytes());
    }
    hex(&h.finalize())
}
