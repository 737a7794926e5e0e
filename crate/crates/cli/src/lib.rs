//! Experiment runner for trust-aware reward shaping on the search-and-rescue game.
//!
//! Each command builds an [`ExperimentConfig`], runs, and writes one output
//! file carrying a [`output::Metadata`] block.

pub mod config;
pub mod output;
pub mod simulate;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, ExperimentConfig, GridConfig};

use trust_shaping::lp_design::{build_lp, solve_closed_form};
use trust_shaping::LinearPotential;

/// Closed-form potential for budget `epsilon`, times `potential_scale`.
pub fn design_potential(config: &ExperimentConfig, epsilon: f64) -> LinearPotential {
    let sar = &config.sar;
    let lp = build_lp(sar.trust_gains, sar.gamma, sar.horizon, epsilon);
    solve_closed_form(&lp).scaled(config.potential_scale)
}
