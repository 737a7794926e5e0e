//! Output files and their metadata block.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use trust_shaping::sar::ThreatMode;

use crate::config::{ExperimentConfig, GridConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub samples: usize,
    pub epsilons: Vec<f64>,
    pub grid: GridConfig,
    pub threat_mode: ThreatMode,
    pub first_observation: Option<f64>,
}

impl Metadata {
    pub fn new(config: &ExperimentConfig, command: &'static str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_hash: config.hash(),
            seed: config.seed,
            samples: config.samples,
            epsilons: config.epsilons.clone(),
            grid: config.grid,
            threat_mode: config.sar.threat_mode,
            first_observation: config.sar.first_observation,
        }
    }
}

/// Writes `bytes` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serialises");
    bytes.push(b'\n');
    bytes
}
