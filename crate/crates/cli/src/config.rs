//! Experiment configuration: strict JSON with documented defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use trust_shaping::sar::SarConfig;
use trust_shaping::TrustState;

/// Axis-aligned grid of initial trust states `(alpha_1, beta_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub step: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            alpha_min: 1.0,
            alpha_max: 11.0,
            beta_min: 1.0,
            beta_max: 11.0,
            step: 0.25,
        }
    }
}

impl GridConfig {
    /// Parses `a_min,a_max,b_min,b_max,step`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad grid value {s:?}")))
            .collect::<Result<_>>()?;
        let [alpha_min, alpha_max, beta_min, beta_max, step] = parts[..] else {
            bail!(
                "grid needs 5 comma-separated values a_min,a_max,b_min,b_max,step, got {}",
                parts.len()
            );
        };
        Ok(Self {
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
            step,
        })
    }

    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        // Points are computed from the index so no rounding accumulates.
        let n = ((max - min) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| min + step * i as f64).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        Self::axis(self.alpha_min, self.alpha_max, self.step)
    }

    pub fn betas(&self) -> Vec<f64> {
        Self::axis(self.beta_min, self.beta_max, self.step)
    }

    /// Grid states, alpha-major.
    pub fn states(&self) -> Vec<TrustState> {
        let betas = self.betas();
        self.alphas()
            .into_iter()
            .flat_map(|alpha| betas.iter().map(move |&beta| TrustState { alpha, beta }))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("grid.alpha_min", self.alpha_min), ("grid.beta_min", self.beta_min)] {
            if !(v.is_finite() && v >= 1.0) {
                bail!("{field}: trust states need alpha >= 1 and beta >= 1, got {v}");
            }
        }
        if !(self.alpha_max.is_finite() && self.alpha_max >= self.alpha_min) {
            bail!("grid.alpha_max: must be >= alpha_min, got {}", self.alpha_max);
        }
        if !(self.beta_max.is_finite() && self.beta_max >= self.beta_min) {
            bail!("grid.beta_max: must be >= beta_min, got {}", self.beta_max);
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            bail!("grid.step: must be > 0, got {}", self.step);
        }
        let points = self.alphas().len() * self.betas().len();
        if points > 1_000_000 {
            bail!("grid.step: grid has {points} points, limit is 1000000");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub sar: SarConfig,
    pub epsilons: Vec<f64>,
    pub grid: GridConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Monte-Carlo rollouts per estimate.
    pub samples: usize,
    /// Initial states at which `verify` runs the loss-bound certificate.
    pub verify_states: Vec<TrustState>,
    /// Trajectories written in full by `simulate`.
    pub log_rollouts: usize,
    /// Multiplies every designed potential. Anything above 1 breaks the loss budget.
    pub potential_scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sar: SarConfig::default(),
            epsilons: vec![0.0, 30.0, 100.0, 300.0],
            grid: GridConfig::default(),
            out_dir: PathBuf::from("out"),
            seed: 20_240_601,
            samples: 200_000,
            verify_states: [(1.0, 1.0), (2.0, 8.0), (8.0, 2.0), (5.0, 5.0), (11.0, 1.0), (1.0, 11.0)]
                .into_iter()
                .map(|(alpha, beta)| TrustState { alpha, beta })
                .collect(),
            log_rollouts: 20,
            potential_scale: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.sar.validate().context("sar")?;
        if self.epsilons.is_empty() {
            bail!("epsilons: need at least one value");
        }
        for &eps in &self.epsilons {
            if !(eps.is_finite() && eps >= 0.0) {
                bail!("epsilons: every entry must be >= 0, got {eps}");
            }
        }
        self.grid.validate()?;
        if self.samples < 1 {
            bail!("samples: must be >= 1");
        }
        for s in &self.verify_states {
            s.validate().context("verify_states")?;
        }
        if !(self.potential_scale.is_finite() && self.potential_scale >= 0.0) {
            bail!("potential_scale: must be >= 0, got {}", self.potential_scale);
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding, ignoring `out_dir`.
    pub fn hash(&self) -> String {
        let canonical = Self {
            out_dir: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_string(&canonical).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Parses and validates a config file. Empty files give the defaults.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = parse_config_str(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(config)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let config = if text.trim().is_empty() {
        ExperimentConfig::default()
    } else {
        // serde_json reports the line and column, and names unknown keys.
        serde_json::from_str(text).context("invalid config")?
    };
    config.validate()?;
    Ok(config)
}

pub fn parse_epsilons(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad epsilon {s:?}")))
        .collect()
}

struct FieldDoc {
    key: &'static str,
    description: &'static str,
}

const FIELDS: &[FieldDoc] = &[
    FieldDoc {
        key: "sar.kappa_h",
        description: "Beta concentration of the human danger estimate d_h",
    },
    FieldDoc {
        key: "sar.kappa_r",
        description: "Beta concentration of the robot danger estimate d_r; must exceed kappa_h",
    },
    FieldDoc {
        key: "sar.w_health",
        description: "weight on the health cost",
    },
    FieldDoc {
        key: "sar.w_time",
        description: "weight on the time cost",
    },
    FieldDoc {
        key: "sar.costs",
        description: "(health, time) cost for each (threat, gear) cell",
    },
    FieldDoc {
        key: "sar.gamma",
        description: "discount factor in (0, 1]",
    },
    FieldDoc {
        key: "sar.horizon",
        description: "number of sites N",
    },
    FieldDoc {
        key: "sar.trust_gains",
        description: "experience gains w_s and w_f, both > 0",
    },
    FieldDoc {
        key: "sar.initial_trust",
        description: "initial (alpha, beta) for simulate and verify's Monte-Carlo checks",
    },
    FieldDoc {
        key: "sar.threat_mode",
        description: "\"plugin\" uses P(threat) = d_r, \"bayes\" the posterior mean of d given d_r",
    },
    FieldDoc {
        key: "sar.danger_nodes",
        description: "Gauss-Legendre nodes over the danger level d",
    },
    FieldDoc {
        key: "sar.estimate_nodes",
        description: "Gauss-Legendre nodes over the robot estimate d_r",
    },
    FieldDoc {
        key: "sar.first_observation",
        description: "observed d_r at site 1, or null to average stage 1 over its law",
    },
    FieldDoc {
        key: "epsilons",
        description: "loss budgets, each >= 0",
    },
    FieldDoc {
        key: "grid",
        description: "initial-trust grid for sweep; bounds >= 1, step > 0",
    },
    FieldDoc {
        key: "out_dir",
        description: "directory for output files",
    },
    FieldDoc {
        key: "seed",
        description: "Monte-Carlo seed; rollout i uses stream i",
    },
    FieldDoc {
        key: "samples",
        description: "Monte-Carlo rollouts per estimate",
    },
    FieldDoc {
        key: "verify_states",
        description: "initial states at which verify checks the loss bound",
    },
    FieldDoc {
        key: "log_rollouts",
        description: "full trajectories written by simulate",
    },
    FieldDoc {
        key: "potential_scale",
        description: "factor applied to every designed potential; values above 1 violate the budget",
    },
];

/// Defaults plus a description of every key.
pub fn config_schema() -> serde_json::Value {
    let defaults = serde_json::to_value(ExperimentConfig::default()).expect("config serialises");
    let fields: Vec<serde_json::Value> = FIELDS
        .iter()
        .map(|f| {
            let default = f.key.split('.').fold(&defaults, |v, part| &v[part]).clone();
            serde_json::json!({ "key": f.key, "default": default, "description": f.description })
        })
        .collect();
    serde_json::json!({ "defaults": defaults, "fields": fields })
}
