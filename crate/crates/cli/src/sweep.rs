//! Budget sweeps over a grid of initial trust states.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use trust_shaping::game::{evaluate_policy, greedy_action, solve_optimal, Action};
use trust_shaping::sar::build_sar_game;
use trust_shaping::shaping::shape_game;
use trust_shaping::{GameSpec, LinearPotential, PolicyRule, ValueTable};

use crate::config::ExperimentConfig;
use crate::design_potential;
use crate::output::Metadata;

/// Stage-1 observation used for `action_1` when the config averages stage 1.
pub const REPORTED_FIRST_OBSERVATION: f64 = 0.06;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_1: f64,
    pub beta_1: f64,
    pub epsilon: f64,
    pub action_1: u8,
    /// Shaped-optimal value in the shaped game.
    pub v_shaped: f64,
    /// Shaped-optimal value in the original game.
    pub v_original: f64,
    pub v_opt: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub potential: LinearPotential,
    pub points: usize,
    pub action_zero_fraction: f64,
    pub max_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub metadata: Metadata,
    pub epsilons: Vec<EpsilonSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Sorted by epsilon (config order), then alpha_1, then beta_1.
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

fn first_action(spec: &GameSpec, values: &ValueTable, policy: &PolicyRule) -> Result<Action> {
    Ok(match spec.first_observations() {
        Some(_) => policy.action(1, 0, 0)?,
        None => greedy_action(spec, values, 1, 0, REPORTED_FIRST_OBSERVATION)?,
    })
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<Sweep> {
    config.validate()?;
    let base = build_sar_game(&config.sar)?;
    let potentials: Vec<(f64, LinearPotential)> = config
        .epsilons
        .iter()
        .map(|&eps| (eps, design_potential(config, eps)))
        .collect();
    let states = config.grid.states();

    let per_state: Vec<Vec<SweepRow>> = states
        .par_iter()
        .map(|&s| {
            let spec = base.clone().with_initial(s)?;
            let v_opt = solve_optimal(&spec)?.0.initial_value();
            potentials
                .iter()
                .map(|&(epsilon, phi)| {
                    let shaped = shape_game(&spec, phi, spec.gamma());
                    let (values, policy) = solve_optimal(&shaped)?;
                    let v_original = evaluate_policy(&spec, &policy)?.initial_value();
                    let action = first_action(&shaped, &values, &policy)?;
                    Ok(SweepRow {
                        alpha_1: s.alpha,
                        beta_1: s.beta,
                        epsilon,
                        action_1: action.index() as u8,
                        v_shaped: values.initial_value(),
                        v_original,
                        v_opt,
                        loss: v_opt - v_original,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let rows: Vec<SweepRow> = (0..potentials.len())
        .flat_map(|e| per_state.iter().map(move |r| r[e]))
        .collect();
    let n = states.len();
    let epsilons = potentials
        .iter()
        .enumerate()
        .map(|(e, &(epsilon, potential))| {
            let block = &rows[e * n..(e + 1) * n];
            let zeros = block.iter().filter(|r| r.action_1 == 0).count();
            EpsilonSummary {
                epsilon,
                potential,
                points: n,
                action_zero_fraction: zeros as f64 / n as f64,
                max_loss: block.iter().map(|r| r.loss).fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    Ok(Sweep {
        rows,
        summary: SweepSummary {
            metadata: Metadata::new(config, "sweep"),
            epsilons,
        },
    })
}

/// CSV with a leading `# {metadata}` comment line, a header and LF endings.
pub fn sweep_csv(sweep: &Sweep) -> Result<Vec<u8>> {
    let mut bytes = b"# ".to_vec();
    bytes.extend(serde_json::to_vec(&sweep.summary.metadata)?);
    bytes.push(b'\n');
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(bytes);
    for row in &sweep.rows {
        writer.serialize(row)?;
    }
    Ok(writer.into_inner().map_err(|e| e.into_error())?)
}
