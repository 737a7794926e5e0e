//! Seeded rollouts of a fixed policy on the search-and-rescue game.

use anyhow::{Context, Result};
use serde::Serialize;
use trust_shaping::game::{
    evaluate_policy, expected_final, mc_estimate, rollout_rng, simulate_rollout, solve_optimal, Action, McEstimate,
    Trajectory,
};
use trust_shaping::sar::build_sar_game;
use trust_shaping::shaping::shape_game;
use trust_shaping::{GameSpec, LinearPotential, PolicyRule};

use crate::config::ExperimentConfig;
use crate::design_potential;
use crate::output::Metadata;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyChoice {
    Optimal,
    ShapedOptimal,
    #[value(name = "always-0")]
    #[serde(rename = "always-0")]
    Always0,
    #[value(name = "always-1")]
    #[serde(rename = "always-1")]
    Always1,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub policy: PolicyChoice,
    pub epsilon: f64,
    pub potential: LinearPotential,
    /// Discounted task reward, shaping excluded.
    pub task_reward: McEstimate,
    pub final_expected_trust: McEstimate,
    pub dp_task_reward: f64,
    pub dp_final_expected_trust: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub metadata: Metadata,
    pub summary: SimulateSummary,
    /// The first `log_rollouts` rollouts, identical to those in the estimates.
    pub logged: Vec<Trajectory>,
}

/// The game the policy acts in and the policy itself. Shaped-optimal runs in
/// the game shaped for the largest budget so shaping rewards show in the log.
fn policy_for(config: &ExperimentConfig, choice: PolicyChoice) -> Result<(f64, LinearPotential, GameSpec, PolicyRule)> {
    let original = build_sar_game(&config.sar)?;
    let epsilon = config.epsilons.iter().copied().fold(0.0, f64::max);
    let potential = design_potential(config, epsilon);
    Ok(match choice {
        PolicyChoice::Optimal => {
            let policy = solve_optimal(&original)?.1;
            (epsilon, LinearPotential::ZERO, original, policy)
        }
        PolicyChoice::ShapedOptimal => {
            let shaped = shape_game(&original, potential, original.gamma());
            let policy = solve_optimal(&shaped)?.1;
            (epsilon, potential, shaped, policy)
        }
        PolicyChoice::Always0 | PolicyChoice::Always1 => {
            let action = if choice == PolicyChoice::Always0 {
                Action::Zero
            } else {
                Action::One
            };
            let policy = PolicyRule::constant(&original, action);
            (epsilon, LinearPotential::ZERO, original, policy)
        }
    })
}

pub fn run_simulate(config: &ExperimentConfig, choice: PolicyChoice) -> Result<Simulation> {
    config.validate()?;
    let (epsilon, potential, spec, policy) = policy_for(config, choice)?;
    let gamma = spec.gamma();
    let (samples, seed) = (config.samples, config.seed);
    let task_reward = mc_estimate(&spec, &policy, samples, seed, |t| t.discounted_task_reward(gamma))?;
    let final_expected_trust = mc_estimate(&spec, &policy, samples, seed, |t| t.final_state().expected())?;
    let original = spec.unshaped();
    let dp_task_reward = evaluate_policy(&original, &policy)?.initial_value();
    let dp_final_expected_trust = expected_final(&original, &policy, |s| s.expected())?;
    let logged = (0..config.log_rollouts.min(samples) as u64)
        .map(|i| simulate_rollout(&spec, &policy, &mut rollout_rng(seed, i)).context("rollout"))
        .collect::<Result<Vec<_>>>()?;
    Ok(Simulation {
        metadata: Metadata::new(config, "simulate"),
        summary: SimulateSummary {
            policy: choice,
            epsilon,
            potential,
            task_reward,
            final_expected_trust,
            dp_task_reward,
            dp_final_expected_trust,
        },
        logged,
    })
}

/// One JSON object per line: metadata, each logged rollout, then the summary.
pub fn rollouts_jsonl(sim: &Simulation) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut line = |value: serde_json::Value| -> Result<()> {
        serde_json::to_writer(&mut out, &value)?;
        out.push(b'\n');
        Ok(())
    };
    line(serde_json::json!({ "metadata": sim.metadata }))?;
    for (i, t) in sim.logged.iter().enumerate() {
        line(serde_json::json!({ "rollout": i, "trajectory": t }))?;
    }
    line(serde_json::json!({ "summary": sim.summary }))?;
    Ok(out)
}
