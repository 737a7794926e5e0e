//! Certificate bundle for every budget in the config.

use anyhow::Result;
use serde::Serialize;
use trust_shaping::game::{evaluate_policy, mc_estimate, solve_optimal, Action, McEstimate};
use trust_shaping::lp_design::verify_loss_constraint;
use trust_shaping::sar::build_sar_game;
use trust_shaping::shaping::{
    corollary1_bound_check, lattice_transitions, reachable_final_states, shape_game, telescoping_check,
    theorem1_bound_check, trust_seeking_check,
};
use trust_shaping::{BoundReport, GameSpec, LinearPotential, PolicyRule, TrustState};

use crate::config::ExperimentConfig;
use crate::design_potential;
use crate::output::Metadata;

/// Monte-Carlo checks pass within this many standard errors. The report runs
/// several checks per budget, so this is wider than a single-test 3 sigma.
pub const MC_SIGMA: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct StateCheck {
    pub initial: TrustState,
    pub hypothesis: BoundReport,
    pub conclusion: BoundReport,
    pub v_opt: f64,
    pub v_original: f64,
    pub v_shaped: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TelescopingCheck {
    pub policy: &'static str,
    pub report: BoundReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct McCheck {
    pub policy: &'static str,
    pub game: &'static str,
    pub dp_value: f64,
    pub estimate: McEstimate,
    pub z_score: f64,
    pub passed: bool,
}

/// Reported but not gated: linear potentials cannot satisfy it everywhere on
/// the lattice once `alpha > gamma w_s / (1 - gamma)`.
#[derive(Debug, Clone, Serialize)]
pub struct TrustSeekingSummary {
    pub satisfied: bool,
    pub checked: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub potential: LinearPotential,
    pub loss_constraint: BoundReport,
    pub corollary1: BoundReport,
    pub loss_bound: Vec<StateCheck>,
    pub telescoping: Vec<TelescopingCheck>,
    pub monte_carlo: Vec<McCheck>,
    pub trust_seeking: TrustSeekingSummary,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub metadata: Metadata,
    pub passed: bool,
    pub epsilons: Vec<EpsilonReport>,
}

fn mc_check(
    spec: &GameSpec,
    policy: &PolicyRule,
    name: &'static str,
    game: &'static str,
    config: &ExperimentConfig,
) -> Result<McCheck> {
    let dp_value = evaluate_policy(spec, policy)?.initial_value();
    let gamma = spec.gamma();
    let estimate = mc_estimate(spec, policy, config.samples, config.seed, |t| {
        t.discounted_total_reward(gamma)
    })?;
    let gap = (estimate.mean - dp_value).abs();
    let z_score = if estimate.std_error > 0.0 {
        gap / estimate.std_error
    } else if gap <= 1e-9 * (1.0 + dp_value.abs()) {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McCheck {
        policy: name,
        game,
        dp_value,
        estimate,
        z_score,
        passed: z_score <= MC_SIGMA,
    })
}

fn epsilon_report(config: &ExperimentConfig, original: &GameSpec, epsilon: f64) -> Result<EpsilonReport> {
    let sar = &config.sar;
    let (gamma, horizon) = (sar.gamma, sar.horizon);
    let potential = design_potential(config, epsilon);
    let shaped = shape_game(original, potential, gamma);

    let loss_constraint = verify_loss_constraint(&potential, &original.final_line(), gamma, horizon, epsilon);

    let (_, optimal) = solve_optimal(original)?;
    let (_, shaped_optimal) = solve_optimal(&shaped)?;
    let corollary1 = corollary1_bound_check(
        &potential,
        &reachable_final_states(original, &shaped_optimal)?,
        &reachable_final_states(original, &optimal)?,
        gamma,
        horizon,
        epsilon,
    );

    let loss_bound = config
        .verify_states
        .iter()
        .map(|&s| {
            let r = theorem1_bound_check(&original.clone().with_initial(s)?, potential, epsilon)?;
            Ok(StateCheck {
                initial: s,
                passed: r.hypothesis.satisfied && r.conclusion.satisfied,
                hypothesis: r.hypothesis,
                conclusion: r.conclusion,
                v_opt: r.v_opt,
                v_original: r.v_original,
                v_shaped: r.v_shaped,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let always_0 = PolicyRule::constant(original, Action::Zero);
    let always_1 = PolicyRule::constant(original, Action::One);
    let policies = [
        ("optimal", &optimal),
        ("shaped-optimal", &shaped_optimal),
        ("always-0", &always_0),
        ("always-1", &always_1),
    ];
    let telescoping = policies
        .iter()
        .map(|&(name, policy)| {
            Ok(TelescopingCheck {
                policy: name,
                report: telescoping_check(original, potential, policy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let monte_carlo = vec![
        mc_check(original, &optimal, "optimal", "original", config)?,
        mc_check(original, &shaped_optimal, "shaped-optimal", "original", config)?,
        mc_check(&shaped, &shaped_optimal, "shaped-optimal", "shaped", config)?,
    ];

    let seeking = trust_seeking_check(&potential, gamma, &lattice_transitions(original));
    let trust_seeking = TrustSeekingSummary {
        satisfied: seeking.satisfied,
        checked: seeking.checked,
        violations: seeking.violations.len(),
    };

    let passed = loss_constraint.satisfied
        && corollary1.satisfied
        && loss_bound.iter().all(|c| c.passed)
        && telescoping.iter().all(|c| c.report.satisfied)
        && monte_carlo.iter().all(|c| c.passed);
    Ok(EpsilonReport {
        epsilon,
        potential,
        loss_constraint,
        corollary1,
        loss_bound,
        telescoping,
        monte_carlo,
        trust_seeking,
        passed,
    })
}

pub fn run_verify(config: &ExperimentConfig) -> Result<VerifyReport> {
    config.validate()?;
    let original = build_sar_game(&config.sar)?;
    let epsilons = config
        .epsilons
        .iter()
        .map(|&eps| epsilon_report(config, &original, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        metadata: Metadata::new(config, "verify"),
        passed: epsilons.iter().all(|e| e.passed),
        epsilons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ExperimentConfig {
        ExperimentConfig {
            samples: 20_000,
            epsilons: vec![0.0, 30.0],
            verify_states: vec![TrustState::default(), TrustState { alpha: 4.0, beta: 2.0 }],
            ..Default::default()
        }
    }

    #[test]
    fn default_potentials_pass() {
        let report = run_verify(&quick()).unwrap();
        assert!(report.passed, "{}", serde_json::to_string_pretty(&report).unwrap());
    }

    #[test]
    fn zero_budget_telescopes_exactly() {
        let report = run_verify(&quick()).unwrap();
        for t in &report.epsilons[0].telescoping {
            assert_eq!(t.report.residual(), 0.0, "{}", t.policy);
        }
    }

    #[test]
    fn doubled_potential_fails_the_loss_constraint() {
        let config = ExperimentConfig {
            potential_scale: 2.0,
            ..quick()
        };
        let report = run_verify(&config).unwrap();
        assert!(!report.passed);
        assert!(report.epsilons[0].passed);
        assert!(!report.epsilons[1].loss_constraint.satisfied);
        assert!((report.epsilons[1].loss_constraint.lhs / report.epsilons[1].loss_constraint.rhs - 2.0).abs() < 1e-9);
    }
}
