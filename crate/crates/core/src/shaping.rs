//! Potential-based shaping and loss-bound certificates.
//!
//! A potential `phi` on trust states induces the shaping reward
//! `gamma * phi(s') - phi(s)`. Shaping a game adds it to every stage reward
//! and never touches transitions. Over a finite horizon the shaped and
//! original values of any fixed rule differ by
//! `gamma^N * E[phi(s_{N+1})] - phi(s_1)`, which bounds the task-value loss
//! of the shaped optimum by the spread of `phi` over the final states.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{evaluate_policy, expected_final, solve_optimal, GameSpec, PolicyRule, Shaping};
use crate::trust::TrustState;

/// Tolerance on one-sided bound checks.
pub const BOUND_TOL: f64 = 1e-9;
/// Tolerance on the telescoping equality.
pub const TELESCOPING_TOL: f64 = 1e-8;
/// A strict "< 0" shaping reward must be at most this.
pub const STRICT_NEGATIVE_TOL: f64 = 1e-12;

/// `phi(alpha, beta) = a * alpha + b * beta`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearPotential {
    pub a: f64,
    pub b: f64,
}

impl LinearPotential {
    pub const ZERO: LinearPotential = LinearPotential { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn eval(&self, s: TrustState) -> f64 {
        self.a * s.alpha + self.b * s.beta
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a: self.a * factor,
            b: self.b * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// Outcome of a `lhs <= rhs` style check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    /// `satisfied` iff `lhs <= rhs + 1e-9`.
    pub fn upper(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            satisfied: lhs <= rhs + BOUND_TOL,
            slack: rhs - lhs,
        }
    }

    /// `satisfied` iff `|lhs - rhs| <= tol`.
    pub fn equality(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            satisfied: (lhs - rhs).abs() <= tol,
            slack: rhs - lhs,
        }
    }

    pub fn residual(&self) -> f64 {
        self.slack.abs()
    }
}

pub fn shaping_reward(potential: &LinearPotential, gamma: f64, s: TrustState, s_next: TrustState) -> f64 {
    gamma * potential.eval(s_next) - potential.eval(s)
}

/// The game with `gamma * phi(s') - phi(s)` added to every stage reward.
///
/// Shaping an already shaped game with the same discount adds the potentials.
pub fn shape_game(spec: &GameSpec, potential: LinearPotential, gamma: f64) -> GameSpec {
    let shaping = match spec.shaping() {
        Some(prev) if prev.gamma == gamma => Shaping {
            potential: LinearPotential::new(prev.potential.a + potential.a, prev.potential.b + potential.b),
            gamma,
        },
        _ => Shaping { potential, gamma },
    };
    spec.unshaped().with_shaping(Some(shaping))
}

/// Compares `V'_1 - V_1` under `policy` with `gamma^N E[phi(s_{N+1})] - phi(s_1)`.
///
/// The shaped game is built from `spec` with `potential` at the game's own
/// discount; any shaping already on `spec` is dropped first.
pub fn telescoping_check(spec: &GameSpec, potential: LinearPotential, policy: &PolicyRule) -> Result<BoundReport> {
    let original = spec.unshaped();
    let shaped = shape_game(&original, potential, original.gamma());
    let lhs = evaluate_policy(&shaped, policy)?.initial_value() - evaluate_policy(&original, policy)?.initial_value();
    let terminal = expected_final(&original, policy, |s| potential.eval(s))?;
    let rhs = original.gamma().powi(original.horizon() as i32) * terminal - potential.eval(original.initial());
    Ok(BoundReport::equality(lhs, rhs, TELESCOPING_TOL))
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    /// `E_{pi'*}[phi(s_{N+1})] - E_{pi*}[phi(s_{N+1})] <= gamma^{-N} eps`.
    pub hypothesis: BoundReport,
    /// `V_1^{pi*}(s_1) - V_1^{pi'*}(s_1) <= eps`, both evaluated in the original game.
    pub conclusion: BoundReport,
    pub v_opt: f64,
    pub v_original: f64,
    pub v_shaped: f64,
    #[serde(skip)]
    pub optimal: PolicyRule,
    #[serde(skip)]
    pub shaped_optimal: PolicyRule,
}

/// Solves the original and shaped games and checks both sides of the bound.
pub fn theorem1_bound_check(spec: &GameSpec, potential: LinearPotential, epsilon: f64) -> Result<Theorem1Report> {
    let original = spec.unshaped();
    let gamma = original.gamma();
    let shaped = shape_game(&original, potential, gamma);
    let (opt_values, optimal) = solve_optimal(&original)?;
    let (shaped_values, shaped_optimal) = solve_optimal(&shaped)?;
    let v_original = evaluate_policy(&original, &shaped_optimal)?.initial_value();
    let phi = |s: TrustState| potential.eval(s);
    let spread = expected_final(&original, &shaped_optimal, phi)? - expected_final(&original, &optimal, phi)?;
    let v_opt = opt_values.initial_value();
    Ok(Theorem1Report {
        hypothesis: BoundReport::upper(spread, gamma.powi(-(original.horizon() as i32)) * epsilon),
        conclusion: BoundReport::upper(v_opt - v_original, epsilon),
        v_opt,
        v_original,
        v_shaped: shaped_values.initial_value(),
        optimal,
        shaped_optimal,
    })
}

/// `max phi(shaped reachable) - min phi(original reachable) <= gamma^{-N} eps`.
pub fn corollary1_bound_check(
    potential: &LinearPotential,
    reachable_shaped: &[TrustState],
    reachable_orig: &[TrustState],
    gamma: f64,
    horizon: usize,
    epsilon: f64,
) -> BoundReport {
    let max = reachable_shaped
        .iter()
        .map(|&s| potential.eval(s))
        .fold(f64::NEG_INFINITY, f64::max);
    let min = reachable_orig
        .iter()
        .map(|&s| potential.eval(s))
        .fold(f64::INFINITY, f64::min);
    BoundReport::upper(max - min, gamma.powi(-(horizon as i32)) * epsilon)
}

/// Final states reached with positive probability under `policy`.
pub fn reachable_final_states(spec: &GameSpec, policy: &PolicyRule) -> Result<Vec<TrustState>> {
    let dist = crate::game::final_state_distribution(spec, policy)?;
    Ok(dist
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, _)| spec.state_at(spec.horizon() + 1, k))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub from: TrustState,
    pub to: TrustState,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub satisfied: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

fn sign_check(
    potential: &LinearPotential,
    gamma: f64,
    transitions: &[(TrustState, TrustState)],
    rewarded: impl Fn(TrustState, TrustState) -> bool,
) -> ConstraintReport {
    let violations: Vec<Violation> = transitions
        .iter()
        .filter_map(|&(from, to)| {
            let reward = shaping_reward(potential, gamma, from, to);
            let ok = if rewarded(from, to) {
                reward >= 0.0
            } else {
                reward <= -STRICT_NEGATIVE_TOL
            };
            (!ok).then_some(Violation { from, to, reward })
        })
        .collect();
    ConstraintReport {
        satisfied: violations.is_empty(),
        checked: transitions.len(),
        violations,
    }
}

/// Shaping reward must be nonnegative when expected trust does not drop and
/// strictly negative otherwise.
pub fn trust_seeking_check(
    potential: &LinearPotential,
    gamma: f64,
    transitions: &[(TrustState, TrustState)],
) -> ConstraintReport {
    sign_check(potential, gamma, transitions, |s, t| t.expected() >= s.expected())
}

/// Shaping reward must be nonnegative when expected trust does not move away
/// from `t_star` and strictly negative otherwise.
pub fn calibration_check(
    potential: &LinearPotential,
    gamma: f64,
    t_star: f64,
    transitions: &[(TrustState, TrustState)],
) -> ConstraintReport {
    sign_check(potential, gamma, transitions, |s, t| {
        (t.expected() - t_star).abs() <= (s.expected() - t_star).abs()
    })
}

/// All one-step lattice transitions of `spec` (both outcomes at every node).
pub fn lattice_transitions(spec: &GameSpec) -> Vec<(TrustState, TrustState)> {
    let params = spec.params();
    (1..=spec.horizon())
        .flat_map(|n| (0..n).map(move |k| (n, k)))
        .flat_map(|(n, k)| {
            let s = spec.state_at(n, k);
            [(s, s.after_success(&params)), (s, s.after_failure(&params))]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{solve_optimal, Action, TableModel};
    use crate::trust::{reachable_lattice, TrustParams};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(alpha: f64, beta: f64) -> TrustState {
        TrustState { alpha, beta }
    }

    /// Closed-form LP coefficient for gamma = 0.9, N = 10, eps = 30, computed directly.
    fn sar_coefficient() -> f64 {
        0.9f64.powi(-10) * 30.0 / 10.0
    }

    fn random_spec(seed: u64, horizon: usize, nodes: usize) -> GameSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TableModel::random_spec(
            &mut rng,
            horizon,
            nodes,
            0.9,
            TrustState::default(),
            TrustParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn shaping_reward_examples() {
        let phi = LinearPotential::new(sar_coefficient(), 0.0);
        let up = shaping_reward(&phi, 0.9, s(1.0, 1.0), s(2.0, 1.0));
        let down = shaping_reward(&phi, 0.9, s(1.0, 1.0), s(1.0, 2.0));
        assert!((up - 6.88313).abs() < 1e-5, "{up}");
        assert!((down - -0.86039).abs() < 1e-5, "{down}");
        assert_eq!(
            shaping_reward(&LinearPotential::ZERO, 0.9, s(3.0, 2.0), s(3.0, 3.0)),
            0.0
        );
    }

    #[test]
    fn zero_potential_leaves_rewards_bit_identical() {
        let spec = random_spec(1, 4, 3);
        let shaped = shape_game(&spec, LinearPotential::ZERO, 0.9);
        for n in 1..=4 {
            for k in 0..n {
                for j in 0..3 {
                    for a in Action::ALL {
                        let ctx = spec.context(n, k, j);
                        assert_eq!(spec.outcome(&ctx, a).unwrap(), shaped.outcome(&ctx, a).unwrap());
                    }
                }
            }
        }
        assert_eq!(solve_optimal(&spec).unwrap(), solve_optimal(&shaped).unwrap());
    }

    #[test]
    fn shaping_never_touches_transitions() {
        let spec = random_spec(2, 5, 2);
        let shaped = shape_game(&spec, LinearPotential::new(3.0, -2.0), 0.9);
        assert_eq!(shaped.horizon(), spec.horizon());
        for n in 1..=5 {
            for k in 0..n {
                for j in 0..2 {
                    for a in Action::ALL {
                        let ctx = spec.context(n, k, j);
                        assert_eq!(
                            spec.outcome(&ctx, a).unwrap().success,
                            shaped.outcome(&ctx, a).unwrap().success
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn single_step_value_shift() {
        let spec = random_spec(3, 1, 3);
        let phi = LinearPotential::new(1.7, -0.4);
        let shaped = shape_game(&spec, phi, 0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..8 {
            let policy = PolicyRule::random(&spec, &mut rng);
            let diff = evaluate_policy(&shaped, &policy).unwrap().initial_value()
                - evaluate_policy(&spec, &policy).unwrap().initial_value();
            // Independent single-step expectation: E[phi(s_2)] from the
            // success probabilities at each node.
            let law = spec.observations_at(1);
            let p: f64 = (0..law.len())
                .map(|j| {
                    law.weights()[j]
                        * spec
                            .outcome(&spec.context(1, 0, j), policy.action(1, 0, j).unwrap())
                            .unwrap()
                            .success
                })
                .sum();
            let up = phi.eval(s(2.0, 1.0));
            let down = phi.eval(s(1.0, 2.0));
            let expect = 0.9 * (p * up + (1.0 - p) * down) - phi.eval(s(1.0, 1.0));
            assert!((diff - expect).abs() < 1e-12);
            let report = telescoping_check(&spec, phi, &policy).unwrap();
            assert!(report.residual() < 1e-12);
        }
    }

    #[test]
    fn telescoping_zero_potential() {
        let spec = random_spec(4, 3, 2);
        let policy = PolicyRule::constant(&spec, Action::One);
        let report = telescoping_check(&spec, LinearPotential::ZERO, &policy).unwrap();
        assert_eq!((report.lhs, report.rhs), (0.0, 0.0));
        assert!(report.satisfied);
    }

    #[test]
    fn theorem1_zero_budget_is_tight() {
        let spec = random_spec(5, 4, 2);
        let report = theorem1_bound_check(&spec, LinearPotential::ZERO, 0.0).unwrap();
        assert!(report.hypothesis.satisfied && report.conclusion.satisfied);
        assert_eq!(report.conclusion.slack, 0.0);
    }

    #[test]
    fn theorem1_flags_oversized_potential() {
        // Ten times the tight coefficient: the hypothesis can fail and the
        // report must say so rather than assume the conclusion.
        let (n, eps) = (6usize, 5.0);
        let spec = random_spec(6, n, 2);
        let a = 10.0 * 0.9f64.powi(-(n as i32)) * eps / n as f64;
        let report = theorem1_bound_check(&spec, LinearPotential::new(a, 0.0), eps).unwrap();
        assert_eq!(
            report.hypothesis.satisfied,
            report.hypothesis.lhs <= report.hypothesis.rhs + BOUND_TOL
        );
        assert!(report.conclusion.lhs >= -1e-9, "loss can never be negative");
    }

    #[test]
    fn corollary1_examples() {
        let params = TrustParams::default();
        let (gamma, n, eps) = (0.9, 10usize, 30.0);
        let lattice = reachable_lattice(TrustState::default(), params, n + 1).unwrap();
        let zero = corollary1_bound_check(
            &LinearPotential::ZERO,
            lattice.points(),
            lattice.points(),
            gamma,
            n,
            eps,
        );
        assert_eq!(zero.lhs, 0.0);
        assert!(zero.satisfied);

        // Tight coefficient from the endpoint evaluation N * a * w_s.
        let tight = gamma.powi(-(n as i32)) * eps / (n as f64 * params.w_s);
        let report = corollary1_bound_check(
            &LinearPotential::new(tight, 0.0),
            lattice.points(),
            lattice.points(),
            gamma,
            n,
            eps,
        );
        assert!((report.lhs / report.rhs - 1.0).abs() < 1e-12);
        assert!(report.satisfied);

        let report = corollary1_bound_check(
            &LinearPotential::new(2.0 * tight, 0.0),
            lattice.points(),
            lattice.points(),
            gamma,
            n,
            eps,
        );
        assert!((report.lhs / report.rhs - 2.0).abs() < 1e-12);
        assert!(!report.satisfied);
    }

    #[test]
    fn trust_seeking_examples() {
        let phi = LinearPotential::new(sar_coefficient(), 0.0);
        let pairs = [(s(1.0, 1.0), s(2.0, 1.0)), (s(1.0, 1.0), s(1.0, 2.0))];
        let report = trust_seeking_check(&phi, 0.9, &pairs);
        assert!(report.satisfied, "{report:?}");

        let report = trust_seeking_check(&LinearPotential::ZERO, 0.9, &pairs);
        assert!(!report.satisfied);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to, s(1.0, 2.0));

        let phi = LinearPotential::new(0.0, -1.0);
        let report = trust_seeking_check(&phi, 1.0, &[(s(1.0, 1.0), s(1.0, 2.0))]);
        assert!(report.satisfied);
    }

    #[test]
    fn lp_potential_loses_trust_seeking_at_high_alpha() {
        // gamma * a * (alpha + 1) - a * alpha < 0 once alpha > gamma / (1 - gamma) = 9.
        let phi = LinearPotential::new(sar_coefficient(), 0.0);
        let report = trust_seeking_check(&phi, 0.9, &[(s(9.5, 1.0), s(10.5, 1.0))]);
        assert!(!report.satisfied);
    }

    #[test]
    fn calibration_examples() {
        let phi = LinearPotential::new(0.5, -0.5);
        let pairs = [
            (s(1.0, 1.0), s(2.0, 1.0)),
            (s(2.0, 3.0), s(2.0, 4.0)),
            (s(4.0, 1.0), s(5.0, 1.0)),
        ];
        assert_eq!(
            calibration_check(&phi, 0.9, 1.0, &pairs),
            trust_seeking_check(&phi, 0.9, &pairs)
        );

        let away = [(s(1.0, 1.0), s(1.0, 2.0))];
        let report = calibration_check(&LinearPotential::ZERO, 0.9, 0.5, &away);
        assert!(!report.satisfied);

        // Equal distances to t* = 0.5: (1,1) -> (1,1) has distance 0 both ways.
        let same = [(s(1.0, 1.0), s(1.0, 1.0))];
        let positive = LinearPotential::new(-1.0, 0.0);
        assert!(calibration_check(&positive, 0.9, 0.5, &same).satisfied);
        let negative = LinearPotential::new(1.0, 0.0);
        assert!(!calibration_check(&negative, 0.9, 0.5, &same).satisfied);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn telescoping_identity(seed in any::<u64>(), horizon in 1usize..=10, a in -20.0..20.0f64, b in -20.0..20.0f64) {
            let spec = random_spec(seed, horizon, 2);
            let policy = PolicyRule::random(&spec, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(1)));
            let report = telescoping_check(&spec, LinearPotential::new(a, b), &policy).unwrap();
            prop_assert!(report.satisfied, "{:?}", report);
        }

        #[test]
        fn corollary_implies_theorem(seed in any::<u64>(), horizon in 1usize..=6, eps in 0.0..50.0f64, scale in 0.0..1.0f64) {
            let spec = random_spec(seed, horizon, 2);
            let gamma = spec.gamma();
            let a = scale * gamma.powi(-(horizon as i32)) * eps / horizon as f64;
            let phi = LinearPotential::new(a, 0.0);
            let lattice = reachable_lattice(spec.initial(), spec.params(), horizon + 1).unwrap();
            let cor = corollary1_bound_check(&phi, lattice.points(), lattice.points(), gamma, horizon, eps);
            prop_assert!(cor.satisfied);
            let thm = theorem1_bound_check(&spec, phi, eps).unwrap();
            prop_assert!(thm.hypothesis.satisfied);
            prop_assert!(thm.conclusion.satisfied, "{:?}", thm.conclusion);
        }
    }
}
