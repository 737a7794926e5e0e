//! Search-and-rescue scenario.
//!
//! At each site the danger level is `d ~ U[0, 1]`, a threat is present with
//! probability `d`, and the human and robot hold estimates
//! `d_h ~ Beta(kappa_h d, kappa_h (1 - d))` and
//! `d_r ~ Beta(kappa_r d, kappa_r (1 - d))`. The robot recommends gear
//! (`a_r = 1`) or no gear (`a_r = 0`). The human follows the recommendation
//! with probability equal to the expected trust and does the opposite
//! otherwise. The robot succeeds iff its recommendation matches the threat.

use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Beta as BetaSampler, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Continuous};

use crate::error::{Error, Result};
use crate::game::{Action, GameSpec, StageContext, StageModel, StageOutcome, StageSample};
use crate::quadrature::{gauss_legendre_unit, Quadrature};
use crate::trust::{TrustParams, TrustState};

/// Smallest Beta shape parameter used when `d` touches 0 or 1.
const MIN_SHAPE: f64 = 1e-6;

/// How the robot turns its estimate `d_r` into a threat probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreatMode {
    /// `P(threat) = d_r`.
    #[default]
    Plugin,
    /// `P(threat) = E[d | d_r]` under the uniform prior.
    Bayes,
}

/// Health and time costs `(delta_h, delta_t)` per (threat, gear) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostTable {
    pub threat_gear: (f64, f64),
    pub threat_no_gear: (f64, f64),
    pub safe_gear: (f64, f64),
    pub safe_no_gear: (f64, f64),
}

impl CostTable {
    pub fn cost(&self, threat: bool, gear: Action) -> (f64, f64) {
        match (threat, gear) {
            (true, Action::One) => self.threat_gear,
            (true, Action::Zero) => self.threat_no_gear,
            (false, Action::One) => self.safe_gear,
            (false, Action::Zero) => self.safe_no_gear,
        }
    }

    fn entries(&self) -> [(&'static str, (f64, f64)); 4] {
        [
            ("threat_gear", self.threat_gear),
            ("threat_no_gear", self.threat_no_gear),
            ("safe_gear", self.safe_gear),
            ("safe_no_gear", self.safe_no_gear),
        ]
    }
}

impl Default for CostTable {
    fn default() -> Self {
        Self {
            threat_gear: (1.0, 300.0),
            threat_no_gear: (100.0, 50.0),
            safe_gear: (0.0, 250.0),
            safe_no_gear: (0.0, 30.0),
        }
    }
}

fn default_kappa_h() -> f64 {
    2.0
}
fn default_kappa_r() -> f64 {
    20.0
}
fn default_w_health() -> f64 {
    1.0
}
fn default_w_time() -> f64 {
    0.2
}
fn default_gamma() -> f64 {
    0.9
}
fn default_horizon() -> usize {
    10
}
fn default_nodes() -> usize {
    64
}
fn default_first_observation() -> Option<f64> {
    Some(0.06)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SarConfig {
    #[serde(default = "default_kappa_h")]
    pub kappa_h: f64,
    #[serde(default = "default_kappa_r")]
    pub kappa_r: f64,
    #[serde(default = "default_w_health")]
    pub w_health: f64,
    #[serde(default = "default_w_time")]
    pub w_time: f64,
    #[serde(default)]
    pub costs: CostTable,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub trust_gains: TrustParams,
    #[serde(default)]
    pub initial_trust: TrustState,
    #[serde(default)]
    pub threat_mode: ThreatMode,
    /// Quadrature nodes over the danger level `d`.
    #[serde(default = "default_nodes")]
    pub danger_nodes: usize,
    /// Quadrature nodes over the robot estimate `d_r`.
    #[serde(default = "default_nodes")]
    pub estimate_nodes: usize,
    /// Observed `d_r` at the first site; `null` averages stage 1 over its law.
    #[serde(default = "default_first_observation")]
    pub first_observation: Option<f64>,
}

impl Default for SarConfig {
    fn default() -> Self {
        Self {
            kappa_h: default_kappa_h(),
            kappa_r: default_kappa_r(),
            w_health: default_w_health(),
            w_time: default_w_time(),
            costs: CostTable::default(),
            gamma: default_gamma(),
            horizon: default_horizon(),
            trust_gains: TrustParams::default(),
            initial_trust: TrustState::default(),
            threat_mode: ThreatMode::default(),
            danger_nodes: default_nodes(),
            estimate_nodes: default_nodes(),
            first_observation: default_first_observation(),
        }
    }
}

impl SarConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_h.is_finite() && self.kappa_h >= 1.0) {
            return Err(Error::config("kappa_h", format!("must be >= 1, got {}", self.kappa_h)));
        }
        if !(self.kappa_r.is_finite() && self.kappa_r > self.kappa_h) {
            return Err(Error::config(
                "kappa_r",
                format!("must exceed kappa_h = {}, got {}", self.kappa_h, self.kappa_r),
            ));
        }
        for (field, w) in [("w_health", self.w_health), ("w_time", self.w_time)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(field, format!("must be >= 0, got {w}")));
            }
        }
        for (cell, (h, t)) in self.costs.entries() {
            if !(h.is_finite() && t.is_finite() && h >= 0.0 && t >= 0.0) {
                return Err(Error::config(
                    format!("costs.{cell}"),
                    format!("costs must be >= 0, got ({h}, {t})"),
                ));
            }
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::config(
                "gamma",
                format!("must lie in (0, 1], got {}", self.gamma),
            ));
        }
        if self.horizon < 1 {
            return Err(Error::config("horizon", "must be >= 1"));
        }
        self.trust_gains
            .validate()
            .map_err(|e| Error::config("trust_gains", e.to_string()))?;
        self.initial_trust
            .validate()
            .map_err(|e| Error::config("initial_trust", e.to_string()))?;
        for (field, m) in [
            ("danger_nodes", self.danger_nodes),
            ("estimate_nodes", self.estimate_nodes),
        ] {
            if m < 2 {
                return Err(Error::config(field, format!("need at least 2 nodes, got {m}")));
            }
        }
        if let Some(x) = self.first_observation {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::config(
                    "first_observation",
                    format!("must lie in (0, 1), got {x}"),
                ));
            }
        }
        Ok(())
    }
}

pub fn task_reward(threat: bool, gear: Action, table: &CostTable, w_health: f64, w_time: f64) -> f64 {
    let (dh, dt) = table.cost(threat, gear);
    -w_health * dh - w_time * dt
}

/// Probability that the human follows the recommendation.
pub fn compliance_probability(state: TrustState) -> f64 {
    state.expected()
}

fn beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    Beta::new(a.max(MIN_SHAPE), b.max(MIN_SHAPE))
        .map(|beta| beta.pdf(x))
        .unwrap_or(f64::NAN)
}

/// Density of `d_r` given danger `d`.
pub fn estimate_density(d_r: f64, d: f64, kappa: f64) -> f64 {
    beta_pdf(d_r, kappa * d, kappa * (1.0 - d))
}

/// Threat probability from the robot's estimate.
///
/// The Bayes mode integrates over `d` with `danger_nodes` Gauss-Legendre nodes
/// on `(0, 1)`.
pub fn threat_probability(d_r: f64, mode: ThreatMode, kappa_r: f64, danger_nodes: usize) -> Result<f64> {
    if !(d_r > 0.0 && d_r < 1.0) {
        return Err(Error::NumericFailure(format!("estimate {d_r} outside (0, 1)")));
    }
    match mode {
        ThreatMode::Plugin => Ok(d_r),
        ThreatMode::Bayes => {
            let (nodes, weights) = gauss_legendre_unit(danger_nodes);
            let (mut num, mut den) = (0.0, 0.0);
            for (d, w) in nodes.into_iter().zip(weights) {
                let f = w * estimate_density(d_r, d, kappa_r);
                num += d * f;
                den += f;
            }
            if !(den.is_finite() && den > 0.0) || !num.is_finite() {
                return Err(Error::NumericFailure(format!(
                    "posterior normaliser {den} at estimate {d_r}"
                )));
            }
            Ok(num / den)
        }
    }
}

/// Expected task reward and success probability for given compliance `c`.
pub fn stage_outcome(
    compliance: f64,
    q: f64,
    recommendation: Action,
    table: &CostTable,
    w_health: f64,
    w_time: f64,
) -> StageOutcome {
    let r = |threat, gear| task_reward(threat, gear, table, w_health, w_time);
    let follow = recommendation;
    let defy = recommendation.flip();
    let given = |threat| compliance * r(threat, follow) + (1.0 - compliance) * r(threat, defy);
    let reward = q * given(true) + (1.0 - q) * given(false);
    let success = match recommendation {
        Action::One => q,
        Action::Zero => 1.0 - q,
    };
    StageOutcome { reward, success }
}

/// Draws threat and human action for given compliance and threat probability.
pub fn sample_stage(
    compliance: f64,
    q: f64,
    recommendation: Action,
    table: &CostTable,
    w_health: f64,
    w_time: f64,
    rng: &mut dyn RngCore,
) -> StageSample {
    let threat = rng.random::<f64>() < q;
    let human = if rng.random::<f64>() < compliance {
        recommendation
    } else {
        recommendation.flip()
    };
    StageSample {
        task_reward: task_reward(threat, human, table, w_health, w_time),
        success: (recommendation == Action::One) == threat,
        human_action: Some(human),
        threat: Some(threat),
    }
}

pub fn expected_stage_outcome(
    state: TrustState,
    d_r: f64,
    recommendation: Action,
    config: &SarConfig,
) -> Result<StageOutcome> {
    let q = threat_probability(d_r, config.threat_mode, config.kappa_r, config.danger_nodes)?;
    Ok(stage_outcome(
        compliance_probability(state),
        q,
        recommendation,
        &config.costs,
        config.w_health,
        config.w_time,
    ))
}

/// Threat probability at which both recommendations have equal expected
/// immediate reward for compliance `c`. `None` when one action dominates.
pub fn myopic_indifference_threshold(compliance: f64, table: &CostTable, w_health: f64, w_time: f64) -> Option<f64> {
    // Rewards are affine in q; solve gap(0) + slope * q = 0.
    let gap = |q| {
        stage_outcome(compliance, q, Action::Zero, table, w_health, w_time).reward
            - stage_outcome(compliance, q, Action::One, table, w_health, w_time).reward
    };
    let (g0, g1) = (gap(0.0), gap(1.0));
    let slope = g1 - g0;
    if slope == 0.0 {
        return None;
    }
    let q = -g0 / slope;
    (0.0..=1.0).contains(&q).then_some(q)
}

/// Marginal law of `d_r` on a Gauss-Legendre grid, integrating `d ~ U[0, 1]`.
pub fn estimate_marginal(kappa_r: f64, danger_nodes: usize, estimate_nodes: usize) -> Result<Quadrature> {
    let (ds, dw) = gauss_legendre_unit(danger_nodes);
    let (xs, xw) = gauss_legendre_unit(estimate_nodes);
    let weights: Vec<f64> = xs
        .iter()
        .zip(&xw)
        .map(|(&x, &w)| {
            w * ds
                .iter()
                .zip(&dw)
                .map(|(&d, &u)| u * estimate_density(x, d, kappa_r))
                .sum::<f64>()
        })
        .collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NumericFailure("non-finite estimate marginal".into()));
    }
    Quadrature::normalized(xs, weights)
}

/// SAR stage model. Threat probabilities for the grid observations are
/// precomputed; other observations are evaluated on demand.
#[derive(Debug, Clone)]
pub struct SarModel {
    costs: CostTable,
    w_health: f64,
    w_time: f64,
    mode: ThreatMode,
    kappa_r: f64,
    danger_nodes: usize,
    cached: Vec<(f64, f64)>,
}

impl SarModel {
    pub fn new(config: &SarConfig, observations: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut cached = observations
            .into_iter()
            .map(|x| {
                Ok((
                    x,
                    threat_probability(x, config.threat_mode, config.kappa_r, config.danger_nodes)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        cached.sort_by(|a, b| a.0.total_cmp(&b.0));
        cached.dedup_by(|a, b| a.0 == b.0);
        Ok(Self {
            costs: config.costs,
            w_health: config.w_health,
            w_time: config.w_time,
            mode: config.threat_mode,
            kappa_r: config.kappa_r,
            danger_nodes: config.danger_nodes,
            cached,
        })
    }

    pub fn threat(&self, d_r: f64) -> f64 {
        match self.cached.binary_search_by(|probe| probe.0.total_cmp(&d_r)) {
            Ok(i) => self.cached[i].1,
            Err(_) => threat_probability(d_r, self.mode, self.kappa_r, self.danger_nodes).unwrap_or(f64::NAN),
        }
    }
}

impl StageModel for SarModel {
    fn outcome(&self, ctx: &StageContext, action: Action) -> StageOutcome {
        let q = self.threat(ctx.observation);
        stage_outcome(
            compliance_probability(ctx.state),
            q,
            action,
            &self.costs,
            self.w_health,
            self.w_time,
        )
    }

    fn sample(&self, ctx: &StageContext, action: Action, rng: &mut dyn RngCore) -> StageSample {
        let q = self.threat(ctx.observation);
        sample_stage(
            compliance_probability(ctx.state),
            q,
            action,
            &self.costs,
            self.w_health,
            self.w_time,
            rng,
        )
    }
}

pub fn build_sar_game(config: &SarConfig) -> Result<GameSpec> {
    config.validate()?;
    let law = estimate_marginal(config.kappa_r, config.danger_nodes, config.estimate_nodes)?;
    let first = config.first_observation.map(Quadrature::point).transpose()?;
    let observed = law.nodes().iter().copied().chain(config.first_observation);
    let model = SarModel::new(config, observed)?;
    let spec = GameSpec::new(
        config.horizon,
        config.gamma,
        config.initial_trust,
        config.trust_gains,
        law,
        Arc::new(model),
    )?;
    Ok(spec.with_first_observations(first))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiteSample {
    pub danger: f64,
    pub threat: bool,
    pub human_estimate: f64,
    pub robot_estimate: f64,
}

fn draw_estimate<R: Rng + ?Sized>(rng: &mut R, d: f64, kappa: f64) -> f64 {
    let a = (kappa * d).max(MIN_SHAPE);
    let b = (kappa * (1.0 - d)).max(MIN_SHAPE);
    let x: f64 = BetaSampler::new(a, b).expect("positive shapes").sample(rng);
    // Keep estimates in the open interval even when the sampler rounds.
    x.clamp(f64::EPSILON, 1.0 - f64::EPSILON)
}

/// One site from the generative model.
pub fn sample_site<R: Rng + ?Sized>(rng: &mut R, config: &SarConfig) -> SiteSample {
    let danger: f64 = rng.random();
    let threat = rng.random::<f64>() < danger;
    let human_estimate = draw_estimate(rng, danger, config.kappa_h);
    let robot_estimate = draw_estimate(rng, danger, config.kappa_r);
    SiteSample {
        danger,
        threat,
        human_estimate,
        robot_estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{solve_optimal, PolicyRule};
    use crate::shaping::{shape_game, LinearPotential};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table() -> CostTable {
        CostTable::default()
    }

    #[test]
    fn task_reward_matches_cost_table() {
        let r = |threat, gear| task_reward(threat, gear, &table(), 1.0, 0.2);
        assert_eq!(r(false, Action::Zero), -6.0);
        assert_eq!(r(true, Action::Zero), -110.0);
        assert_eq!(r(true, Action::One), -61.0);
        assert_eq!(r(false, Action::One), -50.0);
    }

    #[test]
    fn compliance_examples() {
        assert_eq!(compliance_probability(TrustState { alpha: 1.0, beta: 1.0 }), 0.5);
        assert_eq!(compliance_probability(TrustState { alpha: 3.0, beta: 1.0 }), 0.75);
        assert_eq!(compliance_probability(TrustState { alpha: 1.0, beta: 3.0 }), 0.25);
    }

    #[test]
    fn plugin_threat_is_identity() {
        assert_eq!(threat_probability(0.06, ThreatMode::Plugin, 20.0, 64).unwrap(), 0.06);
        assert!(threat_probability(0.0, ThreatMode::Plugin, 20.0, 64).is_err());
    }

    #[test]
    fn bayes_threat_is_symmetric_at_one_half() {
        for kappa in [2.0, 5.0, 20.0, 80.0] {
            let q = threat_probability(0.5, ThreatMode::Bayes, kappa, 64).unwrap();
            assert!((q - 0.5).abs() < 1e-12, "kappa {kappa}: {q}");
        }
    }

    #[test]
    fn bayes_threat_matches_dense_trapezoid() {
        // Oracle: trapezoid rule on 10^6 uniform intervals of d in [0, 1];
        // the likelihood vanishes at both ends.
        let (d_r, kappa) = (0.06, 20.0);
        let m = 1_000_000;
        let h = 1.0 / m as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 1..m {
            let d = i as f64 * h;
            let f = statrs::distribution::Beta::new(kappa * d, kappa * (1.0 - d))
                .unwrap()
                .pdf(d_r);
            num += d * f;
            den += f;
        }
        let oracle = num / den;
        let q = threat_probability(d_r, ThreatMode::Bayes, kappa, 64).unwrap();
        assert!((q - oracle).abs() < 1e-4, "{q} vs {oracle}");
    }

    #[test]
    fn expected_outcome_examples() {
        let config = SarConfig::default();
        let out = expected_stage_outcome(TrustState::default(), 0.06, Action::Zero, &config).unwrap();
        // 0.06 * (0.5 * -110 + 0.5 * -61) + 0.94 * (0.5 * -6 + 0.5 * -50)
        assert!((out.reward - -31.45).abs() < 1e-12);
        assert!((out.success - 0.94).abs() < 1e-15);

        let out = stage_outcome(1.0, 0.0, Action::Zero, &table(), 1.0, 0.2);
        assert_eq!((out.reward, out.success), (-6.0, 1.0));
        let out = stage_outcome(1.0, 1.0, Action::One, &table(), 1.0, 0.2);
        assert_eq!((out.reward, out.success), (-61.0, 1.0));
    }

    #[test]
    fn expected_reward_is_a_convex_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let c: f64 = rng.random();
            let q: f64 = rng.random();
            for a in Action::ALL {
                let out = stage_outcome(c, q, a, &table(), 1.0, 0.2);
                assert!((-110.0..=-6.0).contains(&out.reward));
                let fail = 1.0 - out.success;
                assert_eq!(out.success + fail, 1.0);
            }
        }
    }

    #[test]
    fn compliance_ignores_observation_and_action() {
        let config = SarConfig::default();
        let spec = build_sar_game(&config).unwrap();
        let model = spec.model();
        let state = TrustState { alpha: 3.0, beta: 2.0 };
        // Compliance is 3 / 5 whatever the observation or the recommendation.
        for d_r in [0.01, 0.3, 0.9] {
            for a in Action::ALL {
                let ctx = StageContext {
                    stage: 1,
                    index: 0,
                    state,
                    node: None,
                    observation: d_r,
                };
                let out = model.outcome(&ctx, a);
                let direct = stage_outcome(0.6, d_r, a, &config.costs, 1.0, 0.2);
                assert!((out.reward - direct.reward).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indifference_threshold_matches_scan() {
        let q_bar = myopic_indifference_threshold(1.0, &table(), 1.0, 0.2).unwrap();
        // -6 - 104 q = -50 - 11 q  =>  q = 44 / 93.
        assert!((q_bar - 44.0 / 93.0).abs() < 1e-12);
        let steps = 100_000;
        let mut scanned = None;
        for i in 0..=steps {
            let q = i as f64 / steps as f64;
            let r0 = stage_outcome(1.0, q, Action::Zero, &table(), 1.0, 0.2).reward;
            let r1 = stage_outcome(1.0, q, Action::One, &table(), 1.0, 0.2).reward;
            if r1 > r0 {
                scanned = Some(q);
                break;
            }
        }
        let scanned = scanned.unwrap();
        assert!(scanned >= q_bar && scanned - q_bar <= 1.0 / steps as f64);
        // Below the threshold the one-step optimum is a_r = 0.
        let config = SarConfig {
            horizon: 1,
            initial_trust: TrustState { alpha: 1e6, beta: 1.0 },
            first_observation: Some(0.9 * q_bar),
            ..SarConfig::default()
        };
        let spec = build_sar_game(&config).unwrap();
        let (_, policy) = solve_optimal(&spec).unwrap();
        assert_eq!(policy.action(1, 0, 0).unwrap(), Action::Zero);
    }

    #[test]
    fn one_step_game_picks_greedy_action_per_node() {
        let config = SarConfig {
            horizon: 1,
            first_observation: None,
            initial_trust: TrustState { alpha: 4.0, beta: 2.0 },
            estimate_nodes: 16,
            ..SarConfig::default()
        };
        let spec = build_sar_game(&config).unwrap();
        let (_, policy) = solve_optimal(&spec).unwrap();
        for (j, &d_r) in spec.observations().nodes().iter().enumerate() {
            let r0 = expected_stage_outcome(config.initial_trust, d_r, Action::Zero, &config)
                .unwrap()
                .reward;
            let r1 = expected_stage_outcome(config.initial_trust, d_r, Action::One, &config)
                .unwrap()
                .reward;
            let expect = if r1 > r0 { Action::One } else { Action::Zero };
            assert_eq!(policy.action(1, 0, j).unwrap(), expect);
        }
    }

    #[test]
    fn marginal_weights_are_normalised() {
        let law = estimate_marginal(20.0, 64, 64).unwrap();
        assert!((law.expect(|_| 3.5) - 3.5).abs() < 1e-9);
        assert!((law.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // The marginal of d_r is symmetric about 1/2 and so is its mean.
        assert!((law.expect(|x| x) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_budget_shaping_leaves_policy_identical() {
        let spec = build_sar_game(&SarConfig::default()).unwrap();
        let a = crate::lp_design::sar_shaping_coefficient(0.9, 10, 0.0, 1.0);
        let shaped = shape_game(&spec, LinearPotential::new(a, 0.0), 0.9);
        let (v, p) = solve_optimal(&spec).unwrap();
        let (v2, p2) = solve_optimal(&shaped).unwrap();
        assert_eq!(p, p2);
        assert_eq!(v, v2);
        let _ = PolicyRule::constant(&spec, Action::Zero);
    }

    #[test]
    fn invalid_config_names_field() {
        let bad = SarConfig {
            kappa_r: 1.5,
            ..SarConfig::default()
        };
        match bad.validate() {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, "kappa_r"),
            other => panic!("{other:?}"),
        }
        let bad = SarConfig {
            estimate_nodes: 1,
            ..SarConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::ConfigInvalid { field, .. }) if field == "estimate_nodes"));
        let bad = SarConfig {
            costs: CostTable {
                safe_gear: (-1.0, 0.0),
                ..CostTable::default()
            },
            ..SarConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::ConfigInvalid { field, .. }) if field == "costs.safe_gear"));
    }

    #[test]
    fn site_sampling_is_deterministic() {
        let config = SarConfig::default();
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            (0..100).map(|_| sample_site(&mut rng, &config)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b: Vec<_> = (0..100).map(|_| sample_site(&mut rng, &config)).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.human_estimate > 0.0 && s.human_estimate < 1.0));
    }

    fn corr(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        cov / (vx * vy).sqrt()
    }

    #[test]
    fn robot_estimate_is_more_accurate() {
        let config = SarConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sites: Vec<_> = (0..100_000).map(|_| sample_site(&mut rng, &config)).collect();
        let d: Vec<f64> = sites.iter().map(|s| s.danger).collect();
        let dh: Vec<f64> = sites.iter().map(|s| s.human_estimate).collect();
        let dr: Vec<f64> = sites.iter().map(|s| s.robot_estimate).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 0.5).abs() < 0.005);
        assert!(corr(&d, &dr) > corr(&d, &dh));
        let threat_rate = sites.iter().filter(|s| s.threat).count() as f64 / sites.len() as f64;
        assert!((threat_rate - 0.5).abs() < 0.01);
    }
}
