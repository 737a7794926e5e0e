//! Finite-horizon robot-side decision process.
//!
//! Fixing the human policy inside the two-player game leaves the robot with a
//! finite-horizon MDP over trust states. At stage `n` the reachable states
//! are the `n` lattice points indexed by success count `k`; before acting the
//! robot sees an observation drawn from a per-stage discrete law. A
//! [`StageModel`] supplies the expected task reward and the success
//! probability for each robot action; success moves `k -> k + 1`, failure
//! keeps `k`.
//!
//! Argmax ties resolve to [`Action::Zero`].

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::shaping::LinearPotential;
use crate::trust::{lattice_point, FinalTrustLine, TrustParams, TrustState};

/// Binary robot action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Action {
    Zero,
    One,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Zero, Action::One];

    pub fn index(self) -> usize {
        match self {
            Action::Zero => 0,
            Action::One => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Action::Zero => Action::One,
            Action::One => Action::Zero,
        }
    }
}

impl From<Action> for u8 {
    fn from(a: Action) -> u8 {
        a.index() as u8
    }
}

impl TryFrom<u8> for Action {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Action::Zero),
            1 => Ok(Action::One),
            other => Err(format!("action must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Where the robot is when it acts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageContext {
    pub stage: usize,
    /// Success count so far.
    pub index: usize,
    pub state: TrustState,
    /// Quadrature node of the observation, `None` for a free observation.
    pub node: Option<usize>,
    pub observation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageOutcome {
    /// Expected immediate reward.
    pub reward: f64,
    /// Probability that the interaction counts as a success.
    pub success: f64,
}

/// One realised interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSample {
    pub task_reward: f64,
    pub success: bool,
    pub human_action: Option<Action>,
    pub threat: Option<bool>,
}

pub trait StageModel: Send + Sync + fmt::Debug {
    fn outcome(&self, ctx: &StageContext, action: Action) -> StageOutcome;

    /// Draws one interaction. The default samples success from the outcome
    /// and pays the expected reward, which keeps rollout means unbiased.
    fn sample(&self, ctx: &StageContext, action: Action, rng: &mut dyn RngCore) -> StageSample {
        let out = self.outcome(ctx, action);
        StageSample {
            task_reward: out.reward,
            success: rng.random::<f64>() < out.success,
            human_action: None,
            threat: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shaping {
    pub potential: LinearPotential,
    pub gamma: f64,
}

impl Shaping {
    pub fn reward(&self, s: TrustState, s_next: TrustState) -> f64 {
        self.gamma * self.potential.eval(s_next) - self.potential.eval(s)
    }
}

#[derive(Debug, Clone)]
pub struct GameSpec {
    horizon: usize,
    gamma: f64,
    initial: TrustState,
    params: TrustParams,
    observations: Quadrature,
    first_observation: Option<Quadrature>,
    model: Arc<dyn StageModel>,
    shaping: Option<Shaping>,
}

impl GameSpec {
    pub fn new(
        horizon: usize,
        gamma: f64,
        initial: TrustState,
        params: TrustParams,
        observations: Quadrature,
        model: Arc<dyn StageModel>,
    ) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidHorizon(horizon));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidDiscount(gamma));
        }
        initial.validate()?;
        params.validate()?;
        Ok(Self {
            horizon,
            gamma,
            initial,
            params,
            observations,
            first_observation: None,
            model,
            shaping: None,
        })
    }

    /// Conditions stage 1 on an observed value instead of its law.
    pub fn with_first_observation(mut self, observation: f64) -> Result<Self> {
        self.first_observation = Some(Quadrature::point(observation)?);
        Ok(self)
    }

    pub fn with_first_observations(mut self, law: Option<Quadrature>) -> Self {
        self.first_observation = law;
        self
    }

    pub fn with_initial(mut self, initial: TrustState) -> Result<Self> {
        initial.validate()?;
        self.initial = initial;
        Ok(self)
    }

    pub(crate) fn with_shaping(mut self, shaping: Option<Shaping>) -> Self {
        self.shaping = shaping;
        self
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial(&self) -> TrustState {
        self.initial
    }

    pub fn params(&self) -> TrustParams {
        self.params
    }

    pub fn model(&self) -> &Arc<dyn StageModel> {
        &self.model
    }

    pub fn shaping(&self) -> Option<&Shaping> {
        self.shaping.as_ref()
    }

    /// The same game with the shaping reward removed.
    pub fn unshaped(&self) -> Self {
        self.clone().with_shaping(None)
    }

    pub fn observations(&self) -> &Quadrature {
        &self.observations
    }

    pub fn first_observations(&self) -> Option<&Quadrature> {
        self.first_observation.as_ref()
    }

    /// Observation law in force at `stage`.
    pub fn observations_at(&self, stage: usize) -> &Quadrature {
        match (&self.first_observation, stage) {
            (Some(first), 1) => first,
            _ => &self.observations,
        }
    }

    pub fn state_at(&self, stage: usize, k: usize) -> TrustState {
        lattice_point(self.initial, &self.params, stage, k)
    }

    pub fn final_line(&self) -> FinalTrustLine {
        FinalTrustLine {
            initial: self.initial,
            params: self.params,
            horizon: self.horizon,
        }
    }

    pub fn context(&self, stage: usize, k: usize, node: usize) -> StageContext {
        StageContext {
            stage,
            index: k,
            state: self.state_at(stage, k),
            node: Some(node),
            observation: self.observations_at(stage).nodes()[node],
        }
    }

    /// Shaping reward paid on `s -> s_next`, zero in an unshaped game.
    pub fn shaping_reward(&self, s: TrustState, s_next: TrustState) -> f64 {
        self.shaping.map_or(0.0, |sh| sh.reward(s, s_next))
    }

    /// Expected immediate reward (task plus shaping) and success probability.
    pub fn outcome(&self, ctx: &StageContext, action: Action) -> Result<StageOutcome> {
        let mut out = self.model.outcome(ctx, action);
        if !out.reward.is_finite() {
            return Err(Error::NumericFailure(format!(
                "non-finite reward {} at stage {}, index {}",
                out.reward, ctx.stage, ctx.index
            )));
        }
        if !(0.0..=1.0).contains(&out.success) {
            return Err(Error::NumericFailure(format!(
                "success probability {} outside [0, 1] at stage {}, index {}",
                out.success, ctx.stage, ctx.index
            )));
        }
        if let Some(sh) = &self.shaping {
            let up = sh.reward(ctx.state, ctx.state.after_success(&self.params));
            let down = sh.reward(ctx.state, ctx.state.after_failure(&self.params));
            out.reward += out.success * up + (1.0 - out.success) * down;
        }
        Ok(out)
    }

    fn q_value(&self, ctx: &StageContext, action: Action, next: &[f64]) -> Result<(f64, f64)> {
        let out = self.outcome(ctx, action)?;
        let k = ctx.index;
        let q = out.reward + self.gamma * (out.success * next[k + 1] + (1.0 - out.success) * next[k]);
        Ok((q, out.success))
    }
}

/// Stage-indexed values over the lattice; stage `N + 1` is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    stages: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn horizon(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn value(&self, stage: usize, k: usize) -> f64 {
        self.stages[stage - 1][k]
    }

    pub fn stage(&self, stage: usize) -> &[f64] {
        &self.stages[stage - 1]
    }

    /// `V_1(s_1)`.
    pub fn initial_value(&self) -> f64 {
        self.stages[0][0]
    }
}

/// Deterministic decision rule over `(stage, success count, observation node)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyRule {
    table: Vec<Vec<Vec<Action>>>,
}

impl PolicyRule {
    /// Wraps a raw table indexed `[stage - 1][k][node]`. Missing entries surface
    /// as [`Error::UndefinedPolicy`] when the rule is used.
    pub fn from_table(table: Vec<Vec<Vec<Action>>>) -> Self {
        Self { table }
    }

    pub fn from_fn(spec: &GameSpec, mut f: impl FnMut(&StageContext) -> Action) -> Self {
        let table = (1..=spec.horizon)
            .map(|n| {
                (0..n)
                    .map(|k| {
                        (0..spec.observations_at(n).len())
                            .map(|j| f(&spec.context(n, k, j)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { table }
    }

    pub fn constant(spec: &GameSpec, action: Action) -> Self {
        Self::from_fn(spec, |_| action)
    }

    pub fn random<R: Rng + ?Sized>(spec: &GameSpec, rng: &mut R) -> Self {
        Self::from_fn(spec, |_| {
            if rng.random::<bool>() {
                Action::One
            } else {
                Action::Zero
            }
        })
    }

    /// Greedy with respect to `values` (ties to [`Action::Zero`]).
    pub fn greedy(spec: &GameSpec, values: &ValueTable) -> Result<Self> {
        let mut err = None;
        let rule = Self::from_fn(spec, |ctx| match best_action(spec, ctx, values.stage(ctx.stage + 1)) {
            Ok((a, _)) => a,
            Err(e) => {
                err.get_or_insert(e);
                Action::Zero
            }
        });
        err.map_or(Ok(rule), Err)
    }

    pub fn action(&self, stage: usize, k: usize, node: usize) -> Result<Action> {
        stage
            .checked_sub(1)
            .and_then(|n| self.table.get(n))
            .and_then(|row| row.get(k))
            .and_then(|cell| cell.get(node))
            .copied()
            .ok_or(Error::UndefinedPolicy { stage, index: k, node })
    }

    pub fn table(&self) -> &[Vec<Vec<Action>>] {
        &self.table
    }
}

fn best_action(spec: &GameSpec, ctx: &StageContext, next: &[f64]) -> Result<(Action, f64)> {
    let (q0, _) = spec.q_value(ctx, Action::Zero, next)?;
    let (q1, _) = spec.q_value(ctx, Action::One, next)?;
    Ok(if q1 > q0 { (Action::One, q1) } else { (Action::Zero, q0) })
}

/// `[Q(a = 0), Q(a = 1)]` at `(stage, k)` for a caller-supplied observation,
/// using the continuation values in `values`.
pub fn q_values(spec: &GameSpec, values: &ValueTable, stage: usize, k: usize, observation: f64) -> Result<[f64; 2]> {
    if stage < 1 || stage > spec.horizon {
        return Err(Error::InvalidStage(stage));
    }
    let ctx = StageContext {
        stage,
        index: k,
        state: spec.state_at(stage, k),
        node: None,
        observation,
    };
    let next = values.stage(stage + 1);
    Ok([
        spec.q_value(&ctx, Action::Zero, next)?.0,
        spec.q_value(&ctx, Action::One, next)?.0,
    ])
}

/// Greedy action at `(stage, k)` for a caller-supplied observation.
pub fn greedy_action(spec: &GameSpec, values: &ValueTable, stage: usize, k: usize, observation: f64) -> Result<Action> {
    let [q0, q1] = q_values(spec, values, stage, k, observation)?;
    Ok(if q1 > q0 { Action::One } else { Action::Zero })
}

/// Backward induction. Returns the optimal values and the per-node argmax rule.
pub fn solve_optimal(spec: &GameSpec) -> Result<(ValueTable, PolicyRule)> {
    let n_max = spec.horizon;
    let mut stages = vec![Vec::new(); n_max + 1];
    stages[n_max] = vec![0.0; n_max + 1];
    let mut table = vec![Vec::new(); n_max];
    for n in (1..=n_max).rev() {
        let law = spec.observations_at(n);
        let mut values = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = 0.0;
            let mut row = Vec::with_capacity(law.len());
            for (j, w) in law.weights().iter().enumerate() {
                let (a, q) = best_action(spec, &spec.context(n, k, j), &stages[n])?;
                v += w * q;
                row.push(a);
            }
            values.push(v);
            rows.push(row);
        }
        stages[n - 1] = values;
        table[n - 1] = rows;
    }
    Ok((ValueTable { stages }, PolicyRule { table }))
}

fn evaluate_with(spec: &GameSpec, mut act: impl FnMut(usize, usize, usize) -> Result<Action>) -> Result<ValueTable> {
    let n_max = spec.horizon;
    let mut stages = vec![Vec::new(); n_max + 1];
    stages[n_max] = vec![0.0; n_max + 1];
    for n in (1..=n_max).rev() {
        let law = spec.observations_at(n);
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = 0.0;
            for (j, w) in law.weights().iter().enumerate() {
                let a = act(n, k, j)?;
                v += w * spec.q_value(&spec.context(n, k, j), a, &stages[n])?.0;
            }
            values.push(v);
        }
        stages[n - 1] = values;
    }
    Ok(ValueTable { stages })
}

/// Exact value of a fixed rule: the backward recursion without the max.
pub fn evaluate_policy(spec: &GameSpec, policy: &PolicyRule) -> Result<ValueTable> {
    evaluate_with(spec, |n, k, j| policy.action(n, k, j))
}

/// Occupancy of every lattice point at every stage `1..=N+1` under `policy`.
pub fn occupancy(spec: &GameSpec, policy: &PolicyRule) -> Result<Vec<Vec<f64>>> {
    let n_max = spec.horizon;
    let mut occ = Vec::with_capacity(n_max + 1);
    occ.push(vec![1.0]);
    for n in 1..=n_max {
        let law = spec.observations_at(n);
        let cur = &occ[n - 1];
        let mut next = vec![0.0; n + 1];
        for (k, &mass) in cur.iter().enumerate() {
            let mut p_success = 0.0;
            for (j, w) in law.weights().iter().enumerate() {
                let a = policy.action(n, k, j)?;
                p_success += w * spec.outcome(&spec.context(n, k, j), a)?.success;
            }
            next[k + 1] += mass * p_success;
            next[k] += mass * (1.0 - p_success);
        }
        occ.push(next);
    }
    Ok(occ)
}

/// Law of the success count `k` at stage `N + 1`.
pub fn final_state_distribution(spec: &GameSpec, policy: &PolicyRule) -> Result<Vec<f64>> {
    Ok(occupancy(spec, policy)?.pop().expect("horizon >= 1"))
}

/// `E[f(s_{N+1})]` under `policy`.
pub fn expected_final(spec: &GameSpec, policy: &PolicyRule, f: impl Fn(TrustState) -> f64) -> Result<f64> {
    let dist = final_state_distribution(spec, policy)?;
    Ok(dist
        .iter()
        .enumerate()
        .map(|(k, p)| p * f(spec.state_at(spec.horizon + 1, k)))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub stage: usize,
    pub state: TrustState,
    pub node: usize,
    pub observation: f64,
    pub robot_action: Action,
    pub human_action: Option<Action>,
    pub threat: Option<bool>,
    pub performance: f64,
    pub task_reward: f64,
    pub shaping_reward: f64,
    pub next_state: TrustState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
    /// Success count after the last step.
    pub final_index: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> TrustState {
        self.steps.last().map(|s| s.next_state).expect("non-empty trajectory")
    }

    pub fn discounted_task_reward(&self, gamma: f64) -> f64 {
        discounted(self.steps.iter().map(|s| s.task_reward), gamma)
    }

    pub fn discounted_total_reward(&self, gamma: f64) -> f64 {
        discounted(self.steps.iter().map(|s| s.task_reward + s.shaping_reward), gamma)
    }
}

fn discounted(rewards: impl Iterator<Item = f64>, gamma: f64) -> f64 {
    let mut g = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += g * r;
        g *= gamma;
    }
    total
}

fn sample_node<R: Rng + ?Sized>(law: &Quadrature, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, w) in law.weights().iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    // u landed in the rounding gap above the cumulative sum.
    law.weights().iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// One episode. Observations are drawn from the per-stage law the solver uses.
pub fn simulate_rollout<R: RngCore>(spec: &GameSpec, policy: &PolicyRule, rng: &mut R) -> Result<Trajectory> {
    let mut k = 0;
    let mut steps = Vec::with_capacity(spec.horizon);
    for n in 1..=spec.horizon {
        let node = sample_node(spec.observations_at(n), rng);
        let ctx = spec.context(n, k, node);
        let action = policy.action(n, k, node)?;
        let sample = spec.model.sample(&ctx, action, rng);
        let next_state = if sample.success {
            ctx.state.after_success(&spec.params)
        } else {
            ctx.state.after_failure(&spec.params)
        };
        steps.push(StepRecord {
            stage: n,
            state: ctx.state,
            node,
            observation: ctx.observation,
            robot_action: action,
            human_action: sample.human_action,
            threat: sample.threat,
            performance: if sample.success { 1.0 } else { 0.0 },
            task_reward: sample.task_reward,
            shaping_reward: spec.shaping_reward(ctx.state, next_state),
            next_state,
        });
        if sample.success {
            k += 1;
        }
    }
    Ok(Trajectory { steps, final_index: k })
}

/// Stream for rollout `index`: a function of `(seed, index)` only.
pub fn rollout_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len() as f64;
        // Shifted by the first sample, so constant data gives exactly zero spread.
        let shift = values[0];
        let offset = values.iter().map(|x| x - shift).sum::<f64>() / n;
        let mean = shift + offset;
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|x| (x - shift - offset).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            samples: values.len(),
            seed,
        }
    }
}

/// Monte-Carlo mean of a per-trajectory statistic over independent rollouts.
///
/// Rollout `i` uses [`rollout_rng`]`(seed, i)`; results are gathered in index
/// order, so the estimate does not depend on thread scheduling.
pub fn mc_estimate(
    spec: &GameSpec,
    policy: &PolicyRule,
    samples: usize,
    seed: u64,
    statistic: impl Fn(&Trajectory) -> f64 + Sync,
) -> Result<McEstimate> {
    if samples < 1 {
        return Err(Error::NumericFailure("Monte-Carlo needs at least one sample".into()));
    }
    for n in 1..=spec.horizon {
        for k in 0..n {
            for j in 0..spec.observations_at(n).len() {
                policy.action(n, k, j)?;
            }
        }
    }
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rollout_rng(seed, i);
            let traj = simulate_rollout(spec, policy, &mut rng).expect("policy checked total");
            statistic(&traj)
        })
        .collect();
    Ok(McEstimate::from_values(&values, seed))
}

/// Monte-Carlo estimate of `V_1(s_1)`: discounted task plus shaping reward.
pub fn mc_estimate_value(spec: &GameSpec, policy: &PolicyRule, samples: usize, seed: u64) -> Result<McEstimate> {
    let gamma = spec.gamma;
    mc_estimate(spec, policy, samples, seed, |t| t.discounted_total_reward(gamma))
}

pub const DEFAULT_BRUTE_FORCE_CAP_LOG2: usize = 20;

/// Best `V_1(s_1)` over every deterministic rule, each evaluated exactly.
pub fn brute_force_optimal(spec: &GameSpec) -> Result<f64> {
    brute_force_optimal_with_cap(spec, DEFAULT_BRUTE_FORCE_CAP_LOG2)
}

pub fn brute_force_optimal_with_cap(spec: &GameSpec, cap_log2: usize) -> Result<f64> {
    // One bit per (stage, k, node), laid out stage-major.
    let mut offsets = Vec::with_capacity(spec.horizon);
    let mut bits = 0usize;
    for n in 1..=spec.horizon {
        offsets.push(bits);
        bits += n * spec.observations_at(n).len();
        if bits > cap_log2 {
            return Err(Error::InstanceTooLarge {
                count_log2: bits,
                cap_log2,
            });
        }
    }
    let nodes: Vec<usize> = (1..=spec.horizon).map(|n| spec.observations_at(n).len()).collect();
    (0u64..1u64 << bits)
        .into_par_iter()
        .map(|mask| {
            let values = evaluate_with(spec, |n, k, j| {
                let bit = offsets[n - 1] + k * nodes[n - 1] + j;
                Ok(if mask >> bit & 1 == 1 {
                    Action::One
                } else {
                    Action::Zero
                })
            })?;
            Ok(values.initial_value())
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}

/// Stage model backed by explicit per-node tables, for tests and small
/// synthetic instances.
///
/// Entries are indexed `[stage - 1][k][node]`. A free observation (no node)
/// resolves to the node whose stored observation value is nearest.
#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    observations: Vec<Vec<f64>>,
    outcomes: Vec<Vec<Vec<[StageOutcome; 2]>>>,
}

impl TableModel {
    pub fn new(observations: Vec<Vec<f64>>, outcomes: Vec<Vec<Vec<[StageOutcome; 2]>>>) -> Self {
        Self { observations, outcomes }
    }

    /// A random instance: rewards uniform in `[-100, 0]`, success
    /// probabilities uniform in `[0, 1]`, `nodes` random observation nodes per
    /// stage with random weights.
    pub fn random_spec<R: Rng + ?Sized>(
        rng: &mut R,
        horizon: usize,
        nodes: usize,
        gamma: f64,
        initial: TrustState,
        params: TrustParams,
    ) -> Result<GameSpec> {
        let mut node_values: Vec<f64> = (0..nodes).map(|_| rng.random::<f64>()).collect();
        node_values.sort_by(f64::total_cmp);
        let weights: Vec<f64> = (0..nodes).map(|_| 0.05 + rng.random::<f64>()).collect();
        let law = Quadrature::normalized(node_values.clone(), weights)?;
        let mut draw = || StageOutcome {
            reward: -100.0 * rng.random::<f64>(),
            success: rng.random::<f64>(),
        };
        let outcomes = (1..=horizon)
            .map(|n| (0..n).map(|_| (0..nodes).map(|_| [draw(), draw()]).collect()).collect())
            .collect();
        let model = TableModel::new(vec![node_values; horizon], outcomes);
        GameSpec::new(horizon, gamma, initial, params, law, Arc::new(model))
    }
}

impl StageModel for TableModel {
    fn outcome(&self, ctx: &StageContext, action: Action) -> StageOutcome {
        let obs = &self.observations[ctx.stage - 1];
        let node = ctx.node.unwrap_or_else(|| {
            (0..obs.len())
                .min_by(|&a, &b| {
                    (obs[a] - ctx.observation)
                        .abs()
                        .total_cmp(&(obs[b] - ctx.observation).abs())
                })
                .unwrap_or(0)
        });
        self.outcomes[ctx.stage - 1][ctx.index][node][action.index()]
    }
}
