//! Experience-based trust.
//!
//! Trust before an interaction is `Beta(alpha, beta)`, where `alpha` and
//! `beta` accumulate positive and negative experience. A performance
//! `p in [0, 1]` moves the state to `(alpha + w_s * p, beta + w_f * (1 - p))`,
//! so after `n - 1` binary interactions the reachable states form a lattice
//! indexed by the number of successes, and after `N` interactions they lie on
//! a single line segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit experience gains on success (`w_s`) and failure (`w_f`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustParams {
    pub w_s: f64,
    pub w_f: f64,
}

impl TrustParams {
    pub fn new(w_s: f64, w_f: f64) -> Result<Self> {
        let params = Self { w_s, w_f };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |w: f64| w.is_finite() && w > 0.0;
        if ok(self.w_s) && ok(self.w_f) {
            Ok(())
        } else {
            Err(Error::InvalidParams {
                w_s: self.w_s,
                w_f: self.w_f,
            })
        }
    }
}

impl Default for TrustParams {
    fn default() -> Self {
        Self { w_s: 1.0, w_f: 1.0 }
    }
}

/// Experience pair `(alpha, beta)`, both at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustState {
    pub alpha: f64,
    pub beta: f64,
}

impl TrustState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let state = Self { alpha, beta };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 1.0;
        if ok(self.alpha) && ok(self.beta) {
            Ok(())
        } else {
            Err(Error::InvalidState {
                alpha: self.alpha,
                beta: self.beta,
            })
        }
    }

    /// Mean of `Beta(alpha, beta)`.
    pub fn expected(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn after_success(&self, params: &TrustParams) -> Self {
        Self {
            alpha: self.alpha + params.w_s,
            beta: self.beta,
        }
    }

    pub fn after_failure(&self, params: &TrustParams) -> Self {
        Self {
            alpha: self.alpha,
            beta: self.beta + params.w_f,
        }
    }
}

impl Default for TrustState {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }
}

pub fn update_trust(state: TrustState, p: f64, params: &TrustParams) -> Result<TrustState> {
    state.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidPerformance(p));
    }
    Ok(TrustState {
        alpha: state.alpha + params.w_s * p,
        beta: state.beta + params.w_f * (1.0 - p),
    })
}

pub fn expected_trust(state: TrustState) -> Result<f64> {
    state.validate()?;
    Ok(state.expected())
}

/// Trust states reachable at a given stage, addressed by success count.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustLattice {
    initial: TrustState,
    params: TrustParams,
    stage: usize,
    points: Vec<TrustState>,
}

impl TrustLattice {
    pub fn initial(&self) -> TrustState {
        self.initial
    }

    pub fn params(&self) -> TrustParams {
        self.params
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> Option<TrustState> {
        self.points.get(k).copied()
    }

    pub fn points(&self) -> &[TrustState] {
        &self.points
    }
}

/// State with `k` successes among the first `stage - 1` interactions.
///
/// Computed directly from the counts so that lattice addresses never depend on
/// accumulated floating-point sums.
pub fn lattice_point(initial: TrustState, params: &TrustParams, stage: usize, k: usize) -> TrustState {
    debug_assert!(stage >= 1 && k < stage);
    TrustState {
        alpha: initial.alpha + params.w_s * k as f64,
        beta: initial.beta + params.w_f * (stage - 1 - k) as f64,
    }
}

pub fn reachable_lattice(initial: TrustState, params: TrustParams, stage: usize) -> Result<TrustLattice> {
    if stage < 1 {
        return Err(Error::InvalidStage(stage));
    }
    initial.validate()?;
    params.validate()?;
    let points = (0..stage).map(|k| lattice_point(initial, &params, stage, k)).collect();
    Ok(TrustLattice {
        initial,
        params,
        stage,
        points,
    })
}

/// Segment `t in [0, N] -> (alpha_1 + w_s t, beta_1 + w_f (N - t))` holding
/// every trust state reachable after `N` interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalTrustLine {
    pub initial: TrustState,
    pub params: TrustParams,
    pub horizon: usize,
}

impl FinalTrustLine {
    pub fn at(&self, t: f64) -> TrustState {
        TrustState {
            alpha: self.initial.alpha + self.params.w_s * t,
            beta: self.initial.beta + self.params.w_f * (self.horizon as f64 - t),
        }
    }

    /// Endpoints at `t = 0` (all failures) and `t = N` (all successes).
    pub fn endpoints(&self) -> (TrustState, TrustState) {
        (self.at(0.0), self.at(self.horizon as f64))
    }

    /// Smallest Chebyshev distance from `state` to the segment.
    pub fn distance(&self, state: TrustState) -> f64 {
        let n = self.horizon as f64;
        let TrustParams { w_s, w_f } = self.params;
        // f(t) = w_s t - da and g(t) = db - w_f t are the coordinate residuals;
        // max(|f|, |g|) is convex piecewise linear, so its minimum over [0, N]
        // sits at a zero of f or g, at a crossing |f| = |g|, or at an endpoint.
        let da = state.alpha - self.initial.alpha;
        let db = self.initial.beta + w_f * n - state.beta;
        let residual = |t: f64| (w_s * t - da).abs().max((db - w_f * t).abs());
        let mut candidates = vec![0.0, n, da / w_s, db / w_f, (da + db) / (w_s + w_f)];
        if w_s != w_f {
            candidates.push((da - db) / (w_s - w_f));
        }
        candidates
            .into_iter()
            .filter(|t| t.is_finite())
            .map(|t| residual(t.clamp(0.0, n)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, state: TrustState, tol: f64) -> bool {
        self.distance(state) <= tol
    }
}

pub fn final_trust_line(initial: TrustState, params: TrustParams, horizon: usize) -> Result<FinalTrustLine> {
    if horizon < 1 {
        return Err(Error::InvalidHorizon(horizon));
    }
    initial.validate()?;
    params.validate()?;
    Ok(FinalTrustLine {
        initial,
        params,
        horizon,
    })
}

pub fn contains_point(line: &FinalTrustLine, state: TrustState, tol: f64) -> bool {
    line.contains(state, tol)
}
