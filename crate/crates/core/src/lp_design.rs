//! Shaping design for linear potentials.
//!
//! On the final-trust line a linear potential `a * alpha + b * beta` spans
//! `N * |a * w_s - b * w_f|`, so the loss constraint becomes the strip
//! `|a * w_s - b * w_f| <= gamma^{-N} eps / N`. Maximising the up/down reward
//! gap `a * w_s - b * w_f` over that strip is a two-variable LP whose optimum
//! sits on the upper edge; pinning `b = 0` picks one point of it.

use serde::Serialize;

use crate::shaping::{BoundReport, LinearPotential};
use crate::trust::{FinalTrustLine, TrustParams};

/// How the underdetermined LP is pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `b = 0`.
    ZeroBeta,
    /// `a = 0`.
    ZeroAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpSpec {
    pub params: TrustParams,
    pub gamma: f64,
    pub horizon: usize,
    pub epsilon: f64,
    pub normalization: Normalization,
}

impl LpSpec {
    /// `gamma^{-N} eps / N`, the half-width of the feasible strip.
    pub fn bound(&self) -> f64 {
        self.gamma.powi(-(self.horizon as i32)) * self.epsilon / self.horizon as f64
    }

    pub fn objective(&self, a: f64, b: f64) -> f64 {
        a * self.params.w_s - b * self.params.w_f
    }

    pub fn is_feasible(&self, a: f64, b: f64) -> bool {
        self.objective(a, b).abs() <= self.bound() * (1.0 + 1e-12) + 1e-15
    }
}

pub fn build_lp(params: TrustParams, gamma: f64, horizon: usize, epsilon: f64) -> LpSpec {
    LpSpec {
        params,
        gamma,
        horizon,
        epsilon,
        normalization: Normalization::ZeroBeta,
    }
}

/// Point on the upper edge of the strip selected by the normalisation.
pub fn solve_closed_form(lp: &LpSpec) -> LinearPotential {
    let bound = lp.bound();
    match lp.normalization {
        Normalization::ZeroBeta => LinearPotential::new(bound / lp.params.w_s, 0.0),
        Normalization::ZeroAlpha => LinearPotential::new(0.0, -bound / lp.params.w_f),
    }
}

/// `max phi(line) - min phi(line) <= gamma^{-N} eps`, evaluated at the endpoints.
pub fn verify_loss_constraint(
    potential: &LinearPotential,
    line: &FinalTrustLine,
    gamma: f64,
    horizon: usize,
    epsilon: f64,
) -> BoundReport {
    let (lo, hi) = line.endpoints();
    let spread = (potential.eval(hi) - potential.eval(lo)).abs();
    BoundReport::upper(spread, gamma.powi(-(horizon as i32)) * epsilon)
}

/// `c` with shaping reward `c * (gamma * alpha' - alpha)` for the `b = 0` potential.
pub fn sar_shaping_coefficient(gamma: f64, horizon: usize, epsilon: f64, w_s: f64) -> f64 {
    gamma.powi(-(horizon as i32)) * epsilon / (horizon as f64 * w_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shaping::shaping_reward;
    use crate::trust::{final_trust_line, TrustState};
    use proptest::prelude::*;

    fn params(w_s: f64, w_f: f64) -> TrustParams {
        TrustParams::new(w_s, w_f).unwrap()
    }

    #[test]
    fn bound_examples() {
        let lp = build_lp(params(1.0, 1.0), 0.9, 10, 30.0);
        // 0.9^-10 = 2.8679719907924413
        assert!((lp.bound() - 8.60392).abs() < 1e-5);
        assert_eq!(build_lp(params(1.0, 1.0), 0.9, 10, 0.0).bound(), 0.0);
        assert_eq!(build_lp(params(1.0, 1.0), 1.0, 5, 5.0).bound(), 1.0);
    }

    #[test]
    fn zero_budget_pins_objective() {
        let lp = build_lp(params(2.0, 3.0), 0.9, 4, 0.0);
        assert!(lp.is_feasible(3.0, 2.0));
        assert!(!lp.is_feasible(3.0, 1.0));
        assert_eq!(solve_closed_form(&lp), LinearPotential::ZERO);
    }

    #[test]
    fn closed_form_examples() {
        let lp = build_lp(params(1.0, 1.0), 0.9, 10, 30.0);
        let phi = solve_closed_form(&lp);
        assert!((phi.a - 8.60392).abs() < 1e-5);
        assert_eq!(phi.b, 0.0);
        assert!((lp.objective(phi.a, phi.b) / lp.bound() - 1.0).abs() < 1e-15);

        let phi = solve_closed_form(&build_lp(params(2.0, 1.0), 1.0, 4, 8.0));
        assert_eq!(phi, LinearPotential::new(1.0, 0.0));
    }

    #[test]
    fn loss_constraint_examples() {
        let (n, gamma, eps) = (10usize, 0.9, 30.0);
        let line = final_trust_line(TrustState::default(), params(1.0, 1.0), n).unwrap();
        let phi = solve_closed_form(&build_lp(params(1.0, 1.0), gamma, n, eps));
        let report = verify_loss_constraint(&phi, &line, gamma, n, eps);
        assert!(report.satisfied);
        assert!((report.lhs / report.rhs - 1.0).abs() < 1e-9);

        let zero = verify_loss_constraint(&LinearPotential::ZERO, &line, gamma, n, eps);
        assert!(zero.satisfied);
        assert_eq!(zero.slack, zero.rhs);

        let double = verify_loss_constraint(&phi.scaled(2.0), &line, gamma, n, eps);
        assert!(!double.satisfied);
        assert!((double.lhs / double.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_examples() {
        assert!((sar_shaping_coefficient(0.9, 10, 30.0, 1.0) - 8.60392).abs() < 1e-5);
        assert_eq!(sar_shaping_coefficient(0.9, 10, 0.0, 1.0), 0.0);
        assert_eq!(sar_shaping_coefficient(1.0, 10, 10.0, 1.0), 1.0);
    }

    #[test]
    fn alternative_normalisation_is_also_optimal() {
        let lp = LpSpec {
            normalization: Normalization::ZeroAlpha,
            ..build_lp(params(1.0, 2.0), 0.9, 5, 12.0)
        };
        let phi = solve_closed_form(&lp);
        assert_eq!(phi.a, 0.0);
        assert!((lp.objective(phi.a, phi.b) - lp.bound()).abs() < 1e-12);
    }

    #[test]
    fn coefficient_monotonicity() {
        let c = |n: usize, eps: f64| sar_shaping_coefficient(0.9, n, eps, 1.0);
        for n in 1..=12 {
            assert!(c(n, 31.0) > c(n, 30.0));
        }
        // c(N + 1) / c(N) = N / ((N + 1) gamma), below 1 iff N < gamma / (1 - gamma) = 9.
        // N = 9 is an exact tie and is skipped.
        for n in (1..20usize).filter(|&n| n != 9) {
            assert_eq!(c(n + 1, 30.0) < c(n, 30.0), n < 9, "N = {n}");
        }
    }

    proptest! {
        #[test]
        fn closed_form_is_feasible_on_every_line(
            alpha in 1.0..30.0f64, beta in 1.0..30.0f64,
            w_s in 0.1..5.0f64, w_f in 0.1..5.0f64,
            gamma in 0.5..=1.0f64, n in 1usize..=15, eps in 0.0..500.0f64,
        ) {
            let p = params(w_s, w_f);
            let phi = solve_closed_form(&build_lp(p, gamma, n, eps));
            let line = final_trust_line(TrustState::new(alpha, beta).unwrap(), p, n).unwrap();
            prop_assert!(verify_loss_constraint(&phi, &line, gamma, n, eps).satisfied);
        }

        #[test]
        fn grid_search_never_beats_closed_form(
            w_s in 0.1..5.0f64, w_f in 0.1..5.0f64, gamma in 0.5..=1.0f64, n in 1usize..=15, eps in 0.0..500.0f64,
        ) {
            let lp = build_lp(params(w_s, w_f), gamma, n, eps);
            let phi = solve_closed_form(&lp);
            let best = lp.objective(phi.a, phi.b);
            // Coarse grid over a box around the strip, independent of the closed form.
            let span = 2.0 * lp.bound() / w_s.min(w_f) + 1.0;
            let steps = 60;
            for i in 0..=steps {
                for j in 0..=steps {
                    let a = -span + 2.0 * span * i as f64 / steps as f64;
                    let b = -span + 2.0 * span * j as f64 / steps as f64;
                    if lp.is_feasible(a, b) {
                        prop_assert!(lp.objective(a, b) <= lp.bound() + 1e-12 * (1.0 + lp.bound()));
                    }
                }
            }
            prop_assert!((best - lp.bound()).abs() <= 1e-12 * (1.0 + lp.bound()));
        }

        #[test]
        fn shaping_reward_is_beta_independent(
            alpha in 1.0..20.0f64, beta in 1.0..20.0f64, up in any::<bool>(), eps in 0.0..300.0f64,
        ) {
            let p = TrustParams::default();
            let c = sar_shaping_coefficient(0.9, 10, eps, p.w_s);
            let phi = solve_closed_form(&build_lp(p, 0.9, 10, eps));
            let s = TrustState::new(alpha, beta).unwrap();
            let t = if up { s.after_success(&p) } else { s.after_failure(&p) };
            let r = shaping_reward(&phi, 0.9, s, t);
            prop_assert!((r - c * (0.9 * t.alpha - s.alpha)).abs() <= 1e-9 * (1.0 + r.abs()));
        }
    }
}
