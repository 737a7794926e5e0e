//! Trust-aware finite-horizon Markov games with potential-based reward shaping.
//!
//! The crate is organised bottom-up:
//!
//! - [`trust`]: Beta-distributed experience trust, its update rule and the
//!   geometry of reachable trust states.
//! - [`game`]: the robot-side finite-horizon decision process obtained by
//!   fixing the human policy, with exact dynamic programming, forward
//!   occupancy, seeded rollouts and a brute-force oracle.
//! - [`shaping`]: potential-based shaping rewards and certificates for the
//!   performance-loss bound.
//! - [`lp_design`]: the two-variable linear program that picks a linear
//!   potential under a loss budget.
//! - [`sar`]: the search-and-rescue scenario assembled into a [`game::GameSpec`].

pub mod error;
pub mod game;
pub mod lp_design;
pub mod quadrature;
pub mod sar;
pub mod shaping;
pub mod trust;

pub use error::{Error, Result};
pub use game::{Action, GameSpec, PolicyRule, ValueTable};
pub use shaping::{BoundReport, LinearPotential};
pub use trust::{TrustParams, TrustState};
