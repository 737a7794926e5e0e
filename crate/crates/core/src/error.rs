use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid performance {0}: must lie in [0, 1]")]
    InvalidPerformance(f64),

    #[error("invalid trust state ({alpha}, {beta}): both coordinates must be finite and >= 1")]
    InvalidState { alpha: f64, beta: f64 },

    #[error("invalid trust gains (w_s = {w_s}, w_f = {w_f}): both must be finite and > 0")]
    InvalidParams { w_s: f64, w_f: f64 },

    #[error("invalid stage {0}: stages start at 1")]
    InvalidStage(usize),

    #[error("invalid horizon {0}: must be >= 1")]
    InvalidHorizon(usize),

    #[error("invalid discount {0}")]
    InvalidDiscount(f64),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("policy undefined at stage {stage}, lattice index {index}, observation node {node}")]
    UndefinedPolicy { stage: usize, index: usize, node: usize },

    #[error("instance too large: {count_log2} policy bits exceed the cap of {cap_log2}")]
    InstanceTooLarge { count_log2: usize, cap_log2: usize },

    #[error("invalid config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
