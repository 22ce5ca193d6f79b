use thiserror::Error;

use crate::model::StrategyId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("box index {x} outside 1..={m}")]
    BoxOutOfRange { x: usize, m: usize },

    #[error(
        "exact rational mode is limited to m <= {limit} for non-degenerate schedules (got m = {m}); use float64 mode"
    )]
    ExactLimitExceeded { m: usize, limit: usize },

    #[error("matrix is a joint matrix for a coordinated team of {team} searchers; cannot evaluate with k = {k}")]
    TeamSizeMismatch { team: usize, k: usize },

    #[error("no closed-form bound defined for {strategy:?} with k = {k}")]
    NoBound { strategy: StrategyId, k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tolerance:e}; achieved error estimate {achieved:e}")]
    QuadratureTolerance { tolerance: f64, achieved: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
