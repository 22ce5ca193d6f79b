//! Non-coordinating parallel search for a treasure hidden in one of `m`
//! ordered boxes.
//!
//! `k` identical searchers run the same randomized protocol without talking
//! to each other. This crate provides the strategy catalog, an exact engine
//! built on the single-searcher non-visit matrix `N(x, t)`, a seeded Monte
//! Carlo simulator, the continuous optimum `OPT_k` with its quadratures, and
//! closed-form bounds.

pub mod bounds;
pub mod continuous;
pub mod error;
pub mod exact;
pub mod exec;
pub mod model;
pub mod montecarlo;
pub mod report;
pub mod scalar;
pub mod schedule;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Placement, ProblemInstance, StrategyId};
pub use report::{ReportMode, SpeedupReport};
pub use scalar::{NumericMode, Scalar};
pub use schedule::{build_schedule, SelectionSchedule};
