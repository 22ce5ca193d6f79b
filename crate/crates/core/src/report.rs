use serde::{Deserialize, Serialize};

use crate::model::StrategyId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    Exact,
    Montecarlo,
}

impl ReportMode {
    pub fn name(self) -> &'static str {
        match self {
            ReportMode::Exact => "exact",
            ReportMode::Montecarlo => "montecarlo",
        }
    }
}

/// Per-box detail: expected find time and `theta_x = E[T_x] / x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerBox {
    pub x: usize,
    pub expected_time: f64,
    pub theta_x: f64,
}

/// Exact fractions carried alongside the float fields in rational mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactFractions {
    pub theta: String,
    pub speedup_inv_theta: String,
    pub speedup_mean: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub strategy: StrategyId,
    pub k: usize,
    /// Effective box count the strategy ran on.
    pub m: usize,
    pub mode: ReportMode,
    pub theta: f64,
    pub speedup_inv_theta: f64,
    /// Mean of per-box speed-ups `x / E[T_x]`. Absent for Monte Carlo runs
    /// without enough trials per box.
    pub speedup_mean: Option<f64>,
    pub per_x: Option<Vec<PerBox>>,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Monte Carlo trials that hit the step cap without finding the treasure.
    /// When non-zero the estimate is not valid.
    pub not_found: Option<u64>,
    pub exact: Option<ExactFractions>,
}

impl SpeedupReport {
    pub fn is_valid(&self) -> bool {
        self.not_found.unwrap_or(0) == 0 && self.theta.is_finite() && self.theta > 0.0
    }
}
