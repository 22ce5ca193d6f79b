//! Problem instances and the strategy catalog.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the treasure is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Uniformly at random over boxes `1..=m`.
    Uniform,
    /// Always in the given (1-based) box.
    Fixed(usize),
}

/// `m` boxes searched by `k` searchers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub m: usize,
    pub k: usize,
    pub placement: Placement,
}

impl ProblemInstance {
    pub fn uniform(m: usize, k: usize) -> Self {
        Self { m, k, placement: Placement::Uniform }
    }

    pub fn fixed(m: usize, k: usize, x: usize) -> Self {
        Self { m, k, placement: Placement::Fixed(x) }
    }

    /// Returns the first violated field invariant, if any.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.m < 1 {
            return Err("m ≥ 1 violated".into());
        }
        if self.k < 1 {
            return Err("k ≥ 1 violated".into());
        }
        if let Placement::Fixed(x) = self.placement {
            if x < 1 {
                return Err("x ≥ 1 violated".into());
            }
            if x > self.m {
                return Err("x ≤ m violated".into());
            }
        }
        Ok(())
    }

    pub(crate) fn check(&self) -> Result<()> {
        self.validate().map_err(Error::InvalidInstance)
    }
}

/// Free-function form of [`ProblemInstance::validate`].
pub fn validate_instance(instance: &ProblemInstance) -> std::result::Result<(), String> {
    instance.validate()
}

/// The implemented search strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyId {
    /// Open boxes 1, 2, 3, ... in order.
    Trivial,
    /// Two uniform picks per phase from the unchecked boxes of `1..=i(k+1)`.
    StocAdversarial,
    /// One uniform pick per step from the unchecked boxes of `1..=tk`, then
    /// from all unchecked boxes.
    OptUniform,
    /// [`StrategyId::OptUniform`] without memory of opened boxes.
    Memoryless,
    /// Coordinated round-robin split: searcher `j` opens `j + 1 + (t-1)k`.
    PartitionCoordinated,
}

impl StrategyId {
    pub const ALL: [StrategyId; 5] = [
        StrategyId::Trivial,
        StrategyId::StocAdversarial,
        StrategyId::OptUniform,
        StrategyId::Memoryless,
        StrategyId::PartitionCoordinated,
    ];

    /// Strategies where all searchers run the same protocol independently.
    pub const NON_COORDINATING: [StrategyId; 4] = [
        StrategyId::Trivial,
        StrategyId::StocAdversarial,
        StrategyId::OptUniform,
        StrategyId::Memoryless,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            StrategyId::Trivial => "trivial",
            StrategyId::StocAdversarial => "stoc",
            StrategyId::OptUniform => "opt",
            StrategyId::Memoryless => "memoryless",
            StrategyId::PartitionCoordinated => "partition",
        }
    }

    pub fn is_coordinated(self) -> bool {
        matches!(self, StrategyId::PartitionCoordinated)
    }

    /// Whether a searcher remembers which boxes it has opened.
    pub fn has_memory(self) -> bool {
        !matches!(self, StrategyId::Memoryless)
    }

    /// Box count the strategy actually runs on. OptUniform and Memoryless
    /// round `m` up to a multiple of `k`.
    pub fn effective_m(self, m: usize, k: usize) -> usize {
        match self {
            StrategyId::OptUniform | StrategyId::Memoryless => m.div_ceil(k) * k,
            _ => m,
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" => Ok(StrategyId::Trivial),
            "stoc" | "stoc-adversarial" | "adversarial" => Ok(StrategyId::StocAdversarial),
            "opt" | "opt-uniform" | "optuniform" => Ok(StrategyId::OptUniform),
            "memoryless" | "mem" => Ok(StrategyId::Memoryless),
            "partition" | "partition-coordinated" => Ok(StrategyId::PartitionCoordinated),
            _ => Err(Error::UnknownStrategy(s.to_string())),
        }
    }
}
