//! Closed-form speed-up bounds and the Gamma-product inequality
//! `prod_{i=a}^{b} i/(i+phi) <= (a/b)^phi`.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::model::StrategyId;
use crate::report::SpeedupReport;
use crate::scalar::neumaier_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Best achievable speed-up in its setting (attained in the limit).
    ExactOptimum,
    /// Only a lower bound on the limiting speed-up of the strategy.
    AsymptoticLowerBound,
    /// The strategy's own speed-up, exactly.
    ExactValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub numer: u64,
    pub denom: u64,
    pub kind: BoundKind,
}

impl Bound {
    fn new(r: Ratio<u64>, kind: BoundKind) -> Self {
        Self { numer: *r.numer(), denom: *r.denom(), kind }
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.numer, self.denom)
    }

    /// `p/q`, or `p` when integral.
    pub fn fraction(&self) -> String {
        if self.denom == 1 {
            self.numer.to_string()
        } else {
            format!("{}/{}", self.numer, self.denom)
        }
    }
}

fn check_k(k: usize, min: usize) -> Result<u64> {
    if k < min {
        return Err(Error::Domain(format!("k ≥ {min} required (got {k})")));
    }
    Ok(k as u64)
}

/// Optimal non-coordinating speed-up for a uniformly placed treasure:
/// `k(k+1)/(3k-1)`.
pub fn uniform_bound(k: usize) -> Result<Bound> {
    let k = check_k(k, 1)?;
    Ok(Bound::new(Ratio::new(k * (k + 1), 3 * k - 1), BoundKind::ExactOptimum))
}

/// Optimal non-coordinating speed-up for an adversarially placed treasure:
/// `(k/4)(1 + 1/k)^2 = (k+1)^2 / 4k`.
pub fn adversarial_bound(k: usize) -> Result<Bound> {
    let k = check_k(k, 1)?;
    Ok(Bound::new(Ratio::new((k + 1) * (k + 1), 4 * k), BoundKind::ExactOptimum))
}

/// Limiting speed-up of the memoryless strategy is at least `k/3`.
pub fn memoryless_bound(k: usize) -> Result<Bound> {
    let k = check_k(k, 2)?;
    Ok(Bound::new(Ratio::new(k, 3), BoundKind::AsymptoticLowerBound))
}

/// `uniform_bound(k) / adversarial_bound(k)`.
pub fn gap_ratio(k: usize) -> Result<Ratio<u64>> {
    Ok(uniform_bound(k)?.ratio() / adversarial_bound(k)?.ratio())
}

/// Limit of [`gap_ratio`] as `k -> inf`.
pub fn asymptotic_gap() -> Ratio<u64> {
    Ratio::new(4, 3)
}

/// Ratio table `(k, gap_ratio(k))` for `k` in `ks`.
pub fn gap_table(ks: impl IntoIterator<Item = usize>) -> Result<Vec<(usize, Ratio<u64>)>> {
    ks.into_iter().map(|k| Ok((k, gap_ratio(k)?))).collect()
}

/// Closed-form reference value for a strategy at `k` searchers.
pub fn bound_for(strategy: StrategyId, k: usize) -> Result<Bound> {
    let bound = match strategy {
        StrategyId::OptUniform => uniform_bound(k),
        StrategyId::StocAdversarial => adversarial_bound(k),
        StrategyId::Memoryless => memoryless_bound(k),
        StrategyId::Trivial => check_k(k, 1).map(|_| Bound::new(Ratio::from_integer(1), BoundKind::ExactValue)),
        StrategyId::PartitionCoordinated => {
            check_k(k, 1).map(|k| Bound::new(Ratio::from_integer(k), BoundKind::ExactValue))
        }
    };
    bound.map_err(|_| Error::NoBound { strategy, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub bound: f64,
    pub kind: BoundKind,
    /// `speedup_inv_theta / bound`.
    pub ratio: f64,
}

/// Joins a report to its strategy's closed-form bound.
pub fn compare_to_bound(report: &SpeedupReport) -> Result<BoundComparison> {
    let b = bound_for(report.strategy, report.k)?;
    Ok(BoundComparison { bound: b.value(), kind: b.kind, ratio: report.speedup_inv_theta / b.value() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Ranges longer than this are evaluated in log space.
const DIRECT_PRODUCT_MAX_LEN: u64 = 1000;
const LOG_CHUNK: u64 = 1 << 14;

/// `prod_{i=a}^{b} i/(i+phi)` as a plain product.
pub fn gamma_product_direct(a: u64, b: u64, phi: f64) -> f64 {
    (a..=b).fold(1.0, |acc, i| acc * (i as f64 / (i as f64 + phi)))
}

/// `ln prod_{i=a}^{b} i/(i+phi) = -sum ln(1 + phi/i)`, summed over fixed
/// chunks and reduced in order so the result does not depend on threads.
pub fn gamma_product_ln(a: u64, b: u64, phi: f64, exec: Execution) -> f64 {
    let n_chunks = (b - a) / LOG_CHUNK + 1;
    let partials = exec::map_indexed(exec, n_chunks as usize, |c| {
        let lo = a + c as u64 * LOG_CHUNK;
        let hi = (lo + LOG_CHUNK - 1).min(b);
        neumaier_sum((lo..=hi).map(|i| -(phi / i as f64).ln_1p()))
    });
    neumaier_sum(partials)
}

pub fn gamma_product_check(a: u64, b: u64, phi: f64) -> Result<GammaCheck> {
    gamma_product_check_with(a, b, phi, Execution::default())
}

pub fn gamma_product_check_with(a: u64, b: u64, phi: f64, exec: Execution) -> Result<GammaCheck> {
    if a < 1 || b < a {
        return Err(Error::Domain(format!("need integers b ≥ a ≥ 1 (got a={a}, b={b})")));
    }
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::Domain(format!("need 0 < phi ≤ 1 (got {phi})")));
    }
    let lhs = if b - a <= DIRECT_PRODUCT_MAX_LEN {
        gamma_product_direct(a, b, phi)
    } else {
        gamma_product_ln(a, b, phi, exec).exp()
    };
    let rhs = (a as f64 / b as f64).powf(phi);
    Ok(GammaCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}
