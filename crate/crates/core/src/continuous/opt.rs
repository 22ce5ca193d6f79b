//! The optimal continuous non-visit function `OPT_k` and the per-column
//! optimization it comes from.
//!
//! For each time `t < 1`, the column `x -> OPT_k(x, t)` minimizes
//! `int_0^1 f(x)^k / x dx` subject to `int_0^1 (1 - f) <= t`, and has the
//! form `min(1, alpha * x^(1/(k-1)))`.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use super::quadrature::{self, Quadrature};
use crate::error::{Error, Result};

fn check_k(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("k ≥ 2 required for OPT_k (got {k})")));
    }
    Ok(k as f64)
}

/// `OPT_k(x, t)`. Branch boundaries take the common (continuous) limit.
pub fn opt_eval(k: usize, x: f64, t: f64) -> Result<f64> {
    let kf = check_k(k)?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("x must lie in (0, 1] (got {x})")));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("t must be ≥ 0 (got {t})")));
    }
    Ok(opt_value(kf, x, t))
}

/// Unchecked evaluation for hot loops.
pub(crate) fn opt_value(k: f64, x: f64, t: f64) -> f64 {
    let p = 1.0 / (k - 1.0);
    if t <= x / k {
        1.0
    } else if t <= 1.0 / k {
        (x / (k * t)).powf(p)
    } else if t < 1.0 {
        k / (k - 1.0) * (1.0 - t) * x.powf(p)
    } else {
        0.0
    }
}

/// The optimal column at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnSolution {
    pub k: usize,
    pub t: f64,
    /// Scale of the column; infinite at `t = 0` (column identically 1).
    pub alpha: f64,
    /// Smallest `x` where the column reaches 1 (1 when it never does).
    pub gamma: f64,
}

impl ColumnSolution {
    /// `min(1, alpha * x^(1/(k-1)))`.
    pub fn value(&self, x: f64) -> f64 {
        if self.alpha.is_infinite() {
            return 1.0;
        }
        (self.alpha * x.powf(1.0 / (self.k as f64 - 1.0))).min(1.0)
    }
}

pub fn column_optimizer(k: usize, t: f64) -> Result<ColumnSolution> {
    let kf = check_k(k)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("t must be ≥ 0 (got {t})")));
    }
    let (alpha, gamma) = if t >= 1.0 {
        (0.0, 1.0)
    } else if t == 0.0 {
        (f64::INFINITY, 0.0)
    } else if t < 1.0 / kf {
        let gamma = kf * t;
        (gamma.powf(-1.0 / (kf - 1.0)), gamma)
    } else {
        (kf / (kf - 1.0) * (1.0 - t), 1.0)
    };
    Ok(ColumnSolution { k, t, alpha, gamma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    ClosedFormRegions,
    Quadrature,
}

/// The three pieces of `theta_OPT(k)` in exact arithmetic:
/// below the curve `x = kt`, above it for `t < 1/k`, and `1/k <= t < 1`.
pub fn theta_regions_exact(k: usize) -> Result<[Ratio<u64>; 3]> {
    check_k(k)?;
    let k = k as u64;
    Ok([
        Ratio::new(k - 1, k * k),
        Ratio::new(1, k),
        Ratio::new((k - 1) * (k - 1), k * k * (k + 1)),
    ])
}

/// `(3k - 1) / (k(k + 1))`.
pub fn theta_opt_exact(k: usize) -> Result<Ratio<u64>> {
    check_k(k)?;
    let k = k as u64;
    Ok(Ratio::new(3 * k - 1, k * (k + 1)))
}

/// `int_0^inf OPT_k(x, t)^k dt / x`, with the time integral done per branch:
/// `1/k + (k-1)/k (1 - x^p) + (k-1)/(k(k+1)) x^p`, `p = 1/(k-1)`.
pub fn time_integral_over_x(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let xp = x.powf(1.0 / (kf - 1.0));
    1.0 / kf + (kf - 1.0) / kf * (1.0 - xp) + (kf - 1.0) / (kf * (kf + 1.0)) * xp
}

pub const QUADRATURE_CUTOFF: f64 = 1e-6;
const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaIntegral {
    pub k: usize,
    pub method: ThetaMethod,
    pub value: f64,
    /// Region values (closed form only).
    pub regions: Option<[f64; 3]>,
    /// Combined quadrature and cutoff error bound (zero for the closed form).
    pub error_estimate: f64,
}

/// `theta_OPT(k) = int_0^1 int_0^inf OPT_k(x,t)^k / x dt dx`.
///
/// The quadrature route integrates `x` over `[1e-6, 1]` and adds
/// `1e-6 * g(0+) = 1e-6`; the discarded piece differs from that by at most
/// `1e-6 * sup |g - g(0+)| <= 1e-6`.
pub fn theta_integral(k: usize, method: ThetaMethod) -> Result<ThetaIntegral> {
    check_k(k)?;
    match method {
        ThetaMethod::ClosedFormRegions => {
            let exact = theta_regions_exact(k)?;
            let to_f64 = |r: Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
            // summed exactly, rounded once
            let total: Ratio<u64> = exact.iter().sum();
            let regions = exact.map(to_f64);
            Ok(ThetaIntegral {
                k,
                method,
                value: to_f64(total),
                regions: Some(regions),
                error_estimate: 0.0,
            })
        }
        ThetaMethod::Quadrature => {
            let Quadrature { value, error_estimate, .. } = quadrature::integrate(
                |x| time_integral_over_x(k, x),
                QUADRATURE_CUTOFF,
                1.0,
                &[],
                QUADRATURE_TOL,
                QUADRATURE_MAX_INTERVALS,
            )?;
            // g(0+) = 1/k + (k-1)/k = 1
            let remainder = QUADRATURE_CUTOFF;
            Ok(ThetaIntegral {
                k,
                method,
                value: value + remainder,
                regions: None,
                error_estimate: error_estimate + QUADRATURE_CUTOFF,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOutcome {
    pub base: f64,
    pub perturbed: f64,
    /// False when the move would leave `[0, 1]`; nothing was evaluated.
    pub applied: bool,
}

impl PerturbationOutcome {
    pub fn not_improved(&self, tol: f64) -> bool {
        !self.applied || self.perturbed >= self.base - tol
    }
}

/// Moves `delta` of column mass from `x_from` to `x_to` in the OPT_k column
/// at `t` (midpoint rule with `n` cells), keeping the column integral fixed,
/// and reports the column objective `sum h f^k / x` before and after.
pub fn perturbation_check(
    k: usize,
    t: f64,
    x_from: f64,
    x_to: f64,
    delta: f64,
    n: usize,
) -> Result<PerturbationOutcome> {
    let kf = check_k(k)?;
    let h = 1.0 / n as f64;
    let cell = |x: f64| ((x / h) as usize).min(n - 1);
    let (i_from, i_to) = (cell(x_from), cell(x_to));
    let mut column: Vec<f64> = (0..n).map(|i| opt_value(kf, (i as f64 + 0.5) * h, t)).collect();
    let objective = |col: &[f64]| -> f64 {
        crate::scalar::neumaier_sum(
            col.iter().enumerate().map(|(i, f)| h * f.powi(k as i32) / ((i as f64 + 0.5) * h)),
        )
    };
    let base = objective(&column);
    // mass leaves x_from (f rises there) and lands on x_to (f drops)
    let up = column[i_from] + delta;
    let down = column[i_to] - delta;
    if i_from == i_to || !(0.0..=1.0).contains(&up) || !(0.0..=1.0).contains(&down) {
        return Ok(PerturbationOutcome { base, perturbed: base, applied: false });
    }
    column[i_from] = up;
    column[i_to] = down;
    Ok(PerturbationOutcome { base, perturbed: objective(&column), applied: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn opt_eval_examples() {
        assert_eq!(opt_eval(2, 0.5, 0.1).unwrap(), 1.0);
        assert!((opt_eval(2, 0.5, 0.3).unwrap() - 0.5 / 0.6).abs() < 1e-15);
        assert!((opt_eval(2, 0.5, 0.75).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(opt_eval(2, 0.5, 1.5).unwrap(), 0.0);
        assert!(opt_eval(2, 0.0, 0.5).is_err());
        assert!(opt_eval(1, 0.5, 0.5).is_err());
    }

    #[test]
    fn opt_is_continuous_across_branches() {
        for k in 2..=8 {
            let kf = k as f64;
            for &x in &[1e-3, 0.1, 0.37, 0.8, 1.0] {
                for &b in &[x / kf, 1.0 / kf, 1.0] {
                    if b == 0.0 {
                        continue;
                    }
                    let l = opt_value(kf, x, b * (1.0 - 1e-14));
                    let r = opt_value(kf, x, b * (1.0 + 1e-14));
                    assert!((l - r).abs() <= 1e-12, "k={k} x={x} boundary {b}: {l} vs {r}");
                }
            }
        }
    }

    #[test]
    fn column_optimizer_examples() {
        let c = column_optimizer(2, 0.25).unwrap();
        assert_eq!((c.gamma, c.alpha), (0.5, 2.0));
        let c = column_optimizer(2, 0.5).unwrap();
        assert_eq!((c.gamma, c.alpha), (1.0, 1.0));
        let c = column_optimizer(3, 1.0 / 6.0).unwrap();
        assert!((c.gamma - 0.5).abs() < 1e-15);
        assert!((c.alpha - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(column_optimizer(4, 1.2).unwrap().alpha, 0.0);
        assert_eq!(column_optimizer(4, 0.0).unwrap().value(0.3), 1.0);
    }

    #[test]
    fn optimal_columns_exhaust_the_budget() {
        // oracle: numerical quadrature of 1 - f with a breakpoint at gamma
        for k in 2..=7 {
            for &t in &[0.01, 0.1, 1.0 / 6.0, 0.3, 0.5, 0.9] {
                let c = column_optimizer(k, t).unwrap();
                let q = quadrature::integrate(|x| 1.0 - c.value(x), 0.0, 1.0, &[c.gamma], 1e-12, 500).unwrap();
                assert!((q.value - t).abs() < 1e-9, "k={k} t={t}: {}", q.value);
                if c.gamma < 1.0 {
                    let p = 1.0 / (k as f64 - 1.0);
                    assert!((c.alpha * c.gamma.powf(p) - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let t2 = theta_integral(2, ThetaMethod::ClosedFormRegions).unwrap();
        assert_eq!(t2.regions.unwrap(), [0.25, 0.5, 1.0 / 12.0]);
        assert_eq!(theta_opt_exact(2).unwrap(), Ratio::new(5, 6));
        assert_eq!(theta_opt_exact(3).unwrap(), Ratio::new(2, 3));
        let sum: Ratio<u64> = theta_regions_exact(3).unwrap().iter().sum();
        assert_eq!(sum, Ratio::new(2, 3));
        for k in 2..=20u64 {
            let v = theta_integral(k as usize, ThetaMethod::ClosedFormRegions).unwrap().value;
            assert_eq!(v, (3 * k - 1) as f64 / (k * (k + 1)) as f64, "k={k}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for k in 2..=10 {
            let q = theta_integral(k, ThetaMethod::Quadrature).unwrap();
            let c = theta_opt_exact(k).unwrap();
            let c = *c.numer() as f64 / *c.denom() as f64;
            assert!((q.value - c).abs() < 1e-5, "k={k}: {} vs {c}", q.value);
            assert!(q.error_estimate < 1e-5);
        }
    }

    #[test]
    fn inner_time_integral_matches_numeric_route() {
        // independent route: integrate OPT_k^k over t numerically per x
        for k in [2usize, 3, 5] {
            let kf = k as f64;
            for &x in &[1e-4, 0.05, 0.5, 1.0] {
                let q = quadrature::integrate(
                    |t| opt_value(kf, x, t).powi(k as i32),
                    0.0,
                    1.5,
                    &[x / kf, 1.0 / kf, 1.0],
                    1e-13,
                    4000,
                )
                .unwrap();
                assert!((q.value / x - time_integral_over_x(k, x)).abs() < 1e-8, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn theta_rejects_k1() {
        assert!(theta_integral(1, ThetaMethod::ClosedFormRegions).is_err());
        assert!(theta_integral(1, ThetaMethod::Quadrature).is_err());
    }

    proptest! {
        #[test]
        fn column_solution_reproduces_opt(k in 2usize..9, x in 1e-6f64..=1.0, t in 1e-9f64..0.999_999) {
            let c = column_optimizer(k, t).unwrap();
            prop_assert!((c.value(x) - opt_eval(k, x, t).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn moving_column_mass_never_helps(
            k in 2usize..6,
            t in 0.02f64..0.98,
            x_from in 0.0f64..1.0,
            x_to in 0.0f64..1.0,
            delta in 1e-4f64..0.05,
        ) {
            let out = perturbation_check(k, t, x_from, x_to, delta, 2000).unwrap();
            prop_assert!(out.not_improved(1e-12), "{out:?}");
        }
    }
}
