use crate::error::{Error, Result};
use crate::exact::matrix::{MatrixRepr, NonVisitMatrix};
use crate::model::{Placement, StrategyId};
use crate::report::{ExactFractions, PerBox, ReportMode, SpeedupReport};
use crate::scalar::{NumericMode, Scalar};
use crate::schedule::ensure_box;

/// Exact-engine result before it is flattened into a [`SpeedupReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTheta<S> {
    pub k: usize,
    pub m: usize,
    pub placement: Placement,
    pub theta: S,
    /// Mean over the placement of `x / E[T_x]`.
    pub speedup_mean: S,
    /// `E[T_x]` for `x = 1..=m`.
    pub expected_times: Vec<S>,
}

fn effective_exponent<S>(matrix: &NonVisitMatrix<S>, k: usize) -> Result<u32> {
    if k < 1 {
        return Err(Error::InvalidInstance("k ≥ 1 violated".into()));
    }
    match matrix.team {
        Some(team) if team != k => Err(Error::TeamSizeMismatch { team, k }),
        Some(_) => Ok(1),
        None => Ok(k as u32),
    }
}

/// `rho / (1 - rho)` with `rho = r^k`: the closed-form tail sum factor.
fn tail_factor<S: Scalar>(matrix: &NonVisitMatrix<S>, power: u32) -> S {
    match &matrix.tail_ratio {
        Some(r) => {
            let rho = r.powu(power);
            rho.clone() / (S::one() - rho)
        }
        None => S::zero(),
    }
}

/// `E[T_x] = sum_{t >= 0} N(x, t)^k`, tails summed in closed form.
pub fn expected_visit_time<S: Scalar>(matrix: &NonVisitMatrix<S>, x: usize, k: usize) -> Result<S> {
    ensure_box(x, matrix.m)?;
    let power = effective_exponent(matrix, k)?;
    let h = matrix.horizon;
    let (head, last) = match &matrix.repr {
        MatrixRepr::Factored { entry_step, factors } => {
            let e = entry_step[x - 1];
            let mut sum = S::from_usize(e);
            let mut p = S::one();
            for f in &factors[e - 1..] {
                p = p * f.powu(power);
                sum = sum + p.clone();
            }
            (sum, if e <= h { p } else { S::one() })
        }
        MatrixRepr::Dense { rows } => {
            let row = &rows[x - 1];
            let sum = S::ordered_sum(row.iter().map(|v| v.powu(power)));
            (sum, row[h].powu(power))
        }
    };
    Ok(head + last * tail_factor(matrix, power))
}

/// Expected find times for every box, via a suffix recurrence over steps
/// for factored matrices (`O(m + horizon)` total).
pub fn expected_times<S: Scalar>(matrix: &NonVisitMatrix<S>, k: usize) -> Result<Vec<S>> {
    let power = effective_exponent(matrix, k)?;
    match &matrix.repr {
        MatrixRepr::Factored { entry_step, factors } => {
            // suffix[t] = sum_{u >= t} prod_{s=t}^{u} g_s,  suffix[h + 1] = tail factor
            let h = matrix.horizon;
            let mut suffix = vec![S::zero(); h + 2];
            suffix[h + 1] = tail_factor(matrix, power);
            for t in (1..=h).rev() {
                let g = factors[t - 1].powu(power);
                suffix[t] = g * (S::one() + suffix[t + 1].clone());
            }
            Ok(entry_step
                .iter()
                .map(|&e| S::from_usize(e) + suffix[e].clone())
                .collect())
        }
        MatrixRepr::Dense { .. } => (1..=matrix.m).map(|x| expected_visit_time(matrix, x, k)).collect(),
    }
}

/// `theta = E_x[E[T_x] / x]` under `placement`, plus the mean per-box speed-up.
pub fn theta<S: Scalar>(matrix: &NonVisitMatrix<S>, k: usize, placement: Placement) -> Result<ExactTheta<S>> {
    let times = expected_times(matrix, k)?;
    let m = matrix.m;
    let (theta, speedup_mean) = match placement {
        Placement::Uniform => {
            let inv_m = S::ratio(1, m as u64);
            let theta = S::ordered_sum(
                times.iter().enumerate().map(|(i, e)| e.clone() / S::from_usize(i + 1)),
            ) * inv_m.clone();
            let mean = S::ordered_sum(
                times.iter().enumerate().map(|(i, e)| S::from_usize(i + 1) / e.clone()),
            ) * inv_m;
            (theta, mean)
        }
        Placement::Fixed(x) => {
            ensure_box(x, m)?;
            let e = times[x - 1].clone();
            (e.clone() / S::from_usize(x), S::from_usize(x) / e)
        }
    };
    Ok(ExactTheta { k, m, placement, theta, speedup_mean, expected_times: times })
}

impl<S: Scalar> ExactTheta<S> {
    pub fn speedup_inv_theta(&self) -> S {
        S::one() / self.theta.clone()
    }

    pub fn to_report(&self, strategy: StrategyId, per_x: bool) -> SpeedupReport {
        let theta = self.theta.to_f64();
        let exact = (S::MODE == NumericMode::ExactRational).then(|| ExactFractions {
            theta: self.theta.render(),
            speedup_inv_theta: self.speedup_inv_theta().render(),
            speedup_mean: self.speedup_mean.render(),
        });
        let per_x = per_x.then(|| {
            self.expected_times
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let expected_time = e.to_f64();
                    PerBox { x: i + 1, expected_time, theta_x: expected_time / (i + 1) as f64 }
                })
                .collect()
        });
        SpeedupReport {
            strategy,
            k: self.k,
            m: self.m,
            mode: ReportMode::Exact,
            theta,
            speedup_inv_theta: 1.0 / theta,
            speedup_mean: Some(self.speedup_mean.to_f64()),
            per_x,
            stderr: None,
            trials: None,
            seed: None,
            not_found: None,
            exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnStatus<S> {
    Ok,
    Violation { t: usize, column_sum: S },
}

impl<S> ColumnStatus<S> {
    pub fn is_ok(&self) -> bool {
        matches!(self, ColumnStatus::Ok)
    }
}

/// Verifies `C(t) <= t` (or `<= team * t` for a coordinated team) on every
/// explicit step and, with a tail, on every step up to `m` (beyond that
/// `C(t) <= m <= t` holds trivially). Floats get `1e-12 * m` slack.
pub fn column_requirement_check<S: Scalar>(matrix: &NonVisitMatrix<S>) -> ColumnStatus<S> {
    let t_max = if matrix.tail_ratio.is_some() {
        matrix.horizon.max(matrix.m)
    } else {
        matrix.horizon
    };
    let per_step = matrix.team.unwrap_or(1);
    let slack = match S::MODE {
        NumericMode::ExactRational => S::zero(),
        NumericMode::Float64 => S::from_usize(matrix.m) * S::ratio(1, 1_000_000_000_000),
    };
    for (t, c) in matrix.column_sums(t_max).into_iter().enumerate() {
        if c > S::from_usize(per_step * t) + slack.clone() {
            return ColumnStatus::Violation { t, column_sum: c };
        }
    }
    ColumnStatus::Ok
}
