//! The non-visit matrix `N(x, t)`: probability that a single searcher has
//! not opened box `x` by the end of step `t`.
//!
//! Strategy matrices are stored factored. Box `x` enters the picking range
//! at step `e(x)` and from then on survives step `t` with probability
//! `f_t = 1 - 1/pool_size(t)`, so `N(x, t) = prod_{s=e(x)}^{t} f_s`. Rows
//! are never expanded unless asked for, which keeps `m = 10^4` cheap.

use crate::error::{Error, Result};
use crate::schedule::{ScheduleKind, SelectionSchedule};
use crate::scalar::{NumericMode, Scalar};

/// Largest `m` accepted in exact-rational mode for randomized schedules.
pub const DEFAULT_RATIONAL_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixRepr<S> {
    Factored {
        /// `entry_step[x - 1] = e(x)`.
        entry_step: Vec<usize>,
        /// `factors[t - 1] = f_t` for `t` in `1..=horizon`.
        factors: Vec<S>,
    },
    Dense {
        /// `rows[x - 1][t]` for `t` in `0..=horizon`.
        rows: Vec<Vec<S>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonVisitMatrix<S> {
    pub m: usize,
    pub horizon: usize,
    pub repr: MatrixRepr<S>,
    /// Common geometric ratio: `N(x, t) = N(x, horizon) * r^(t - horizon)`
    /// for `t > horizon`. Without a tail, rows are constant past the horizon.
    pub tail_ratio: Option<S>,
    /// Set when entries are the joint non-visit probabilities of a
    /// coordinated team of this many searchers.
    pub team: Option<usize>,
}

/// Builds the matrix with the default rational size limit.
pub fn build_matrix<S: Scalar>(schedule: &SelectionSchedule) -> Result<NonVisitMatrix<S>> {
    build_matrix_with_limit(schedule, DEFAULT_RATIONAL_LIMIT)
}

pub fn build_matrix_with_limit<S: Scalar>(
    schedule: &SelectionSchedule,
    rational_limit: usize,
) -> Result<NonVisitMatrix<S>> {
    let m = schedule.m;
    // 0/1 schedules stay small in rationals at any size
    if S::MODE == NumericMode::ExactRational
        && schedule.kind == ScheduleKind::Randomized
        && m > rational_limit
    {
        return Err(Error::ExactLimitExceeded { m, limit: rational_limit });
    }
    let entry_step = (1..=m)
        .map(|x| {
            schedule
                .entry_step(x)
                .filter(|&e| e <= schedule.horizon())
                .ok_or_else(|| Error::Domain(format!("box {x} never enters the explicit schedule")))
        })
        .collect::<Result<Vec<_>>>()?;
    let factors = schedule
        .entries
        .iter()
        .map(|e| S::ratio(e.pool_size as u64 - 1, e.pool_size as u64))
        .collect();
    let tail_ratio = schedule
        .tail
        .map(|tail| S::ratio(tail.pool_size as u64 - 1, tail.pool_size as u64));
    Ok(NonVisitMatrix {
        m,
        horizon: schedule.horizon(),
        repr: MatrixRepr::Factored { entry_step, factors },
        tail_ratio,
        team: schedule.team_size(),
    })
}

impl<S: Scalar> NonVisitMatrix<S> {
    /// Hand-built matrix from explicit rows (`rows[x-1][t]`, equal lengths).
    pub fn from_rows(rows: Vec<Vec<S>>, tail_ratio: Option<S>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Domain("matrix needs at least one row".into()));
        }
        let width = rows[0].len();
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::Domain("rows must be non-empty and of equal length".into()));
        }
        Ok(Self { m, horizon: width - 1, repr: MatrixRepr::Dense { rows }, tail_ratio, team: None })
    }

    pub fn mode(&self) -> NumericMode {
        S::MODE
    }

    pub fn is_team(&self) -> bool {
        self.team.is_some()
    }

    /// `N(x, t)` for any `t >= 0`.
    pub fn entry(&self, x: usize, t: usize) -> S {
        assert!(x >= 1 && x <= self.m, "box {x} out of range");
        let base_t = t.min(self.horizon);
        let mut v = match &self.repr {
            MatrixRepr::Factored { entry_step, factors } => {
                let e = entry_step[x - 1];
                if base_t < e {
                    S::one()
                } else {
                    factors[e - 1..base_t].iter().fold(S::one(), |acc, f| acc * f.clone())
                }
            }
            MatrixRepr::Dense { rows } => rows[x - 1][base_t].clone(),
        };
        if t > self.horizon {
            if let Some(r) = &self.tail_ratio {
                v = v * r.powu((t - self.horizon) as u32);
            }
        }
        v
    }

    /// Row `x` for `t` in `0..=t_max`.
    pub fn row(&self, x: usize, t_max: usize) -> Vec<S> {
        match &self.repr {
            MatrixRepr::Factored { entry_step, factors } => {
                let e = entry_step[x - 1];
                let mut out = Vec::with_capacity(t_max + 1);
                let mut cur = S::one();
                for t in 0..=t_max {
                    if t >= e {
                        let f = if t <= self.horizon {
                            factors[t - 1].clone()
                        } else {
                            self.tail_ratio.clone().unwrap_or_else(S::one)
                        };
                        cur = cur * f;
                    }
                    out.push(cur.clone());
                }
                out
            }
            MatrixRepr::Dense { .. } => (0..=t_max).map(|t| self.entry(x, t)).collect(),
        }
    }

    /// Full table `x = 1..=m`, `t = 0..=t_max`.
    pub fn to_dense(&self, t_max: usize) -> Vec<Vec<S>> {
        (1..=self.m).map(|x| self.row(x, t_max)).collect()
    }

    /// Checks `N(x,0) = 1`, `0 <= N <= 1` and rows non-increasing.
    pub fn check_entries(&self) -> std::result::Result<(), String> {
        let zero = S::zero();
        let one = S::one();
        if let Some(r) = &self.tail_ratio {
            if *r < zero || *r >= one {
                return Err("tail ratio outside [0, 1)".into());
            }
        }
        match &self.repr {
            MatrixRepr::Factored { entry_step, factors } => {
                if entry_step.iter().any(|&e| e < 1) {
                    return Err("N(x,0) = 1 violated".into());
                }
                if let Some(t) = factors.iter().position(|f| *f < zero || *f > one) {
                    return Err(format!("factor at t={} outside [0, 1]", t + 1));
                }
            }
            MatrixRepr::Dense { rows } => {
                for (i, row) in rows.iter().enumerate() {
                    let x = i + 1;
                    if row[0] != one {
                        return Err(format!("N({x},0) = 1 violated"));
                    }
                    for t in 1..row.len() {
                        if row[t] < zero || row[t] > one {
                            return Err(format!("N({x},{t}) outside [0, 1]"));
                        }
                        if row[t] > row[t - 1] {
                            return Err(format!("row {x} increases at t={t}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Column sums `C(t) = sum_x (1 - N(x, t))` for `t` in `0..=t_max`.
    pub fn column_sums(&self, t_max: usize) -> Vec<S> {
        match &self.repr {
            MatrixRepr::Factored { entry_step, factors } => {
                // Q(t) = sum over entered rows of N(x,t) = f_t * (Q(t-1) + entering(t))
                let mut entering = vec![0usize; t_max + 2];
                for &e in entry_step {
                    if e <= t_max {
                        entering[e] += 1;
                    }
                }
                let mut out = Vec::with_capacity(t_max + 1);
                let mut q = S::zero();
                let mut entered = 0usize;
                out.push(S::zero());
                for t in 1..=t_max {
                    entered += entering[t];
                    let f = if t <= self.horizon {
                        factors[t - 1].clone()
                    } else {
                        self.tail_ratio.clone().unwrap_or_else(S::one)
                    };
                    q = f * (q + S::from_usize(entering[t]));
                    out.push(S::from_usize(entered) - q.clone());
                }
                out
            }
            MatrixRepr::Dense { .. } => (0..=t_max)
                .map(|t| S::ordered_sum((1..=self.m).map(|x| S::one() - self.entry(x, t))))
                .collect(),
        }
    }
}
