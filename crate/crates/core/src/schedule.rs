//! Per-step description of the pool a searcher picks from.
//!
//! Every strategy in the catalog picks, at step `t`, uniformly from a pool
//! drawn out of the prefix `1..=range_end(t)`. Unvisited boxes inside the
//! prefix are exchangeable, so a specific unvisited box is picked with
//! probability exactly `1 / pool_size(t)`. That is all the exact engine needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProblemInstance, StrategyId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    /// Boxes in range the searcher has not opened yet (picks without replacement).
    UncheckedInRange,
    /// Every box in range (picks with replacement).
    AllInRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub range_end: usize,
    pub pool_kind: PoolKind,
    pub pool_size: usize,
}

/// Constant per-step pool used for every step after the explicit entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTail {
    pub range_end: usize,
    pub pool_size: usize,
}

impl ScheduleTail {
    /// Per-step probability that a given box in range is picked.
    pub fn pick_probability(&self) -> f64 {
        1.0 / self.pool_size as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Independent randomized searchers.
    Randomized,
    /// Every pool has a single box; all searchers behave identically.
    Deterministic,
    /// Joint schedule of a coordinated team: at step `t` every box up to
    /// `range_end(t)` has been opened by someone.
    Coordinated { team: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSchedule {
    pub strategy: StrategyId,
    pub k: usize,
    /// Effective box count (after any rounding).
    pub m: usize,
    pub requested_m: usize,
    pub kind: ScheduleKind,
    /// `entries[t - 1]` describes step `t`.
    pub entries: Vec<ScheduleEntry>,
    pub tail: Option<ScheduleTail>,
}

impl SelectionSchedule {
    pub fn horizon(&self) -> usize {
        self.entries.len()
    }

    /// Pool description at step `t >= 1`, falling back to the tail.
    pub fn step(&self, t: usize) -> Option<ScheduleEntry> {
        debug_assert!(t >= 1);
        if let Some(e) = self.entries.get(t - 1) {
            return Some(*e);
        }
        self.tail.map(|tail| ScheduleEntry {
            range_end: tail.range_end,
            pool_kind: PoolKind::AllInRange,
            pool_size: tail.pool_size,
        })
    }

    /// Range end at step `t`, or `None` once a with-memory searcher has
    /// opened everything.
    pub fn range_end(&self, t: usize) -> Option<usize> {
        self.step(t).map(|e| e.range_end)
    }

    /// First step at which box `x` is inside the picking range.
    pub fn entry_step(&self, x: usize) -> Option<usize> {
        let idx = self.entries.partition_point(|e| e.range_end < x);
        if idx < self.entries.len() {
            Some(idx + 1)
        } else {
            self.tail
                .filter(|tail| tail.range_end >= x)
                .map(|_| self.entries.len() + 1)
        }
    }

    pub fn team_size(&self) -> Option<usize> {
        match self.kind {
            ScheduleKind::Coordinated { team } => Some(team),
            _ => None,
        }
    }

    /// Checks the structural invariants; returns the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut prev_end = 0;
        for (i, e) in self.entries.iter().enumerate() {
            let t = i + 1;
            if e.pool_size < 1 {
                return Err(format!("pool_size ≥ 1 violated at t={t}"));
            }
            if e.range_end < prev_end {
                return Err(format!("range_end non-decreasing violated at t={t}"));
            }
            if e.range_end > self.m {
                return Err(format!("range_end ≤ m violated at t={t}"));
            }
            if e.pool_kind == PoolKind::UncheckedInRange
                && self.team_size().is_none()
                && e.pool_size != e.range_end.saturating_sub(t - 1)
            {
                return Err(format!("pool_size = range_end − (t−1) violated at t={t}"));
            }
            if e.pool_kind == PoolKind::AllInRange && e.pool_size != e.range_end {
                return Err(format!("pool_size = range_end violated at t={t}"));
            }
            prev_end = e.range_end;
        }
        if let Some(tail) = self.tail {
            if tail.pool_size < 1 || tail.range_end < prev_end || tail.range_end > self.m {
                return Err("tail descriptor inconsistent with explicit entries".into());
            }
        }
        Ok(())
    }
}

/// Builds the per-step pool description of `strategy` on `instance`.
pub fn build_schedule(strategy: StrategyId, instance: &ProblemInstance) -> Result<SelectionSchedule> {
    instance.check()?;
    let k = instance.k;
    let requested_m = instance.m;
    let m = strategy.effective_m(requested_m, k);

    let unchecked = |t: usize, range_end: usize| ScheduleEntry {
        range_end,
        pool_kind: PoolKind::UncheckedInRange,
        pool_size: range_end - (t - 1),
    };

    let (kind, entries, tail) = match strategy {
        StrategyId::Trivial => {
            let entries = (1..=m).map(|t| unchecked(t, t)).collect();
            (ScheduleKind::Deterministic, entries, None)
        }
        StrategyId::OptUniform => {
            // for-phase over growing prefixes, then all unchecked boxes
            let entries = (1..=m)
                .map(|t| unchecked(t, (t * k).min(m)))
                .collect();
            let kind = if k == 1 { ScheduleKind::Deterministic } else { ScheduleKind::Randomized };
            (kind, entries, None)
        }
        StrategyId::Memoryless => {
            let entries = (1..=m / k)
                .map(|t| ScheduleEntry {
                    range_end: t * k,
                    pool_kind: PoolKind::AllInRange,
                    pool_size: t * k,
                })
                .collect();
            let tail = ScheduleTail { range_end: m, pool_size: m };
            (ScheduleKind::Randomized, entries, Some(tail))
        }
        StrategyId::StocAdversarial => {
            // phase i = ceil(t/2) covers 1..=i(k+1), capped at m
            let entries = (1..=m)
                .map(|t| unchecked(t, (t.div_ceil(2) * (k + 1)).min(m)))
                .collect();
            (ScheduleKind::Randomized, entries, None)
        }
        StrategyId::PartitionCoordinated => {
            let entries = (1..=m.div_ceil(k))
                .map(|t| ScheduleEntry {
                    range_end: (t * k).min(m),
                    pool_kind: PoolKind::UncheckedInRange,
                    pool_size: 1,
                })
                .collect();
            (ScheduleKind::Coordinated { team: k }, entries, None)
        }
    };

    let schedule = SelectionSchedule { strategy, k, m, requested_m, kind, entries, tail };
    debug_assert_eq!(schedule.validate(), Ok(()));
    Ok(schedule)
}

/// Box opened at step `t` by searcher `j` (0-based) of a round-robin team.
pub fn partition_box(j: usize, t: usize, k: usize) -> usize {
    j + 1 + (t - 1) * k
}

pub(crate) fn ensure_box(x: usize, m: usize) -> Result<()> {
    if x < 1 || x > m {
        return Err(Error::BoxOutOfRange { x, m });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(s: StrategyId, m: usize, k: usize) -> SelectionSchedule {
        build_schedule(s, &ProblemInstance::uniform(m, k)).unwrap()
    }

    #[test]
    fn opt_uniform_k2_m6_pools() {
        let s = sched(StrategyId::OptUniform, 6, 2);
        let pools: Vec<_> = s.entries.iter().map(|e| (e.range_end, e.pool_size)).collect();
        assert_eq!(pools, vec![(2, 2), (4, 3), (6, 4), (6, 3), (6, 2), (6, 1)]);
        assert!(s.tail.is_none());
    }

    #[test]
    fn trivial_opens_box_t_at_step_t() {
        let s = sched(StrategyId::Trivial, 5, 1);
        assert_eq!(s.kind, ScheduleKind::Deterministic);
        for x in 1..=5 {
            assert_eq!(s.entry_step(x), Some(x));
            assert_eq!(s.entries[x - 1].pool_size, 1);
        }
    }

    #[test]
    fn memoryless_k2_m6_has_geometric_tail() {
        let s = sched(StrategyId::Memoryless, 6, 2);
        let pools: Vec<_> = s.entries.iter().map(|e| e.pool_size).collect();
        assert_eq!(pools, vec![2, 4, 6]);
        assert_eq!(s.tail, Some(ScheduleTail { range_end: 6, pool_size: 6 }));
        assert_eq!(s.step(10).unwrap().pool_size, 6);
        assert!((s.tail.unwrap().pick_probability() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn stoc_phases_two_picks_each() {
        let s = sched(StrategyId::StocAdversarial, 20, 2);
        // phase i: range 3i, pools 3i - 2(i-1) and one less
        assert_eq!(s.entries[0], ScheduleEntry { range_end: 3, pool_kind: PoolKind::UncheckedInRange, pool_size: 3 });
        assert_eq!(s.entries[1].pool_size, 2);
        assert_eq!(s.entries[2].range_end, 6);
        assert_eq!(s.entries[2].pool_size, 4);
        assert_eq!(s.entries[3].pool_size, 3);
        assert_eq!(s.entries.last().unwrap().pool_size, 1);
        assert_eq!(s.horizon(), 20);
    }

    #[test]
    fn rounding_reports_effective_m() {
        let s = sched(StrategyId::OptUniform, 7, 3);
        assert_eq!((s.m, s.requested_m), (9, 7));
        assert_eq!(s.horizon(), 9);
    }

    #[test]
    fn partition_entry_step_is_ceil() {
        let s = sched(StrategyId::PartitionCoordinated, 10, 3);
        for x in 1..=10 {
            assert_eq!(s.entry_step(x), Some(x.div_ceil(3)));
        }
        assert_eq!(partition_box(1, 2, 3), 5);
    }

    #[test]
    fn every_schedule_is_valid_and_terminates() {
        for strat in StrategyId::ALL {
            for k in 1..=4 {
                for m in [1, 2, 5, 12, 33] {
                    let s = sched(strat, m, k);
                    assert_eq!(s.validate(), Ok(()), "{strat} k={k} m={m}");
                    for x in 1..=s.m {
                        assert!(s.entry_step(x).is_some());
                    }
                    if strat.has_memory() && !strat.is_coordinated() {
                        // one new box per step, all m opened at the last step
                        assert_eq!(s.horizon(), s.m);
                        assert_eq!(s.entries.last().unwrap().pool_size, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_boxes_rejected() {
        assert!(build_schedule(StrategyId::Trivial, &ProblemInstance::uniform(0, 1)).is_err());
    }
}
