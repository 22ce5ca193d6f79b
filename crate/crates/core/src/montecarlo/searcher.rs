use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::schedule::{partition_box, PoolKind, ScheduleKind, SelectionSchedule};

/// One searcher executing a schedule, step by step.
///
/// With-memory searchers keep their unchecked-in-range boxes in a vector and
/// pick by swap-remove, so a box is never opened twice.
#[derive(Debug, Clone)]
pub struct Searcher<'a> {
    schedule: &'a SelectionSchedule,
    index: usize,
    pool: Vec<usize>,
    filled: usize,
    rng: ChaCha8Rng,
}

impl<'a> Searcher<'a> {
    pub fn new(schedule: &'a SelectionSchedule, index: usize, rng: ChaCha8Rng) -> Self {
        Self::with_pool(schedule, index, rng, Vec::new())
    }

    /// Reuses `pool` as scratch space.
    pub fn with_pool(schedule: &'a SelectionSchedule, index: usize, rng: ChaCha8Rng, mut pool: Vec<usize>) -> Self {
        pool.clear();
        Self { schedule, index, pool, filled: 0, rng }
    }

    pub fn into_pool(self) -> Vec<usize> {
        self.pool
    }

    /// Box opened at step `t`; steps must be visited in order `1, 2, ...`.
    /// `None` once the searcher has nothing left to open.
    pub fn open(&mut self, t: usize) -> Option<usize> {
        let s = self.schedule;
        match s.kind {
            ScheduleKind::Coordinated { team } => {
                let b = partition_box(self.index, t, team);
                (b <= s.m).then_some(b)
            }
            ScheduleKind::Deterministic => s.entries.get(t - 1).map(|e| e.range_end),
            ScheduleKind::Randomized => {
                let e = s.step(t)?;
                match e.pool_kind {
                    PoolKind::AllInRange => Some(self.rng.random_range(1..=e.range_end)),
                    PoolKind::UncheckedInRange => {
                        self.pool.extend(self.filled + 1..=e.range_end);
                        self.filled = self.filled.max(e.range_end);
                        if self.pool.is_empty() {
                            return None;
                        }
                        debug_assert_eq!(self.pool.len(), e.pool_size);
                        let i = self.rng.random_range(0..self.pool.len());
                        Some(self.pool.swap_remove(i))
                    }
                }
            }
        }
    }

    /// First step `<= limit` at which box `x` is opened.
    pub fn hit_time(&mut self, x: usize, limit: u64) -> Option<u64> {
        let s = self.schedule;
        match s.kind {
            // closed forms of the two deterministic samplers
            ScheduleKind::Coordinated { team } => {
                let t = ((x - 1) % team == self.index).then_some(((x - 1) / team + 1) as u64)?;
                (t <= limit).then_some(t)
            }
            ScheduleKind::Deterministic => {
                let t = s.entry_step(x)? as u64;
                (t <= limit).then_some(t)
            }
            ScheduleKind::Randomized => {
                let mut t = 1u64;
                while t <= limit {
                    match self.open(t as usize) {
                        Some(b) if b == x => return Some(t),
                        Some(_) => t += 1,
                        None => return None,
                    }
                }
                None
            }
        }
    }
}
