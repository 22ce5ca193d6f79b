//! Seeded simulation of `k` independent searchers.
//!
//! Each trial places the treasure, then runs every searcher against its own
//! substream (see [`rng`]). Searchers share nothing, so the step-synchronous
//! find time is the minimum of the individual hit times; later searchers are
//! only simulated up to the best time found so far.

pub mod rng;
mod searcher;

pub use rng::{splitmix64, Substreams, RNG_SCHEME};
pub use searcher::Searcher;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::model::{Placement, ProblemInstance, StrategyId};
use crate::report::{PerBox, ReportMode, SpeedupReport};
use crate::schedule::{build_schedule, ensure_box, SelectionSchedule};

/// Trials per work unit. Fixed so that reductions do not depend on the
/// execution mode.
pub const BLOCK_TRIALS: u64 = 4096;

/// Searcher `searcher` opens boxes at steps `1..=step` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crash {
    pub searcher: usize,
    pub step: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub instance: ProblemInstance,
    pub strategy: StrategyId,
    pub trials: u64,
    pub seed: u64,
    pub crash_plan: Vec<Crash>,
    /// Defaults to `64 k m`.
    pub max_steps: Option<u64>,
    /// Collect per-box means (and `speedup_mean`) when trials allow.
    pub per_x: bool,
}

impl SimConfig {
    pub fn new(strategy: StrategyId, instance: ProblemInstance, trials: u64, seed: u64) -> Self {
        Self { instance, strategy, trials, seed, crash_plan: Vec::new(), max_steps: None, per_x: false }
    }

    pub fn with_crash(mut self, searcher: usize, step: u64) -> Self {
        self.crash_plan.push(Crash { searcher, step });
        self
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps.unwrap_or(64 * self.instance.k as u64 * self.effective_m() as u64)
    }

    pub fn effective_m(&self) -> usize {
        self.strategy.effective_m(self.instance.m, self.instance.k)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        self.instance.validate()?;
        if self.trials < 1 {
            return Err("trials ≥ 1 violated".into());
        }
        if let Some(c) = self.crash_plan.iter().find(|c| c.searcher >= self.instance.k) {
            return Err(format!("crash index < k violated (searcher {})", c.searcher));
        }
        if self.max_steps() < self.instance.m as u64 {
            return Err("max_steps ≥ m violated".into());
        }
        Ok(())
    }

    /// Last step each searcher opens a box at.
    fn crash_steps(&self) -> Vec<u64> {
        let mut steps = vec![u64::MAX; self.instance.k];
        for c in &self.crash_plan {
            steps[c.searcher] = steps[c.searcher].min(c.step);
        }
        steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub treasure_x: usize,
    /// `None` when nobody opened the treasure within `max_steps`.
    pub find_time: Option<u64>,
    /// Lowest index among the searchers that opened it first.
    pub finder: Option<usize>,
}

/// Prepared simulation: schedule, substreams and crash limits.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: SimConfig,
    schedule: SelectionSchedule,
    streams: Substreams,
    limits: Vec<u64>,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate().map_err(Error::InvalidConfig)?;
        let schedule = build_schedule(config.strategy, &config.instance)?;
        let streams = Substreams::new(config.seed, config.instance.k);
        let max_steps = config.max_steps();
        let limits = config.crash_steps().into_iter().map(|c| c.min(max_steps)).collect();
        Ok(Self { config, schedule, streams, limits })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn schedule(&self) -> &SelectionSchedule {
        &self.schedule
    }

    /// Treasure box for `trial`.
    pub fn place(&self, trial: u64) -> usize {
        match self.config.instance.placement {
            Placement::Fixed(x) => x,
            Placement::Uniform => self.streams.placement(trial).random_range(1..=self.schedule.m),
        }
    }

    /// Runs trial `trial` with the treasure in `x`.
    pub fn run(&self, trial: u64, x: usize, scratch: &mut Vec<usize>) -> TrialOutcome {
        let mut best: Option<(u64, usize)> = None;
        for (j, &limit) in self.limits.iter().enumerate() {
            // ties go to the lower index
            let limit = best.map_or(limit, |(t, _)| limit.min(t - 1));
            if limit == 0 {
                continue;
            }
            let mut searcher =
                Searcher::with_pool(&self.schedule, j, self.streams.searcher(trial, j), std::mem::take(scratch));
            if let Some(t) = searcher.hit_time(x, limit) {
                best = Some((t, j));
            }
            *scratch = searcher.into_pool();
        }
        TrialOutcome { treasure_x: x, find_time: best.map(|b| b.0), finder: best.map(|b| b.1) }
    }

    pub fn trial(&self, trial: u64, scratch: &mut Vec<usize>) -> TrialOutcome {
        self.run(trial, self.place(trial), scratch)
    }
}

/// One trial of `config` with the treasure in `treasure_x`; `trial` selects
/// the substream.
pub fn simulate_run(config: &SimConfig, treasure_x: usize, trial: u64) -> Result<TrialOutcome> {
    let sim = Simulator::new(config.clone())?;
    ensure_box(treasure_x, sim.schedule.m)?;
    Ok(sim.run(trial, treasure_x, &mut Vec::new()))
}

/// Running mean and squared deviations; merged with Chan's formula.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, y: f64) {
        self.n += 1;
        let d = y - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (y - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct Partial {
    ratio: Moments,
    found: u64,
    /// Per-box find-time moments, indexed by `x - 1`.
    buckets: Vec<Moments>,
}

impl Partial {
    fn merge(&mut self, o: &Partial) {
        self.ratio.merge(&o.ratio);
        self.found += o.found;
        if self.buckets.len() < o.buckets.len() {
            self.buckets.resize(o.buckets.len(), Moments::default());
        }
        for (a, b) in self.buckets.iter_mut().zip(&o.buckets) {
            a.merge(b);
        }
    }
}

/// Estimate plus the fraction of trials in which the treasure was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashReport {
    pub report: SpeedupReport,
    pub found_fraction: f64,
}

fn run_trials(config: &SimConfig, exec: Execution) -> Result<(Simulator, Partial)> {
    let sim = Simulator::new(config.clone())?;
    let m = sim.schedule.m;
    let buckets = if config.per_x && config.trials >= 100 * m as u64 { m } else { 0 };
    let censored = (sim.config.max_steps() + 1) as f64;
    let blocks = config.trials.div_ceil(BLOCK_TRIALS) as usize;

    let partials = map_indexed(exec, blocks, |b| {
        let start = b as u64 * BLOCK_TRIALS;
        let end = (start + BLOCK_TRIALS).min(config.trials);
        let mut p = Partial { buckets: vec![Moments::default(); buckets], ..Partial::default() };
        let mut scratch = Vec::with_capacity(m);
        for trial in start..end {
            let o = sim.trial(trial, &mut scratch);
            // censored at max_steps + 1; the report is flagged invalid
            let time = o.find_time.map_or(censored, |t| t as f64);
            p.found += o.find_time.is_some() as u64;
            p.ratio.push(time / o.treasure_x as f64);
            if let Some(bucket) = p.buckets.get_mut(o.treasure_x - 1) {
                bucket.push(time);
            }
        }
        p
    });

    let mut total = Partial::default();
    for p in &partials {
        total.merge(p);
    }
    Ok((sim, total))
}

fn to_report(sim: &Simulator, total: &Partial) -> SpeedupReport {
    let config = &sim.config;
    let theta = total.ratio.mean;
    let filled: Vec<PerBox> = total
        .buckets
        .iter()
        .enumerate()
        .filter(|(_, b)| b.n > 0)
        .map(|(i, b)| PerBox { x: i + 1, expected_time: b.mean, theta_x: b.mean / (i + 1) as f64 })
        .collect();
    let complete = match config.instance.placement {
        Placement::Fixed(_) => filled.len() == 1,
        Placement::Uniform => filled.len() == sim.schedule.m,
    };
    let per_x = complete.then_some(filled);
    let speedup_mean = per_x
        .as_ref()
        .map(|v| v.iter().map(|p| 1.0 / p.theta_x).sum::<f64>() / v.len() as f64);
    SpeedupReport {
        strategy: config.strategy,
        k: config.instance.k,
        m: sim.schedule.m,
        mode: ReportMode::Montecarlo,
        theta,
        speedup_inv_theta: 1.0 / theta,
        speedup_mean,
        per_x,
        stderr: Some(total.ratio.stderr()),
        trials: Some(config.trials),
        seed: Some(config.seed),
        not_found: Some(total.ratio.n - total.found),
        exact: None,
    }
}

/// Monte Carlo estimate of theta: the mean of `T / x` over trials.
pub fn estimate_theta(config: &SimConfig) -> Result<SpeedupReport> {
    estimate_theta_with(config, Execution::default())
}

pub fn estimate_theta_with(config: &SimConfig, exec: Execution) -> Result<SpeedupReport> {
    let (sim, total) = run_trials(config, exec)?;
    Ok(to_report(&sim, &total))
}

/// [`estimate_theta`] for a config with a non-empty crash plan.
pub fn crash_experiment(config: &SimConfig) -> Result<CrashReport> {
    crash_experiment_with(config, Execution::default())
}

pub fn crash_experiment_with(config: &SimConfig, exec: Execution) -> Result<CrashReport> {
    if config.crash_plan.is_empty() {
        return Err(Error::InvalidConfig("crash_plan must be non-empty".into()));
    }
    let (sim, total) = run_trials(config, exec)?;
    Ok(CrashReport { report: to_report(&sim, &total), found_fraction: total.found as f64 / total.ratio.n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: StrategyId, m: usize, k: usize, trials: u64) -> SimConfig {
        SimConfig::new(s, ProblemInstance::uniform(m, k), trials, 11)
    }

    #[test]
    fn trivial_single_searcher_finds_box_at_its_index() {
        let c = cfg(StrategyId::Trivial, 10, 1, 1);
        let o = simulate_run(&c, 5, 0).unwrap();
        assert_eq!(o, TrialOutcome { treasure_x: 5, find_time: Some(5), finder: Some(0) });
    }

    #[test]
    fn partition_loses_the_crashed_share() {
        let c = cfg(StrategyId::PartitionCoordinated, 6, 2, 1).with_crash(0, 0);
        for x in [1, 3, 5] {
            let o = simulate_run(&c, x, 0).unwrap();
            assert_eq!(o.find_time, None);
            assert_eq!(o.finder, None);
        }
        assert_eq!(simulate_run(&c, 4, 0).unwrap().find_time, Some(2));
    }

    #[test]
    fn crash_step_bounds_the_last_open() {
        let c = cfg(StrategyId::Trivial, 10, 1, 1).with_crash(0, 4);
        assert_eq!(simulate_run(&c, 4, 0).unwrap().find_time, Some(4));
        assert_eq!(simulate_run(&c, 5, 0).unwrap().find_time, None);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(StrategyId::Trivial, 10, 1, 0).validate().is_err());
        assert!(cfg(StrategyId::Trivial, 10, 2, 1).with_crash(2, 0).validate().is_err());
        let mut c = cfg(StrategyId::Trivial, 10, 1, 1);
        c.max_steps = Some(9);
        assert!(c.validate().is_err());
        assert_eq!(cfg(StrategyId::OptUniform, 7, 3, 1).max_steps(), 64 * 3 * 9);
        assert!(matches!(simulate_run(&cfg(StrategyId::Trivial, 10, 1, 1), 11, 0), Err(Error::BoxOutOfRange { .. })));
        assert!(crash_experiment(&cfg(StrategyId::Trivial, 10, 1, 1)).is_err());
    }

    #[test]
    fn trivial_estimate_is_exactly_one() {
        let r = estimate_theta(&cfg(StrategyId::Trivial, 100, 1, 10_000)).unwrap();
        assert_eq!(r.theta, 1.0);
        assert_eq!(r.stderr, Some(0.0));
        assert!(r.is_valid());
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        let c = cfg(StrategyId::Trivial, 10, 3, 1);
        assert_eq!(simulate_run(&c, 7, 0).unwrap().finder, Some(0));
        let c = c.with_crash(0, 0);
        assert_eq!(simulate_run(&c, 7, 0).unwrap().finder, Some(1));
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let ys: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        ys.iter().for_each(|&y| whole.push(y));
        let mut a = Moments::default();
        let mut b = Moments::default();
        ys[..313].iter().for_each(|&y| a.push(y));
        ys[313..].iter().for_each(|&y| b.push(y));
        a.merge(&b);
        assert_eq!(a.n, whole.n);
        assert!((a.mean - whole.mean).abs() < 1e-12);
        assert!((a.m2 - whole.m2).abs() < 1e-8 * whole.m2);
    }

    #[test]
    fn sequential_and_parallel_reports_are_identical() {
        let c = cfg(StrategyId::OptUniform, 50, 3, 20_000);
        let a = estimate_theta_with(&c, Execution::Sequential).unwrap();
        let b = estimate_theta_with(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
