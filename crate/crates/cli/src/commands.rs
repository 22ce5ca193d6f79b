use boxhunt_core::bounds::{adversarial_bound, gap_ratio, memoryless_bound, uniform_bound};
use boxhunt_core::continuous::{theta_integral, theta_opt_exact, theta_regions_exact, ThetaMethod};
use boxhunt_core::exact::{build_matrix, column_requirement_check, theta, ColumnStatus};
use boxhunt_core::montecarlo::{crash_experiment_with, estimate_theta_with, SimConfig};
use boxhunt_core::{build_schedule, Execution, ProblemInstance, Scalar, StrategyId};
use num::rational::Ratio;
use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::args::{ExactArgs, Format, MethodArg, ModeArg, OptArgs, SimulateArgs};
use crate::output::{self, ColumnCheck, ReportRecord};
use crate::{CliError, Outcome};

fn fraction(r: Ratio<u64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn float(r: Ratio<u64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub k: usize,
    pub uniform_bound: f64,
    pub uniform_fraction: String,
    pub adversarial_bound: f64,
    pub adversarial_fraction: String,
    /// Undefined for a single searcher.
    pub memoryless_bound: Option<f64>,
    pub memoryless_fraction: Option<String>,
    pub gap_ratio: f64,
    pub gap_fraction: String,
}

pub fn bounds_rows(ks: &[usize]) -> Result<Vec<BoundsRow>, CliError> {
    if ks.is_empty() {
        return Err(CliError::Usage("empty k range".into()));
    }
    ks.iter()
        .map(|&k| {
            let u = uniform_bound(k)?;
            let a = adversarial_bound(k)?;
            let mem = memoryless_bound(k).ok();
            let gap = gap_ratio(k)?;
            Ok(BoundsRow {
                k,
                uniform_bound: u.value(),
                uniform_fraction: u.fraction(),
                adversarial_bound: a.value(),
                adversarial_fraction: a.fraction(),
                memoryless_bound: mem.map(|b| b.value()),
                memoryless_fraction: mem.map(|b| b.fraction()),
                gap_ratio: float(gap),
                gap_fraction: fraction(gap),
            })
        })
        .collect()
}

pub fn bounds(ks: &[usize], format: Format) -> Result<Outcome, CliError> {
    let rows = bounds_rows(ks)?;
    Ok(Outcome { body: output::table(&rows, format)?, notes: Vec::new(), passed: true })
}

fn exact_record<S: Scalar>(
    strategy: StrategyId,
    instance: &ProblemInstance,
    per_x: bool,
    check_columns: bool,
) -> boxhunt_core::Result<ReportRecord> {
    let schedule = build_schedule(strategy, instance)?;
    let matrix = build_matrix::<S>(&schedule)?;
    let report = theta(&matrix, instance.k, instance.placement)?.to_report(strategy, per_x);
    let mut rec = ReportRecord::new(report);
    if check_columns {
        rec.columns = Some(match column_requirement_check(&matrix) {
            ColumnStatus::Ok => ColumnCheck { ok: true, violation_t: None, column_sum: None },
            ColumnStatus::Violation { t, column_sum } => {
                ColumnCheck { ok: false, violation_t: Some(t), column_sum: Some(column_sum.render()) }
            }
        });
    }
    Ok(rec)
}

/// Exact report for one instance in the requested numeric mode.
pub fn exact_one(
    strategy: StrategyId,
    instance: &ProblemInstance,
    mode: ModeArg,
    per_x: bool,
    check_columns: bool,
) -> Result<ReportRecord, CliError> {
    Ok(match mode {
        ModeArg::Rational => exact_record::<BigRational>(strategy, instance, per_x, check_columns)?,
        ModeArg::Float => exact_record::<f64>(strategy, instance, per_x, check_columns)?,
    })
}

pub fn exact(args: &ExactArgs, format: Format) -> Result<Outcome, CliError> {
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &s in &args.alg.0 {
        for k in args.k.values() {
            for m in args.m.values() {
                let rec = exact_one(s, &ProblemInstance::uniform(m, k), args.mode, args.per_x, args.check_columns)?;
                if let Some(ColumnCheck { ok: false, violation_t, column_sum }) = &rec.columns {
                    notes.push(format!(
                        "column requirement violated: {s} k={k} m={m} at t={} (C = {})",
                        violation_t.unwrap_or_default(),
                        column_sum.as_deref().unwrap_or("?"),
                    ));
                }
                records.push(rec);
            }
        }
    }
    let passed = notes.is_empty();
    Ok(Outcome { body: output::reports(&records, format)?, notes, passed })
}

pub fn simulate(args: &SimulateArgs, format: Format) -> Result<Outcome, CliError> {
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &s in &args.alg.0 {
        for k in args.k.values() {
            for m in args.m.values() {
                let config = SimConfig {
                    crash_plan: args.crashes.clone(),
                    max_steps: args.max_steps,
                    per_x: args.per_x,
                    ..SimConfig::new(s, ProblemInstance::uniform(m, k), args.trials, args.seed)
                };
                let rec = if config.crash_plan.is_empty() {
                    ReportRecord::new(estimate_theta_with(&config, exec)?)
                } else {
                    let c = crash_experiment_with(&config, exec)?;
                    notes.push(format!("{s} k={k} m={m}: found_fraction {}", c.found_fraction));
                    ReportRecord { found_fraction: Some(c.found_fraction), ..ReportRecord::new(c.report) }
                };
                if let Some(n) = rec.report.not_found.filter(|&n| n > 0) {
                    notes.push(format!(
                        "warning: {s} k={k} m={m}: {n} of {} trials hit max_steps without finding the treasure; the estimate is not valid",
                        args.trials
                    ));
                }
                records.push(rec);
            }
        }
    }
    Ok(Outcome { body: output::reports(&records, format)?, notes, passed: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptRow {
    pub k: usize,
    /// Region below the curve `x = kt`.
    pub region_below: Option<f64>,
    /// Region above the curve for `t < 1/k`.
    pub region_above: Option<f64>,
    /// Region `1/k <= t < 1`.
    pub region_late: Option<f64>,
    pub sum: Option<f64>,
    pub closed_form: f64,
    pub closed_form_fraction: String,
    pub quadrature: Option<f64>,
    pub quadrature_error: Option<f64>,
    pub abs_diff: Option<f64>,
    pub pass: bool,
}

pub fn opt_rows(ks: &[usize], method: MethodArg, tol: f64) -> Result<Vec<OptRow>, CliError> {
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(CliError::Usage(format!("the continuous optimum needs k ≥ 2 (got {k})")));
    }
    ks.iter()
        .map(|&k| {
            let closed = theta_opt_exact(k)?;
            let mut row = OptRow {
                k,
                region_below: None,
                region_above: None,
                region_late: None,
                sum: None,
                closed_form: float(closed),
                closed_form_fraction: fraction(closed),
                quadrature: None,
                quadrature_error: None,
                abs_diff: None,
                pass: true,
            };
            if method != MethodArg::Quadrature {
                let [a, b, c] = theta_regions_exact(k)?;
                row.region_below = Some(float(a));
                row.region_above = Some(float(b));
                row.region_late = Some(float(c));
                row.sum = Some(float(a + b + c));
                row.pass &= a + b + c == closed;
            }
            if method != MethodArg::Closed {
                let q = theta_integral(k, ThetaMethod::Quadrature)?;
                let diff = (q.value - row.closed_form).abs();
                row.quadrature = Some(q.value);
                row.quadrature_error = Some(q.error_estimate);
                row.abs_diff = Some(diff);
                row.pass &= diff <= tol;
            }
            Ok(row)
        })
        .collect()
}

pub fn opt(args: &OptArgs, format: Format) -> Result<Outcome, CliError> {
    let rows = opt_rows(&args.k.values(), args.method, args.tol)?;
    let notes = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("k={}: quadrature differs from the closed form by more than {}", r.k, args.tol))
        .collect::<Vec<_>>();
    Ok(Outcome { body: output::table(&rows, format)?, passed: notes.is_empty(), notes })
}
