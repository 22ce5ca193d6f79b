//! Invariant suites behind `boxhunt verify`.

use boxhunt_core::bounds::gamma_product_check;
use boxhunt_core::continuous::{opt_grids, sample_opt, GridFunction};
use boxhunt_core::exact::{build_matrix, column_requirement_check, theta, ColumnStatus, NonVisitMatrix};
use boxhunt_core::montecarlo::{estimate_theta, SimConfig};
use boxhunt_core::{build_schedule, Execution, Placement, ProblemInstance, Scalar, StrategyId};
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::args::{Format, ModeArg, Suite, VerifyArgs};
use crate::commands::exact_one;
use crate::output;
use crate::{CliError, Outcome};

/// Largest `m` checked in rational arithmetic; floats above.
pub const RATIONAL_MAX_M: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub suite: String,
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

impl VerifyRow {
    fn new(suite: &str, case: String, pass: bool, detail: String) -> Self {
        Self { suite: suite.into(), case, pass, detail }
    }
}

type Rows = Result<Vec<VerifyRow>, CliError>;

fn matrix<S: Scalar>(s: StrategyId, m: usize, k: usize) -> Result<NonVisitMatrix<S>, CliError> {
    Ok(build_matrix::<S>(&build_schedule(s, &ProblemInstance::uniform(m, k))?)?)
}

fn columns_case<S: Scalar>(s: StrategyId, m: usize, k: usize) -> Result<VerifyRow, CliError> {
    let n = matrix::<S>(s, m, k)?;
    let (pass, detail) = match column_requirement_check(&n) {
        ColumnStatus::Ok => (true, format!("C(t) <= t for t <= {}", n.horizon.max(n.m))),
        ColumnStatus::Violation { t, column_sum } => (false, format!("C({t}) = {}", column_sum.render())),
    };
    Ok(VerifyRow::new("columns", format!("{s} k={k} m={m} {}", S::MODE.name()), pass, detail))
}

/// Column requirement on every strategy matrix.
pub fn columns(algs: &[StrategyId], ks: &[usize], ms: &[usize]) -> Rows {
    let mut rows = Vec::new();
    for &s in algs {
        for &k in ks {
            for &m in ms {
                rows.push(if m <= RATIONAL_MAX_M {
                    columns_case::<BigRational>(s, m, k)?
                } else {
                    columns_case::<f64>(s, m, k)?
                });
            }
        }
    }
    Ok(rows)
}

fn monotone_rows<S: Scalar>(n: &NonVisitMatrix<S>) -> Option<String> {
    let t_max = n.horizon + if n.tail_ratio.is_some() { n.m } else { 0 };
    let (zero, one) = (S::zero(), S::one());
    for x in 1..=n.m {
        let row = n.row(x, t_max);
        if row[0] != one {
            return Some(format!("N({x},0) != 1"));
        }
        if let Some(t) = (1..row.len()).find(|&t| row[t] > row[t - 1] || row[t] < zero) {
            return Some(format!("row {x} increases or leaves [0,1] at t={t}"));
        }
    }
    None
}

/// Rows non-increasing in t, theta(S, 1) >= theta(trivial, 1) = 1, and
/// theta non-increasing in the number of searchers running a fixed schedule.
pub fn monotonicity(algs: &[StrategyId], ks: &[usize], ms: &[usize]) -> Rows {
    let mut rows = Vec::new();
    for &m in ms {
        let rational = m <= RATIONAL_MAX_M;
        let single = |s| -> Result<f64, CliError> {
            let mode = if rational { ModeArg::Rational } else { ModeArg::Float };
            Ok(exact_one(s, &ProblemInstance::uniform(m, 1), mode, false, false)?.report.theta)
        };
        let trivial = single(StrategyId::Trivial)?;
        for &s in algs {
            let th = single(s)?;
            let pass = th >= 1.0 && th >= trivial && trivial == 1.0;
            rows.push(VerifyRow::new("monotonicity", format!("{s} k=1 m={m}"), pass, format!("theta(1) = {th}")));
            for &k in ks {
                let n = matrix::<f64>(s, m, k)?;
                let mut issue = if rational { monotone_rows(&matrix::<BigRational>(s, m, k)?) } else { monotone_rows(&n) };
                if issue.is_none() && !n.is_team() {
                    let thetas: Vec<f64> = (1..=k + 1)
                        .map(|j| theta(&n, j, Placement::Uniform).map(|r| r.theta))
                        .collect::<Result<_, _>>()?;
                    if let Some(w) = thetas.windows(2).find(|w| w[1] > w[0] * (1.0 + 1e-12)) {
                        issue = Some(format!("theta grows with searchers: {} -> {}", w[0], w[1]));
                    }
                }
                rows.push(VerifyRow::new(
                    "monotonicity",
                    format!("{s} k={k} m={m}"),
                    issue.is_none(),
                    issue.unwrap_or_else(|| "rows non-increasing; theta non-increasing in searchers".into()),
                ));
            }
        }
    }
    Ok(rows)
}

/// Zoomed copy of `f` resampled on its own (scaled, refined) grid, so the
/// comparison does not reuse the original nodes.
pub fn resampled_zoom(f: &GridFunction, k: usize, n: usize, t_max: f64, a: f64, b: f64) -> Result<GridFunction, CliError> {
    let (xs, ts) = opt_grids(k, n + n / 2 + 1, t_max);
    let xs = xs.into_iter().map(|x| a * x).collect();
    let ts = ts.into_iter().map(|t| b * t).collect();
    Ok(f.zoom_onto(a, b, xs, ts, Execution::default())?)
}

/// Zoom identities on a sampled `OPT_2`: theta scales by `b/a` and
/// `C_Z(t) = a C(t/b)`.
pub fn zoom(n: usize, tol: f64) -> Rows {
    let (k, t_max) = (2usize, 1.5);
    let f = sample_opt(k, n, t_max, Execution::default())?;
    let th = f.theta(k as u32, Execution::default());
    let mut rows = Vec::new();
    for (a, b) in [(2.0, 1.0), (1.0, 2.0), (3.0, 3.0), (0.5, 0.5)] {
        let z = resampled_zoom(&f, k, n, t_max, a, b)?;
        let zt = z.theta(k as u32, Execution::default());
        let theta_err = (zt - b / a * th).abs();
        let col_err = [0.05, 0.2, 0.4, 0.5, 0.8, 1.0, 1.4]
            .iter()
            .map(|s| Ok((z.column_integral(b * s)? - a * f.column_integral(*s)?).abs()))
            .collect::<Result<Vec<f64>, CliError>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(VerifyRow::new(
            "zoom",
            format!("a={a} b={b}"),
            theta_err <= tol && col_err <= tol,
            format!("|theta_Z - (b/a) theta| = {theta_err:.2e}; max |C_Z(t) - a C(t/b)| = {col_err:.2e}"),
        ));
    }
    Ok(rows)
}

/// Random `(a, b, phi)` with `1 <= a <= b <= 10^6` and `phi` in `(0, 1]`;
/// half the cases use log-uniform endpoints so short ranges are covered.
pub fn gamma_cases(cases: usize, seed: u64) -> Vec<(u64, u64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|i| {
            let (a, b) = if i % 2 == 0 {
                let a = rng.random_range(1..=1_000_000u64);
                (a, rng.random_range(a..=1_000_000))
            } else {
                let a = 10f64.powf(rng.random_range(0.0..6.0)).floor() as u64;
                let b = (a as f64 * 10f64.powf(rng.random_range(0.0..=6.0 - (a as f64).log10()))).floor() as u64;
                (a.max(1), b.clamp(a.max(1), 1_000_000))
            };
            (a, b, 1.0 - rng.random::<f64>())
        })
        .collect()
}

pub fn gamma(cases: usize, seed: u64) -> Rows {
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for (a, b, phi) in gamma_cases(cases, seed) {
        let c = gamma_product_check(a, b, phi)?;
        worst = worst.max(c.lhs / c.rhs);
        if !c.holds {
            violations.push(format!("a={a} b={b} phi={phi}"));
        }
    }
    let detail = if violations.is_empty() {
        format!("max lhs/rhs = {worst:.12}")
    } else {
        format!("{} violations, first {}", violations.len(), violations[0])
    };
    Ok(vec![VerifyRow::new("gamma", format!("{cases} cases seed={seed}"), violations.is_empty(), detail)])
}

fn exact_theta(s: StrategyId, m: usize, k: usize) -> Result<f64, CliError> {
    let mode = if m <= RATIONAL_MAX_M { ModeArg::Rational } else { ModeArg::Float };
    Ok(exact_one(s, &ProblemInstance::uniform(m, k), mode, false, false)?.report.theta)
}

/// Monte Carlo estimate within four standard errors of the exact value.
pub fn mc(algs: &[StrategyId], ks: &[usize], ms: &[usize], trials: u64, seed: u64) -> Rows {
    let mut rows = Vec::new();
    for &s in algs {
        for &k in ks {
            for &m in ms {
                let exact = exact_theta(s, m, k)?;
                let r = estimate_theta(&SimConfig::new(s, ProblemInstance::uniform(m, k), trials, seed))?;
                let se = r.stderr.unwrap_or(0.0);
                let dev = (r.theta - exact).abs();
                rows.push(VerifyRow::new(
                    "mc",
                    format!("{s} k={k} m={m}"),
                    r.is_valid() && dev <= 4.0 * se,
                    format!("estimate {:.6} ± {se:.2e}, exact {exact:.6}", r.theta),
                ));
            }
        }
    }
    Ok(rows)
}

pub fn rows(args: &VerifyArgs) -> Rows {
    let algs = args.alg.as_ref().map_or(StrategyId::ALL.to_vec(), |a| a.0.clone());
    let (ks, ms) = (args.k.values(), args.m.values());
    if ks.contains(&0) || ms.contains(&0) {
        return Err(CliError::Usage("k and m must be at least 1".into()));
    }
    let all = args.suite == Suite::All;
    let mut out = Vec::new();
    if all || args.suite == Suite::Columns {
        out.extend(columns(&algs, &ks, &ms)?);
    }
    if all || args.suite == Suite::Monotonicity {
        out.extend(monotonicity(&algs, &ks, &ms)?);
    }
    if all || args.suite == Suite::Zoom {
        out.extend(zoom(args.grid, args.zoom_tol)?);
    }
    if all || args.suite == Suite::Gamma {
        out.extend(gamma(args.cases, args.seed)?);
    }
    if all || args.suite == Suite::Mc {
        out.extend(mc(&algs, &ks, &ms, args.trials, args.seed)?);
    }
    Ok(out)
}

pub fn run(args: &VerifyArgs, format: Format) -> Result<Outcome, CliError> {
    let rows = rows(args)?;
    let failed: Vec<String> =
        rows.iter().filter(|r| !r.pass).map(|r| format!("FAIL {} {}: {}", r.suite, r.case, r.detail)).collect();
    Ok(Outcome { body: output::table(&rows, format)?, passed: failed.is_empty(), notes: failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_cases_respect_the_domain() {
        let cases = gamma_cases(2000, 5);
        assert!(cases.iter().all(|&(a, b, phi)| 1 <= a && a <= b && b <= 1_000_000 && phi > 0.0 && phi <= 1.0));
        assert!(cases.iter().any(|&(a, b, _)| b - a < 100));
        assert!(cases.iter().any(|&(a, b, _)| b - a > 100_000));
        assert_eq!(cases, gamma_cases(2000, 5));
    }

    #[test]
    fn small_suites_pass() {
        let algs = StrategyId::ALL;
        for rows in [columns(&algs, &[2, 3], &[12]).unwrap(), monotonicity(&algs, &[2, 3], &[12]).unwrap()] {
            assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        }
    }

    #[test]
    fn monotone_rows_detects_increase() {
        let n = NonVisitMatrix::from_rows(vec![vec![1.0, 0.5, 1.0]], None).unwrap();
        assert!(monotone_rows(&n).is_some());
        let n = NonVisitMatrix::from_rows(vec![vec![1.0, 0.5, 0.0]], None).unwrap();
        assert!(monotone_rows(&n).is_none());
    }
}
