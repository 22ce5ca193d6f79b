//! Exact non-visit matrices and the expected-time / theta computations
//! built on them.

mod matrix;
mod theta;

pub use matrix::{build_matrix, build_matrix_with_limit, MatrixRepr, NonVisitMatrix, DEFAULT_RATIONAL_LIMIT};
pub use theta::{
    column_requirement_check, expected_times, expected_visit_time, theta, ColumnStatus, ExactTheta,
};

pub use crate::bounds::{compare_to_bound, BoundComparison};

use num::BigRational;

use crate::error::Result;
use crate::model::{ProblemInstance, StrategyId};
use crate::report::SpeedupReport;
use crate::scalar::{NumericMode, Scalar};
use crate::schedule::build_schedule;

/// Schedule, matrix and theta for `strategy` on `instance` with
/// `instance.k` searchers.
pub fn analyze_with<S: Scalar>(strategy: StrategyId, instance: &ProblemInstance) -> Result<ExactTheta<S>> {
    let schedule = build_schedule(strategy, instance)?;
    let matrix = build_matrix::<S>(&schedule)?;
    theta(&matrix, instance.k, instance.placement)
}

/// [`analyze_with`] flattened into a report in the requested numeric mode.
pub fn analyze(
    strategy: StrategyId,
    instance: &ProblemInstance,
    mode: NumericMode,
    per_x: bool,
) -> Result<SpeedupReport> {
    Ok(match mode {
        NumericMode::ExactRational => analyze_with::<BigRational>(strategy, instance)?.to_report(strategy, per_x),
        NumericMode::Float64 => analyze_with::<f64>(strategy, instance)?.to_report(strategy, per_x),
    })
}
