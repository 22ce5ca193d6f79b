use super::grid::{GridFunction, Interpolation};
use crate::error::Result;
use crate::exact::NonVisitMatrix;
use crate::scalar::Scalar;

/// Step-function embedding of a matrix plus the mass dropped by cutting a
/// geometric tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub function: GridFunction,
    /// Last time step kept.
    pub cutoff: usize,
    /// Upper bound on `sum_{t > cutoff} N(x, t)` over all rows.
    pub truncation_error: f64,
}

/// Embeds `N_A` as `N(x, t) = N_A(floor x, floor t)` on `[1, m+1] x [0, cutoff+1]`.
/// Rows with a geometric tail are expanded until every entry drops below
/// `tail_tol` (or 10^6 steps past the horizon).
pub fn embed_matrix<S: Scalar>(matrix: &NonVisitMatrix<S>, tail_tol: f64) -> Result<Embedding> {
    let m = matrix.m;
    let (cutoff, truncation_error) = match &matrix.tail_ratio {
        None => (matrix.horizon, 0.0),
        Some(r) => {
            let r = r.to_f64();
            let head = (1..=m).map(|x| matrix.entry(x, matrix.horizon).to_f64()).fold(0.0, f64::max);
            let extra = if head <= tail_tol || r == 0.0 {
                0
            } else {
                ((tail_tol / head).ln() / r.ln()).ceil().clamp(0.0, 1e6) as usize
            };
            let last = head * r.powi(extra as i32);
            (matrix.horizon + extra, last * r / (1.0 - r))
        }
    };

    let x_grid: Vec<f64> = (1..=m + 1).map(|x| x as f64).collect();
    let t_grid: Vec<f64> = (0..=cutoff + 1).map(|t| t as f64).collect();
    let mut values = Vec::with_capacity(x_grid.len() * t_grid.len());
    for x in 1..=m + 1 {
        let row = matrix.row(x.min(m), cutoff);
        values.extend(row.iter().map(Scalar::to_f64));
        // value held on [cutoff, cutoff + 1)
        values.push(row[cutoff].to_f64());
    }
    let function = GridFunction::new(x_grid, t_grid, values, Interpolation::Step)?;
    Ok(Embedding { function, cutoff, truncation_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{build_matrix, theta};
    use crate::model::{Placement, ProblemInstance, StrategyId};
    use crate::schedule::build_schedule;
    use crate::Execution;

    fn matrix(s: StrategyId, m: usize, k: usize) -> NonVisitMatrix<f64> {
        build_matrix(&build_schedule(s, &ProblemInstance::uniform(m, k)).unwrap()).unwrap()
    }

    #[test]
    fn trivial_m3_embedding_theta_at_most_one() {
        let e = embed_matrix(&matrix(StrategyId::Trivial, 3, 1), 1e-12).unwrap();
        let th = e.function.theta(1, Execution::Sequential);
        let expected = (2f64.ln() + 2.0 * 1.5f64.ln() + 3.0 * (4.0f64 / 3.0).ln()) / 3.0;
        assert!((th - expected).abs() < 1e-14);
        assert!(th <= 1.0);
    }

    #[test]
    fn embedded_columns_respect_the_requirement() {
        let e = embed_matrix(&matrix(StrategyId::OptUniform, 6, 2), 1e-12).unwrap();
        for j in 0..=70 {
            let t = j as f64 / 10.0;
            assert!(e.function.column_integral(t).unwrap() <= t + 1e-12, "t={t}");
        }
    }

    #[test]
    fn embedding_theta_never_exceeds_matrix_theta() {
        for s in StrategyId::NON_COORDINATING {
            for k in 1..=3u32 {
                let n = matrix(s, 30, k as usize);
                let e = embed_matrix(&n, 1e-13).unwrap();
                let a = theta(&n, k as usize, Placement::Uniform).unwrap().theta;
                let f = e.function.theta(k, Execution::Sequential);
                assert!(f <= a + e.truncation_error, "{s} k={k}: {f} > {a}");
            }
        }
    }

    #[test]
    fn all_ones_matrix_has_zero_columns() {
        let n = NonVisitMatrix::from_rows(vec![vec![1.0; 4]; 3], None).unwrap();
        let e = embed_matrix(&n, 1e-12).unwrap();
        for t in [0.0, 1.5, 4.0] {
            assert_eq!(e.function.column_integral(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn memoryless_tail_is_truncated_with_a_bound() {
        let e = embed_matrix(&matrix(StrategyId::Memoryless, 12, 3), 1e-9).unwrap();
        assert!(e.cutoff > 4);
        assert!(e.truncation_error < 1e-6);
    }
}
