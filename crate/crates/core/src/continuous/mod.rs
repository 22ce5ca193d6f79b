//! Continuous relaxation: valid functions on `X x [0, inf)`, the optimum
//! `OPT_k`, zooming, and matrix embeddings.

mod embed;
mod grid;
mod opt;
pub mod quadrature;

pub use embed::{embed_matrix, Embedding};
pub use grid::{opt_grids, sample_opt, GridFunction, Interpolation, DEFAULT_GRID_RESOLUTION, OPT_GRID_X_MIN};
pub use opt::{
    column_optimizer, opt_eval, perturbation_check, theta_integral, theta_opt_exact, theta_regions_exact,
    time_integral_over_x, ColumnSolution, PerturbationOutcome, ThetaIntegral, ThetaMethod, QUADRATURE_CUTOFF,
};

use crate::error::Result;

/// `C_f(t)`; free-function form of [`GridFunction::column_integral`].
pub fn column_integral(f: &GridFunction, t: f64) -> Result<f64> {
    f.column_integral(t)
}

/// Free-function form of [`GridFunction::zoom`].
pub fn zoom(f: &GridFunction, a: f64, b: f64) -> Result<GridFunction> {
    f.zoom(a, b)
}
