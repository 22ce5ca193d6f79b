//! Sampled functions `N(x, t)` on a rectangular grid.

use serde::{Deserialize, Serialize};

use super::opt::opt_value;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::scalar::neumaier_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise bilinear between nodes.
    Bilinear,
    /// Piecewise constant: a node's value holds until the next node.
    Step,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row-major: `values[ix * t_grid.len() + it]`.
    pub values: Vec<f64>,
    pub interpolation: Interpolation,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Index `i` with `grid[i] <= v < grid[i + 1]`, clamped to the last cell.
fn cell(grid: &[f64], v: f64) -> usize {
    grid.partition_point(|&g| g <= v).saturating_sub(1).min(grid.len().saturating_sub(2))
}

fn trapezoid(xs: &[f64], ys: impl Iterator<Item = f64>) -> f64 {
    let ys: Vec<f64> = ys.collect();
    neumaier_sum(xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])))
}

impl GridFunction {
    pub fn new(
        x_grid: Vec<f64>,
        t_grid: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        if x_grid.len() < 2 || t_grid.len() < 2 {
            return Err(Error::Domain("grids need at least two nodes".into()));
        }
        if !strictly_increasing(&x_grid) || !strictly_increasing(&t_grid) {
            return Err(Error::Domain("grids must be strictly increasing".into()));
        }
        if values.len() != x_grid.len() * t_grid.len() {
            return Err(Error::Domain("value table does not match grid sizes".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain("values must lie in [0, 1]".into()));
        }
        Ok(Self { x_grid, t_grid, values, interpolation })
    }

    /// Samples `f` at every node.
    pub fn sample<F>(x_grid: Vec<f64>, t_grid: Vec<f64>, f: F, exec: Execution) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let rows = exec::map_indexed(exec, x_grid.len(), |i| {
            t_grid.iter().map(|&t| f(x_grid[i], t)).collect::<Vec<_>>()
        });
        Self::new(x_grid, t_grid, rows.concat(), Interpolation::Bilinear)
    }

    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x_grid[0], *self.x_grid.last().unwrap())
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_grid[0], *self.t_grid.last().unwrap())
    }

    pub fn node(&self, ix: usize, it: usize) -> f64 {
        self.values[ix * self.nt() + it]
    }

    fn row_at_t(&self, ix: usize, t: f64) -> f64 {
        let j = cell(&self.t_grid, t);
        match self.interpolation {
            Interpolation::Step => {
                if t >= self.t_grid[j + 1] { self.node(ix, j + 1) } else { self.node(ix, j) }
            }
            Interpolation::Bilinear => {
                let (t0, t1) = (self.t_grid[j], self.t_grid[j + 1]);
                let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                (1.0 - w) * self.node(ix, j) + w * self.node(ix, j + 1)
            }
        }
    }

    /// Interpolated value; queries outside the grid are clamped to it.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let i = cell(&self.x_grid, x);
        match self.interpolation {
            Interpolation::Step => {
                let i = if x >= self.x_grid[i + 1] { i + 1 } else { i };
                self.row_at_t(i, t)
            }
            Interpolation::Bilinear => {
                let (x0, x1) = (self.x_grid[i], self.x_grid[i + 1]);
                let w = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
                (1.0 - w) * self.row_at_t(i, t) + w * self.row_at_t(i + 1, t)
            }
        }
    }

    /// `C(t) = int_X 1 - N(x, t) dx`.
    pub fn column_integral(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain(format!("t = {t} outside [{lo}, {hi}]")));
        }
        Ok(match self.interpolation {
            Interpolation::Bilinear => trapezoid(&self.x_grid, (0..self.nx()).map(|i| 1.0 - self.row_at_t(i, t))),
            Interpolation::Step => neumaier_sum(
                self.x_grid
                    .windows(2)
                    .enumerate()
                    .map(|(i, w)| (w[1] - w[0]) * (1.0 - self.row_at_t(i, t))),
            ),
        })
    }

    /// `int_0^{t_max} N(x_i, t)^k dt` for node row `i` (zero past `t_max`).
    fn row_time_integral(&self, ix: usize, k: u32) -> f64 {
        let row = (0..self.nt()).map(|j| self.node(ix, j).powi(k as i32));
        match self.interpolation {
            Interpolation::Bilinear => trapezoid(&self.t_grid, row),
            Interpolation::Step => {
                let vals: Vec<f64> = row.collect();
                neumaier_sum(self.t_grid.windows(2).zip(&vals).map(|(w, v)| (w[1] - w[0]) * v))
            }
        }
    }

    /// `theta_N(k) = (1/|X|) int_X (1/x) int_0^inf N(x,t)^k dt dx`, taking `N = 0`
    /// beyond the last time node.
    pub fn theta(&self, k: u32, exec: Execution) -> f64 {
        let inner = exec::map_indexed(exec, self.nx(), |i| self.row_time_integral(i, k));
        let (lo, hi) = self.x_range();
        let integral = match self.interpolation {
            Interpolation::Bilinear => {
                trapezoid(&self.x_grid, inner.iter().zip(&self.x_grid).map(|(v, x)| v / x))
            }
            Interpolation::Step => neumaier_sum(
                self.x_grid.windows(2).zip(&inner).map(|(w, v)| (w[1] / w[0]).ln() * v),
            ),
        };
        integral / (hi - lo)
    }

    /// Zooming by `(a, b)`: `Z(x, t) = N(x/a, t/b)` on `aX x [0, b t_max]`.
    /// Nodes map to scaled nodes, so values carry over unchanged.
    pub fn zoom(&self, a: f64, b: f64) -> Result<Self> {
        check_zoom(a, b)?;
        Ok(Self {
            x_grid: self.x_grid.iter().map(|x| a * x).collect(),
            t_grid: self.t_grid.iter().map(|t| b * t).collect(),
            values: self.values.clone(),
            interpolation: self.interpolation,
        })
    }

    /// Zooming by `(a, b)`, resampled onto caller-chosen grids by interpolation.
    pub fn zoom_onto(&self, a: f64, b: f64, x_grid: Vec<f64>, t_grid: Vec<f64>, exec: Execution) -> Result<Self> {
        check_zoom(a, b)?;
        Self::sample(x_grid, t_grid, |x, t| self.eval(x / a, t / b), exec)
    }
}

fn check_zoom(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("zoom factors must be positive (got a={a}, b={b})")));
    }
    Ok(())
}

/// Left end of OPT grids; the integrands are bounded near 0, so the
/// omitted sliver changes column integrals by at most this much.
pub const OPT_GRID_X_MIN: f64 = 1e-6;
pub const DEFAULT_GRID_RESOLUTION: usize = 2048;

/// Grids for sampling `OPT_k`: log-spaced `x` near 0 then uniform, and a
/// uniform `t` grid on `[0, t_max]` refined at `t = x/k` for the log-spaced
/// `x` plus the branch times `1/k` and `1`.
pub fn opt_grids(k: usize, n: usize, t_max: f64) -> (Vec<f64>, Vec<f64>) {
    let kf = k as f64;
    let h = 1.0 / n as f64;
    let n_log = 48;
    let ratio = (h / OPT_GRID_X_MIN).powf(1.0 / n_log as f64);
    let mut xs: Vec<f64> = (0..n_log).map(|i| OPT_GRID_X_MIN * ratio.powi(i as i32)).collect();
    xs.extend((1..=n).map(|i| i as f64 * h));

    let nt = (t_max * n as f64).ceil() as usize;
    let mut ts: Vec<f64> = (0..=nt).map(|j| j as f64 * t_max / nt as f64).collect();
    ts.extend(xs[..=n_log].iter().map(|x| x / kf));
    ts.extend([1.0 / kf, 1.0]);
    ts.retain(|&t| t <= t_max);
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    (xs, ts)
}

/// `OPT_k` sampled on [`opt_grids`].
pub fn sample_opt(k: usize, n: usize, t_max: f64, exec: Execution) -> Result<GridFunction> {
    if k < 2 {
        return Err(Error::Domain(format!("k ≥ 2 required for OPT_k (got {k})")));
    }
    let (xs, ts) = opt_grids(k, n, t_max);
    let kf = k as f64;
    GridFunction::sample(xs, ts, |x, t| opt_value(kf, x, t), exec)
}
