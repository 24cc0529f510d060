//! The rank-law engine: joint cdf of the r-th order statistic of X and its
//! concomitant Y-value, evaluated by adaptive quadrature in the probability
//! scale of the X marginal.
//!
//! After substituting t = F_X(u), the joint cdf of the pair becomes
//!
//! ```text
//! F_{r:n}(x, y) = B_n ∫_0^{F_X(x)} t^{r-1} (1-t)^{n-r} Λ(t, y) dt,
//! B_n = n C(n-1, r-1),
//! ```
//!
//! where Λ(t, y) = P(Y <= y | X = F_X^{-1}(t)) is the conditional slice of
//! the joint law along the x-quantile t. Averaging over r collapses the
//! polynomial factor to n, which recovers the plain joint cdf; that mixture
//! identity is one of the main test anchors.

use crate::error::{Error, Result};
use crate::models::BivariateModel;
use crate::models::ModelDescriptor;
use crate::quad::{adaptive_gauss_legendre, QuadResult};
use crate::special;
use ndarray::{Array3, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest supported sample size. Keeps the rank coefficient and the
/// power-form integrand comfortably inside double range.
pub const MAX_N: usize = 64;

/// Quadrature policy for the rank integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Absolute tolerance per evaluated cdf value.
    pub abs_tol: f64,
    /// Refinement cap: maximum number of accepted leaf panels.
    pub max_panels: usize,
    /// Quantile truncation for the evaluation window.
    pub window_eps: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 1 << 14,
            window_eps: 1e-6,
        }
    }
}

fn check_rank(r: usize, n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::domain(format!(
            "sample size must lie in 1..={MAX_N}, got {n}"
        )));
    }
    if r == 0 || r > n {
        return Err(Error::domain(format!(
            "rank must lie in 1..={n}, got {r}"
        )));
    }
    Ok(())
}

/// B_n = n C(n-1, r-1): exact integer arithmetic for small n, log-gamma
/// exponentiation beyond.
pub fn rank_coefficient(r: usize, n: usize) -> Result<f64> {
    check_rank(r, n)?;
    if n <= 20 {
        Ok((n as u128 * special::binomial(n as u64 - 1, r as u64 - 1)) as f64)
    } else {
        let ln_bn = (n as f64).ln() + special::ln_gamma(n as f64)
            - special::ln_gamma(r as f64)
            - special::ln_gamma((n - r + 1) as f64);
        Ok(ln_bn.exp())
    }
}

/// Marginal cdf of the r-th order statistic: I_{F_X(x)}(r, n - r + 1).
pub fn order_stat_cdf(model: &dyn BivariateModel, r: usize, n: usize, x: f64) -> Result<f64> {
    check_rank(r, n)?;
    special::reg_inc_beta(r as f64, (n - r + 1) as f64, model.marginal_cdf_x(x))
}

/// Rank integral with a precomputed upper limit in probability scale.
fn rank_cdf_quad(
    model: &dyn BivariateModel,
    r: usize,
    n: usize,
    t_upper: f64,
    y: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let bn = rank_coefficient(r, n)?;
    let rp = (r - 1) as i32;
    let np = (n - r) as i32;
    adaptive_gauss_legendre(
        |t| {
            let u = model
                .marginal_quantile_x(t)
                .expect("interior quadrature node");
            bn * t.powi(rp) * (1.0 - t).powi(np) * model.conditional_cdf_y(u, y)
        },
        0.0,
        t_upper,
        abs_tol,
        max_panels,
    )
}

/// Joint cdf of (X_{r:n}, Y_[r:n]) at (x, y) to the spec'd absolute
/// tolerance. x is clamped into the quantile window; y may be any real
/// value, including ±∞.
pub fn concomitant_joint_cdf(
    model: &dyn BivariateModel,
    r: usize,
    n: usize,
    x: f64,
    y: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    check_rank(r, n)?;
    if x.is_nan() || y.is_nan() {
        return Err(Error::domain("cdf arguments must not be NaN"));
    }
    let window = model.support_window(spec.window_eps)?;
    let t_upper = model.marginal_cdf_x(window.clamp_x(x));
    Ok(rank_cdf_quad(model, r, n, t_upper, y, spec.abs_tol, spec.max_panels)?.value)
}

/// Cached grid of F_{r:n}(x, y) for every rank r = 1..n.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcomitantCdfTable {
    pub n: usize,
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// Indexed [r - 1, ix, iy].
    pub values: Array3<f64>,
    /// Largest per-cell quadrature error estimate actually incurred.
    pub tol: f64,
    pub model: ModelDescriptor,
}

impl ConcomitantCdfTable {
    /// Grid of one rank's values, indexed [ix, iy].
    pub fn rank_values(&self, r: usize) -> Result<ArrayView2<'_, f64>> {
        check_rank(r, self.n)?;
        Ok(self.values.index_axis(Axis(0), r - 1))
    }

    /// CSV serialization, columns `r,x,y,value`, shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,x,y,value\n");
        for r in 0..self.n {
            for (ix, x) in self.grid_x.iter().enumerate() {
                for (iy, y) in self.grid_y.iter().enumerate() {
                    out.push_str(&format!("{},{},{},{}\n", r + 1, x, y, self.values[[r, ix, iy]]));
                }
            }
        }
        out
    }

    /// JSON sidecar: grids, model descriptor, achieved tolerance.
    pub fn to_json_meta(&self) -> String {
        #[derive(Serialize)]
        struct Meta<'a> {
            n: usize,
            model: &'a ModelDescriptor,
            tol: f64,
            grid_x: &'a [f64],
            grid_y: &'a [f64],
        }
        let meta = Meta {
            n: self.n,
            model: &self.model,
            tol: self.tol,
            grid_x: &self.grid_x,
            grid_y: &self.grid_y,
        };
        let mut s = serde_json::to_string_pretty(&meta).expect("serializable meta");
        s.push('\n');
        s
    }
}

fn check_grid(axis: &str, grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::domain(format!(
            "{axis} grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("{axis} grid must be strictly increasing")));
    }
    if grid[0] < lo || grid[grid.len() - 1] > hi {
        return Err(Error::domain(format!(
            "{axis} grid [{}, {}] leaves the window [{lo}, {hi}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    Ok(())
}

/// Evaluation grid equally spaced in probability coordinates, mapped
/// through a marginal quantile function.
pub fn probability_grid(
    quantile: impl Fn(f64) -> Result<f64>,
    points: usize,
    eps: f64,
) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::domain(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    (0..points)
        .map(|k| {
            // convex combination lands exactly on eps and 1 - eps at the
            // ends, so grids never leave the window by roundoff
            let s = k as f64 / (points - 1) as f64;
            quantile((1.0 - s) * eps + s * (1.0 - eps))
        })
        .collect()
}

/// Builds the full table of rank laws over the given grids.
///
/// Each cell is an independent quadrature; cells are evaluated in parallel
/// but the result is bit-identical for any thread count, because no
/// floating-point reduction crosses cell boundaries.
pub fn build_table(
    model: &dyn BivariateModel,
    n: usize,
    grid_x: &[f64],
    grid_y: &[f64],
    spec: &QuadSpec,
) -> Result<ConcomitantCdfTable> {
    check_rank(1, n)?;
    let window = model.support_window(spec.window_eps)?;
    check_grid("x", grid_x, window.x_lo, window.x_hi)?;
    check_grid("y", grid_y, window.y_lo, window.y_hi)?;

    let gx = grid_x.len();
    let gy = grid_y.len();
    let t_upper: Vec<f64> = grid_x.iter().map(|&x| model.marginal_cdf_x(x)).collect();

    // collect_into_vec keeps cells in index order for any thread count;
    // collecting into Result directly would lose that guarantee
    let mut cells: Vec<Result<(f64, f64)>> = Vec::new();
    (0..n * gx * gy)
        .into_par_iter()
        .map(|idx| {
            let r = idx / (gx * gy) + 1;
            let ix = (idx / gy) % gx;
            let iy = idx % gy;
            rank_cdf_quad(
                model,
                r,
                n,
                t_upper[ix],
                grid_y[iy],
                spec.abs_tol,
                spec.max_panels,
            )
            .map(|q| (q.value, q.error_estimate))
            .map_err(|e| match e {
                Error::Accuracy {
                    requested,
                    achieved,
                    ..
                } => Error::Accuracy {
                    context: format!(
                        "table cell r={r}, x={}, y={}",
                        grid_x[ix], grid_y[iy]
                    ),
                    requested,
                    achieved,
                },
                other => other,
            })
        })
        .collect_into_vec(&mut cells);

    let mut values = Array3::zeros((n, gx, gy));
    let mut tol = 0.0f64;
    for (idx, cell) in cells.into_iter().enumerate() {
        let (v, e) = cell?;
        let r = idx / (gx * gy);
        let ix = (idx / gy) % gx;
        let iy = idx % gy;
        values[[r, ix, iy]] = v;
        tol = tol.max(e);
    }
    Ok(ConcomitantCdfTable {
        n,
        grid_x: grid_x.to_vec(),
        grid_y: grid_y.to_vec(),
        values,
        tol,
        model: model.descriptor(),
    })
}
