//! Independent stochastic oracle for the rank-law engine: simulate
//! bivariate samples, sort by the first coordinate, pair each order
//! statistic with the Y-value it arrived with, and tally threshold events
//! on a grid.
//!
//! Reproducibility contract: replicate k draws from its own substream of a
//! counter-based generator keyed by (seed, k), so serial and parallel
//! execution — and any scheduling of either — produce identical counts.

use crate::concomitant::ConcomitantCdfTable;
use crate::error::{Error, Result};
use crate::models::BivariateModel;
use ndarray::Array3;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Counter-based substream for one replicate: the ChaCha stream word is the
/// replicate index, the key is the run seed.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// One draw from the model's sampling scheme.
pub fn sample_bivariate(model: &dyn BivariateModel, rng: &mut dyn RngCore) -> (f64, f64) {
    model.sample(rng)
}

/// Tallies of the events {X_{r:n} <= x_i, Y_[r:n] <= y_j} over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub seed: u64,
    pub reps: u64,
    pub n: usize,
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// Indexed [r - 1, ix, iy]; each entry is at most `reps`.
    pub counts: Array3<u64>,
}

fn check_grid(axis: &str, g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::Empty("simulation grid"));
    }
    if g.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "{axis} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// Runs `reps` replicates of: draw n iid pairs, sort by the x coordinate
/// (ties broken by original sample index), pair ranks with their carried
/// y values, and accumulate grid threshold counts.
pub fn run_simulation(
    model: &dyn BivariateModel,
    n: usize,
    reps: u64,
    seed: u64,
    grid_x: &[f64],
    grid_y: &[f64],
) -> Result<SimulationRun> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    if reps == 0 {
        return Err(Error::domain("replicate count must be at least 1"));
    }
    check_grid("x", grid_x)?;
    check_grid("y", grid_y)?;

    let gx = grid_x.len();
    let gy = grid_y.len();
    // corner histogram: one increment per (replicate, rank); the extra
    // bucket catches draws beyond the last grid point
    let zero = || Array3::<u64>::zeros((n, gx + 1, gy + 1));
    let hist = (0..reps)
        .into_par_iter()
        .fold(zero, |mut h, rep| {
            let mut rng = replicate_rng(seed, rep);
            let mut sample: Vec<(f64, f64, u64)> = (0..n as u64)
                .map(|i| {
                    let (x, y) = model.sample(&mut rng);
                    (x, y, i)
                })
                .collect();
            sample.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite draws")
                    .then(a.2.cmp(&b.2))
            });
            for (r, &(x, y, _)) in sample.iter().enumerate() {
                let px = grid_x.partition_point(|&g| g < x);
                let py = grid_y.partition_point(|&g| g < y);
                h[[r, px, py]] += 1;
            }
            h
        })
        .reduce(zero, |a, b| a + b);

    // prefix sums turn corner counts into threshold counts
    let mut counts = Array3::<u64>::zeros((n, gx, gy));
    for r in 0..n {
        for ix in 0..gx {
            for iy in 0..gy {
                let mut acc = hist[[r, ix, iy]];
                if ix > 0 {
                    acc += counts[[r, ix - 1, iy]];
                }
                if iy > 0 {
                    acc += counts[[r, ix, iy - 1]];
                }
                if ix > 0 && iy > 0 {
                    acc -= counts[[r, ix - 1, iy - 1]];
                }
                counts[[r, ix, iy]] = acc;
            }
        }
    }
    Ok(SimulationRun {
        seed,
        reps,
        n,
        grid_x: grid_x.to_vec(),
        grid_y: grid_y.to_vec(),
        counts,
    })
}

impl SimulationRun {
    /// Empirical cdf values counts/reps, indexed like `counts`.
    pub fn empirical_cdf(&self) -> Array3<f64> {
        self.counts.mapv(|c| c as f64 / self.reps as f64)
    }

    /// JSON audit record: seed, reps, grids, and the full count tensor.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct RunJson<'a> {
            seed: u64,
            reps: u64,
            n: usize,
            grid_x: &'a [f64],
            grid_y: &'a [f64],
            counts: Vec<Vec<Vec<u64>>>,
        }
        let counts = (0..self.n)
            .map(|r| {
                (0..self.grid_x.len())
                    .map(|ix| {
                        (0..self.grid_y.len())
                            .map(|iy| self.counts[[r, ix, iy]])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&RunJson {
            seed: self.seed,
            reps: self.reps,
            n: self.n,
            grid_x: &self.grid_x,
            grid_y: &self.grid_y,
            counts,
        })
        .expect("serializable run");
        s.push('\n');
        s
    }
}

/// Below this replicate count the binomial error bars are too wide to
/// resolve anything; comparisons still run but are flagged.
pub const RESOLUTION_REPS: u64 = 1000;

/// One (rank, grid point) comparison between simulation and quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCell {
    pub r: usize,
    pub x: f64,
    pub y: f64,
    pub empirical: f64,
    pub quadrature: f64,
    /// Binomial standard error sqrt(p̂(1-p̂)/reps), floored at 1/reps.
    pub stderr: f64,
    /// |empirical - quadrature| / stderr.
    pub z: f64,
}

/// Outcome of comparing a simulation against a quadrature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub cells: Vec<OracleCell>,
    pub within_three_sigma: usize,
    pub total: usize,
    pub coverage: f64,
    pub max_abs_z: f64,
    /// Pass rule: at least 95% of comparisons within three standard errors.
    pub pass: bool,
    /// Set when reps is too small for the comparison to resolve anything.
    pub resolution_warning: bool,
}

/// Compares empirical and quadrature rank laws cell by cell. The
/// simulation and the table must share grids and n.
pub fn compare_with_table(
    run: &SimulationRun,
    table: &ConcomitantCdfTable,
) -> Result<OracleComparison> {
    if run.n != table.n {
        return Err(Error::DimensionMismatch {
            expected: table.n,
            got: run.n,
        });
    }
    if run.grid_x != table.grid_x || run.grid_y != table.grid_y {
        return Err(Error::domain(
            "simulation and table grids must match exactly",
        ));
    }
    let emp = run.empirical_cdf();
    let mut cells = Vec::with_capacity(run.n * run.grid_x.len() * run.grid_y.len());
    let mut within = 0usize;
    let mut max_abs_z = 0.0f64;
    for r in 0..run.n {
        for (ix, &x) in run.grid_x.iter().enumerate() {
            for (iy, &y) in run.grid_y.iter().enumerate() {
                let p_hat = emp[[r, ix, iy]];
                let q = table.values[[r, ix, iy]];
                let se = (p_hat * (1.0 - p_hat) / run.reps as f64)
                    .sqrt()
                    .max(1.0 / run.reps as f64);
                let z = (p_hat - q).abs() / se;
                if z <= 3.0 {
                    within += 1;
                }
                max_abs_z = max_abs_z.max(z);
                cells.push(OracleCell {
                    r: r + 1,
                    x,
                    y,
                    empirical: p_hat,
                    quadrature: q,
                    stderr: se,
                    z,
                });
            }
        }
    }
    let total = cells.len();
    let coverage = within as f64 / total as f64;
    Ok(OracleComparison {
        cells,
        within_three_sigma: within,
        total,
        coverage,
        max_abs_z,
        pass: coverage >= 0.95,
        resolution_warning: run.reps < RESOLUTION_REPS,
    })
}
