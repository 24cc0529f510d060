//! Mixtures of rank laws that sandwich the joint cdf, the nesting order
//! between mixtures of comparable weight vectors, and the L1 gap metrics
//! that quantify how fast the sandwich closes as the weights flatten.

use crate::concomitant::ConcomitantCdfTable;
use crate::error::{Error, Result};
use crate::majorization::{is_majorized_by, weight_sequence, WeightVector};
use crate::models::BivariateModel;
use crate::quad::simpson_grid_2d_with_refinement;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Slack granted to pointwise inequality checks for accumulated quadrature
/// error.
pub const INEQUALITY_SLACK: f64 = 1e-8;

/// Violations beyond this are treated as logic errors, not float noise.
pub const HARD_VIOLATION: f64 = 1e-6;

fn check_weight_len(table: &ConcomitantCdfTable, p: &WeightVector) -> Result<()> {
    if p.len() != table.n {
        return Err(Error::DimensionMismatch {
            expected: table.n,
            got: p.len(),
        });
    }
    Ok(())
}

/// Upper mixture K(x, y) = Σ_i p_i F_{i:n}(x, y) on the table grid.
pub fn upper_envelope(table: &ConcomitantCdfTable, p: &WeightVector) -> Result<Array2<f64>> {
    check_weight_len(table, p)?;
    let mut acc = Array2::zeros((table.grid_x.len(), table.grid_y.len()));
    for i in 1..=table.n {
        acc.scaled_add(p[i - 1], &table.rank_values(i)?);
    }
    Ok(acc)
}

/// Lower mixture H(x, y) = Σ_i p_i F_{n-i+1:n}(x, y) on the table grid.
pub fn lower_envelope(table: &ConcomitantCdfTable, p: &WeightVector) -> Result<Array2<f64>> {
    check_weight_len(table, p)?;
    let mut acc = Array2::zeros((table.grid_x.len(), table.grid_y.len()));
    for i in 1..=table.n {
        acc.scaled_add(p[i - 1], &table.rank_values(table.n - i + 1)?);
    }
    Ok(acc)
}

/// Joint cdf of the model sampled on the table grid.
pub fn truth_grid(model: &dyn BivariateModel, grid_x: &[f64], grid_y: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((grid_x.len(), grid_y.len()), |(ix, iy)| {
        model.joint_cdf(grid_x[ix], grid_y[iy])
    })
}

/// An L1 integral together with its grid-refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Estimate {
    pub value: f64,
    /// |full-grid - half-grid| Simpson difference; NaN when the grid
    /// cannot be halved.
    pub refinement_error: f64,
}

/// L1 distance between the envelopes over the evaluation window,
/// by tensor Simpson on the (possibly unevenly spaced) grid.
///
/// When `requested_tol` is given, a refinement estimate above it is an
/// accuracy error: the grid is too coarse to certify the tolerance.
pub fn l1_gap(
    grid_x: &[f64],
    grid_y: &[f64],
    upper: &Array2<f64>,
    lower: &Array2<f64>,
    requested_tol: Option<f64>,
) -> Result<L1Estimate> {
    let (value, refinement_error) = simpson_grid_2d_with_refinement(grid_x, grid_y, |ix, iy| {
        (upper[[ix, iy]] - lower[[ix, iy]]).abs()
    })?;
    if let Some(tol) = requested_tol {
        if !(refinement_error <= tol) {
            return Err(Error::Accuracy {
                context: "L1 gap grid refinement".into(),
                requested: tol,
                achieved: refinement_error,
            });
        }
    }
    Ok(L1Estimate {
        value,
        refinement_error,
    })
}

/// The rank-distance constant: Σ_i ∬ |F_{i:n} - F_{n-i+1:n}| dx dy over the
/// table window, with the same grid rule as [`l1_gap`].
pub fn c_n_constant(table: &ConcomitantCdfTable) -> Result<L1Estimate> {
    let mut value = 0.0;
    let mut refinement = 0.0;
    for i in 1..=table.n {
        let a = table.rank_values(i)?;
        let b = table.rank_values(table.n - i + 1)?;
        let (v, e) = simpson_grid_2d_with_refinement(&table.grid_x, &table.grid_y, |ix, iy| {
            (a[[ix, iy]] - b[[ix, iy]]).abs()
        })?;
        value += v;
        if e.is_finite() {
            refinement += e;
        } else {
            refinement = f64::NAN;
        }
    }
    Ok(L1Estimate {
        value,
        refinement_error: refinement,
    })
}

/// The closed-form gap bound (p_1(m) - 1/n) c_n.
pub fn gap_bound(n: usize, m: u64, c_n: f64) -> Result<f64> {
    let p = weight_sequence(n, m)?;
    Ok((p[0] - 1.0 / n as f64) * c_n)
}

/// Pointwise envelopes around the true cdf for one sweep index, with gap
/// diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePair {
    /// Sweep label: the m whose weight family produced the mixtures.
    pub m: u64,
    pub lower: Array2<f64>,
    pub upper: Array2<f64>,
    pub truth: Array2<f64>,
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// sup over the grid of (upper - lower).
    pub max_gap: f64,
    /// L1 distance between the envelopes over the window.
    pub l1_gap: L1Estimate,
}

impl EnvelopePair {
    /// Assembles the pair from a table, the sampled truth, and weights.
    pub fn build(
        table: &ConcomitantCdfTable,
        truth: &Array2<f64>,
        p: &WeightVector,
        m: u64,
    ) -> Result<Self> {
        if truth.dim() != (table.grid_x.len(), table.grid_y.len()) {
            return Err(Error::DimensionMismatch {
                expected: table.grid_x.len() * table.grid_y.len(),
                got: truth.len(),
            });
        }
        let lower = lower_envelope(table, p)?;
        let upper = upper_envelope(table, p)?;
        let max_gap = upper
            .iter()
            .zip(lower.iter())
            .map(|(u, l)| u - l)
            .fold(f64::NEG_INFINITY, f64::max);
        let l1 = l1_gap(&table.grid_x, &table.grid_y, &upper, &lower, None)?;
        Ok(Self {
            m,
            lower,
            upper,
            truth: truth.clone(),
            grid_x: table.grid_x.clone(),
            grid_y: table.grid_y.clone(),
            max_gap,
            l1_gap: l1,
        })
    }

    /// For the flattening family: weights derived from (n, m).
    pub fn for_sweep(
        table: &ConcomitantCdfTable,
        truth: &Array2<f64>,
        m: u64,
    ) -> Result<Self> {
        let p = weight_sequence(table.n, m)?;
        Self::build(table, truth, &p, m)
    }

    /// CSV rows `x,y,H,F,K,gap` in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,H,F,K,gap\n");
        for (ix, x) in self.grid_x.iter().enumerate() {
            for (iy, y) in self.grid_y.iter().enumerate() {
                let h = self.lower[[ix, iy]];
                let f = self.truth[[ix, iy]];
                let k = self.upper[[ix, iy]];
                out.push_str(&format!("{},{},{},{},{},{}\n", x, y, h, f, k, k - h));
            }
        }
        out
    }
}

/// Verdict of the pointwise sandwich H <= F <= K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// max over the grid of (H - F); positive means the lower envelope poked above.
    pub max_lower_violation: f64,
    /// max over the grid of (F - K).
    pub max_upper_violation: f64,
    pub slack: f64,
    pub pass: bool,
    /// true when some violation exceeds the hard threshold, indicating a
    /// logic error rather than accumulated roundoff.
    pub hard_fail: bool,
}

/// Checks H <= F <= K pointwise within [`INEQUALITY_SLACK`].
pub fn sandwich_check(pair: &EnvelopePair) -> SandwichReport {
    let mut lower_v = f64::NEG_INFINITY;
    let mut upper_v = f64::NEG_INFINITY;
    for ((l, f), k) in pair
        .lower
        .iter()
        .zip(pair.truth.iter())
        .zip(pair.upper.iter())
    {
        lower_v = lower_v.max(l - f);
        upper_v = upper_v.max(f - k);
    }
    let worst = lower_v.max(upper_v);
    SandwichReport {
        max_lower_violation: lower_v,
        max_upper_violation: upper_v,
        slack: INEQUALITY_SLACK,
        pass: worst <= INEQUALITY_SLACK,
        hard_fail: worst > HARD_VIOLATION,
    }
}

/// Verdict of the four-term nesting chain for p majorized by q:
/// H_q <= H_p <= F <= K_p <= K_q pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub max_lower_order_violation: f64,
    pub max_lower_truth_violation: f64,
    pub max_upper_truth_violation: f64,
    pub max_upper_order_violation: f64,
    pub slack: f64,
    pub pass: bool,
    pub hard_fail: bool,
}

/// Checks the nesting chain. Precondition: p ≺ q, both ordered probability
/// vectors of the table's length; violations are contract errors.
pub fn nesting_check(
    table: &ConcomitantCdfTable,
    truth: &Array2<f64>,
    p: &WeightVector,
    q: &WeightVector,
) -> Result<NestingReport> {
    check_weight_len(table, p)?;
    check_weight_len(table, q)?;
    if !is_majorized_by(p.as_slice(), q.as_slice())? {
        return Err(Error::Precondition(
            "nesting requires p to be majorized by q".into(),
        ));
    }
    let h_p = lower_envelope(table, p)?;
    let h_q = lower_envelope(table, q)?;
    let k_p = upper_envelope(table, p)?;
    let k_q = upper_envelope(table, q)?;
    let mut v1 = f64::NEG_INFINITY;
    let mut v2 = f64::NEG_INFINITY;
    let mut v3 = f64::NEG_INFINITY;
    let mut v4 = f64::NEG_INFINITY;
    for idx in 0..truth.len() {
        let f = truth.as_slice().expect("standard layout")[idx];
        let hp = h_p.as_slice().expect("standard layout")[idx];
        let hq = h_q.as_slice().expect("standard layout")[idx];
        let kp = k_p.as_slice().expect("standard layout")[idx];
        let kq = k_q.as_slice().expect("standard layout")[idx];
        v1 = v1.max(hq - hp);
        v2 = v2.max(hp - f);
        v3 = v3.max(f - kp);
        v4 = v4.max(kp - kq);
    }
    let worst = v1.max(v2).max(v3).max(v4);
    Ok(NestingReport {
        max_lower_order_violation: v1,
        max_lower_truth_violation: v2,
        max_upper_truth_violation: v3,
        max_upper_order_violation: v4,
        slack: INEQUALITY_SLACK,
        pass: worst <= INEQUALITY_SLACK,
        hard_fail: worst > HARD_VIOLATION,
    })
}

/// One row of a convergence sweep, as emitted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub m: u64,
    pub max_gap: f64,
    pub l1_gap: f64,
    pub gap_bound: f64,
}

/// JSON summary of one envelope evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSummary {
    pub m: u64,
    pub max_gap: f64,
    pub l1_gap: f64,
    pub gap_bound: f64,
    pub c_n: f64,
}
