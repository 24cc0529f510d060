//! Vector-ordering predicates and the flattening weight family that drives
//! the envelope mixtures.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute tolerance for partial-sum and total-sum comparisons. The weight
/// constructions stay well inside double precision at the sizes we support,
/// so a fixed absolute cut is adequate.
pub const SUM_TOL: f64 = 1e-12;

/// A nonincreasing probability vector: nonnegative entries, summing to one.
///
/// These are the mixing weights of the envelope module; the constructor
/// enforces the full invariant set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Validates and wraps a candidate weight vector.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("weight vector"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Weights(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Weights(format!(
                "entries sum to {total}, expected 1 within {SUM_TOL:e}"
            )));
        }
        if weights.windows(2).any(|w| w[0] < w[1] - SUM_TOL) {
            return Err(Error::Weights("entries must be nonincreasing".into()));
        }
        Ok(Self { weights })
    }

    /// The uniform vector (1/n, ..., 1/n).
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("weight vector"));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.weights
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// True iff `a` is majorized by `b` (a ≺ b): after sorting both in
/// decreasing order, every partial sum of `a` is at most the matching
/// partial sum of `b`, and the totals agree. Inputs need not be sorted.
pub fn is_majorized_by(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("majorization operand"));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut da = a.to_vec();
    let mut db = b.to_vec();
    da.sort_by(|p, q| q.partial_cmp(p).expect("non-finite entry"));
    db.sort_by(|p, q| q.partial_cmp(p).expect("non-finite entry"));
    let mut sa = 0.0;
    let mut sb = 0.0;
    for k in 0..da.len() - 1 {
        sa += da[k];
        sb += db[k];
        if sa > sb + SUM_TOL {
            return Ok(false);
        }
    }
    sa += da[da.len() - 1];
    sb += db[db.len() - 1];
    Ok((sa - sb).abs() <= SUM_TOL)
}

/// True iff `v` is nonnegative, nonincreasing, and sums to one: the ordered
/// probability vectors that may serve as envelope weights.
pub fn is_ordered_prob_vector(v: &[f64]) -> Result<bool> {
    if v.is_empty() {
        return Err(Error::Empty("vector"));
    }
    Ok(WeightVector::new(v.to_vec()).is_ok())
}

/// The flattening weight family: entry i is (m + n - i + 1) / a, with the
/// normalizer a = n*m + n(n+1)/2 accumulated in integer arithmetic.
///
/// Strictly decreasing for n >= 2, and tending entrywise to 1/n as m grows.
pub fn weight_sequence(n: usize, m: u64) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::Empty("weight vector"));
    }
    if n > 64 {
        return Err(Error::domain(format!("sample size {n} exceeds supported 64")));
    }
    let n_u = n as u64;
    let norm = n_u * m + n_u * (n_u + 1) / 2;
    let weights = (1..=n_u)
        .map(|i| (m + n_u - i + 1) as f64 / norm as f64)
        .collect();
    WeightVector::new(weights)
}
