//! Univariate marginal laws for the independence model.

use crate::error::{Error, Result};
use crate::special;
use serde::{Deserialize, Serialize};

/// Marginal law selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase", deny_unknown_fields)]
pub enum Marginal {
    Uniform,
    Exponential { rate: f64 },
    StdNormal,
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        if let Marginal::Exponential { rate } = self {
            if !(rate.is_finite() && *rate > 0.0) {
                return Err(Error::domain(format!(
                    "exponential rate must be positive, got {rate}"
                )));
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Uniform => x.clamp(0.0, 1.0),
            Marginal::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Marginal::StdNormal => special::std_normal_cdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Marginal::StdNormal => special::std_normal_pdf(x),
        }
    }

    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::domain(format!(
                "quantile requires t in (0,1), got {t}"
            )));
        }
        match self {
            Marginal::Uniform => Ok(t),
            Marginal::Exponential { rate } => Ok(-(-t).ln_1p() / rate),
            Marginal::StdNormal => special::std_normal_quantile(t),
        }
    }

    /// True when u can carry positive density.
    pub fn in_support(&self, u: f64) -> bool {
        match self {
            Marginal::Uniform => (0.0..=1.0).contains(&u),
            Marginal::Exponential { .. } => u >= 0.0,
            Marginal::StdNormal => u.is_finite(),
        }
    }
}
