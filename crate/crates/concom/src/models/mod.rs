//! Absolutely continuous bivariate laws feeding the rank-integral engine.
//!
//! Each model supplies its joint cdf/pdf, the X-marginal cdf/quantile pair,
//! the slice integral G(u, y) = ∫_{-∞}^{y} f(u, v) dv, and the conditional
//! cdf of Y given X = u. The conditional cdf is what the rank integral
//! consumes after the probability-scale substitution: it equals
//! G(u, y) / f_X(u) wherever the marginal density is positive.

mod fgm;
mod gaussian;
mod independence;
mod marginal;

pub use fgm::FgmCopula;
pub use gaussian::{bvn_cdf, GaussianConditional};
pub use independence::Independence;
pub use marginal::Marginal;

use crate::error::{Error, Result};
use rand::RngCore;
use serde::{Deserialize, Serialize};

/// Quantile-truncated evaluation rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Window {
    pub fn clamp_x(&self, x: f64) -> f64 {
        x.clamp(self.x_lo, self.x_hi)
    }

    pub fn clamp_y(&self, y: f64) -> f64 {
        y.clamp(self.y_lo, self.y_hi)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_lo..=self.x_hi).contains(&x) && (self.y_lo..=self.y_hi).contains(&y)
    }
}

/// A pluggable absolutely continuous bivariate distribution.
pub trait BivariateModel: Send + Sync {
    /// F(x, y) = P(X <= x, Y <= y).
    fn joint_cdf(&self, x: f64, y: f64) -> f64;

    /// Joint density f(x, y); zero outside the support.
    fn joint_pdf(&self, x: f64, y: f64) -> f64;

    /// F_X(x).
    fn marginal_cdf_x(&self, x: f64) -> f64;

    /// f_X(x).
    fn marginal_pdf_x(&self, x: f64) -> f64;

    /// Exact inverse of the X-marginal cdf on t in (0, 1).
    fn marginal_quantile_x(&self, t: f64) -> Result<f64>;

    /// F_Y(y).
    fn marginal_cdf_y(&self, y: f64) -> f64;

    /// Exact inverse of the Y-marginal cdf on t in (0, 1).
    fn marginal_quantile_y(&self, t: f64) -> Result<f64>;

    /// Slice integral G(u, y) = ∫_{-∞}^{y} f(u, v) dv, the partial
    /// x-derivative of the joint cdf. `y = +∞` yields the X-marginal
    /// density at u. Errors when u lies outside the X support.
    fn slice_integral(&self, u: f64, y: f64) -> Result<f64>;

    /// Conditional cdf P(Y <= y | X = u). Callers must keep u inside the
    /// open X support; quantile outputs always qualify.
    fn conditional_cdf_y(&self, u: f64, y: f64) -> f64;

    /// Draw one (x, y) pair by inverse transform, so the number of RNG
    /// words consumed per pair is fixed.
    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64);

    /// Serializable identity of the model, for run manifests.
    fn descriptor(&self) -> ModelDescriptor;

    /// The per-coordinate quantile box [F^{-1}(eps), F^{-1}(1 - eps)].
    fn support_window(&self, eps: f64) -> Result<Window> {
        if !(eps > 0.0 && eps <= 0.01) {
            return Err(Error::domain(format!(
                "window epsilon must lie in (0, 0.01], got {eps}"
            )));
        }
        Ok(Window {
            x_lo: self.marginal_quantile_x(eps)?,
            x_hi: self.marginal_quantile_x(1.0 - eps)?,
            y_lo: self.marginal_quantile_y(eps)?,
            y_hi: self.marginal_quantile_y(1.0 - eps)?,
        })
    }
}

/// Serializable model selector with parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelDescriptor {
    Fgm {
        theta: f64,
    },
    Independent {
        marginal_x: Marginal,
        marginal_y: Marginal,
    },
    Gaussian {
        rho: f64,
    },
}

impl ModelDescriptor {
    /// Constructs the described model, validating its parameters.
    pub fn build(&self) -> Result<Box<dyn BivariateModel>> {
        match self {
            ModelDescriptor::Fgm { theta } => Ok(Box::new(FgmCopula::new(*theta)?)),
            ModelDescriptor::Independent {
                marginal_x,
                marginal_y,
            } => Ok(Box::new(Independence::new(*marginal_x, *marginal_y)?)),
            ModelDescriptor::Gaussian { rho } => Ok(Box::new(GaussianConditional::new(*rho)?)),
        }
    }
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn draw_open01(rng: &mut dyn RngCore) -> f64 {
    use rand::Rng;
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}
