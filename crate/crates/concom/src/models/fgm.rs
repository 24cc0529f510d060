//! Farlie-Gumbel-Morgenstern copula with uniform marginals.
//!
//! C(u, v) = uv(1 + θ(1-u)(1-v)) on the unit square, |θ| <= 1. The slice
//! integral and conditional cdf coincide because the X marginal density is
//! one on [0, 1].

use super::{draw_open01, BivariateModel, ModelDescriptor};
use crate::error::{Error, Result};
use rand::RngCore;

#[derive(Debug, Clone, Copy)]
pub struct FgmCopula {
    theta: f64,
}

impl FgmCopula {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (-1.0..=1.0).contains(&theta)) {
            return Err(Error::domain(format!(
                "FGM dependence parameter must lie in [-1, 1], got {theta}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Conditional quantile of V given U = u, by the stable quadratic root.
    ///
    /// Solves v + A v(1-v) = w with A = θ(1-2u); the near-independence
    /// branch degenerates to the linear limit v = w.
    pub fn conditional_quantile_v(&self, u: f64, w: f64) -> f64 {
        let a = self.theta * (1.0 - 2.0 * u);
        if a.abs() < 1e-12 {
            return w;
        }
        // citardauq form keeps the subtraction cancellation-free
        let b = 1.0 + a;
        2.0 * w / (b + (b * b - 4.0 * a * w).sqrt())
    }
}

impl BivariateModel for FgmCopula {
    fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        let u = x.clamp(0.0, 1.0);
        let v = y.clamp(0.0, 1.0);
        u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v))
    }

    fn joint_pdf(&self, x: f64, y: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return 0.0;
        }
        1.0 + self.theta * (1.0 - 2.0 * x) * (1.0 - 2.0 * y)
    }

    fn marginal_cdf_x(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    fn marginal_pdf_x(&self, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    }

    fn marginal_quantile_x(&self, t: f64) -> Result<f64> {
        super::Marginal::Uniform.quantile(t)
    }

    fn marginal_cdf_y(&self, y: f64) -> f64 {
        y.clamp(0.0, 1.0)
    }

    fn marginal_quantile_y(&self, t: f64) -> Result<f64> {
        super::Marginal::Uniform.quantile(t)
    }

    fn slice_integral(&self, u: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(format!(
                "slice integral requires u in the unit interval, got {u}"
            )));
        }
        Ok(self.conditional_cdf_y(u, y))
    }

    fn conditional_cdf_y(&self, u: f64, y: f64) -> f64 {
        let v = y.clamp(0.0, 1.0);
        v + self.theta * (1.0 - 2.0 * u) * v * (1.0 - v)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        let u = draw_open01(rng);
        let w = draw_open01(rng);
        (u, self.conditional_quantile_v(u, w))
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Fgm { theta: self.theta }
    }
}
