//! Product law with pluggable marginals: the degenerate dependence case,
//! where every rank's concomitant law factorizes.

use super::{draw_open01, BivariateModel, Marginal, ModelDescriptor};
use crate::error::{Error, Result};
use rand::RngCore;

#[derive(Debug, Clone, Copy)]
pub struct Independence {
    mx: Marginal,
    my: Marginal,
}

impl Independence {
    pub fn new(mx: Marginal, my: Marginal) -> Result<Self> {
        mx.validate()?;
        my.validate()?;
        Ok(Self { mx, my })
    }
}

impl BivariateModel for Independence {
    fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        self.mx.cdf(x) * self.my.cdf(y)
    }

    fn joint_pdf(&self, x: f64, y: f64) -> f64 {
        self.mx.pdf(x) * self.my.pdf(y)
    }

    fn marginal_cdf_x(&self, x: f64) -> f64 {
        self.mx.cdf(x)
    }

    fn marginal_pdf_x(&self, x: f64) -> f64 {
        self.mx.pdf(x)
    }

    fn marginal_quantile_x(&self, t: f64) -> Result<f64> {
        self.mx.quantile(t)
    }

    fn marginal_cdf_y(&self, y: f64) -> f64 {
        self.my.cdf(y)
    }

    fn marginal_quantile_y(&self, t: f64) -> Result<f64> {
        self.my.quantile(t)
    }

    fn slice_integral(&self, u: f64, y: f64) -> Result<f64> {
        if !self.mx.in_support(u) {
            return Err(Error::domain(format!(
                "slice integral requires u in the X support, got {u}"
            )));
        }
        Ok(self.mx.pdf(u) * self.my.cdf(y))
    }

    fn conditional_cdf_y(&self, _u: f64, y: f64) -> f64 {
        self.my.cdf(y)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        let x = self
            .mx
            .quantile(draw_open01(rng))
            .expect("open-interval draw");
        let y = self
            .my
            .quantile(draw_open01(rng))
            .expect("open-interval draw");
        (x, y)
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Independent {
            marginal_x: self.mx,
            marginal_y: self.my,
        }
    }
}
