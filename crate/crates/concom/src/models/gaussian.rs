//! Standard bivariate normal model: X ~ N(0,1), Y | X = u ~ N(ρu, 1-ρ²),
//! so (X, Y) is bivariate normal with unit variances and correlation ρ.
//!
//! The joint cdf uses Genz's refinement of the Drezner-Wesolowsky scheme
//! (the scalar BVND routine from his tvpack collection), accurate to about
//! 5e-16. The unbounded support makes this the stress case for the
//! quantile-truncated windows used elsewhere.

use super::{draw_open01, BivariateModel, ModelDescriptor};
use crate::error::{Error, Result};
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
use rand::RngCore;

#[derive(Debug, Clone, Copy)]
pub struct GaussianConditional {
    rho: f64,
    sigma: f64,
}

impl GaussianConditional {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho.abs() < 1.0) {
            return Err(Error::domain(format!(
                "correlation must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(Self {
            rho,
            sigma: (1.0 - rho * rho).sqrt(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl BivariateModel for GaussianConditional {
    fn joint_cdf(&self, x: f64, y: f64) -> f64 {
        bvn_cdf(x, y, self.rho)
    }

    fn joint_pdf(&self, x: f64, y: f64) -> f64 {
        std_normal_pdf(x) * std_normal_pdf((y - self.rho * x) / self.sigma) / self.sigma
    }

    fn marginal_cdf_x(&self, x: f64) -> f64 {
        std_normal_cdf(x)
    }

    fn marginal_pdf_x(&self, x: f64) -> f64 {
        std_normal_pdf(x)
    }

    fn marginal_quantile_x(&self, t: f64) -> Result<f64> {
        std_normal_quantile(t)
    }

    fn marginal_cdf_y(&self, y: f64) -> f64 {
        std_normal_cdf(y)
    }

    fn marginal_quantile_y(&self, t: f64) -> Result<f64> {
        std_normal_quantile(t)
    }

    fn slice_integral(&self, u: f64, y: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::domain(format!(
                "slice integral requires finite u, got {u}"
            )));
        }
        Ok(std_normal_pdf(u) * self.conditional_cdf_y(u, y))
    }

    fn conditional_cdf_y(&self, u: f64, y: f64) -> f64 {
        if y == f64::INFINITY {
            return 1.0;
        }
        std_normal_cdf((y - self.rho * u) / self.sigma)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (f64, f64) {
        let x = std_normal_quantile(draw_open01(rng)).expect("open-interval draw");
        let z = std_normal_quantile(draw_open01(rng)).expect("open-interval draw");
        (x, self.rho * x + self.sigma * z)
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Gaussian { rho: self.rho }
    }
}

// Gauss-Legendre half node sets (weight, node) used by the sector integral;
// the loop mirrors each node about zero.
const GL6: [(f64, f64); 3] = [
    (0.171324492379170345, -0.932469514203152028),
    (0.360761573048138608, -0.661209386466264514),
    (0.467913934572691047, -0.238619186083196909),
];
const GL12: [(f64, f64); 6] = [
    (0.0471753363865118272, -0.981560634246719251),
    (0.106939325995318431, -0.904117256370474857),
    (0.160078328543346226, -0.769902674194304687),
    (0.203167426723065922, -0.587317954286617447),
    (0.233492536538354809, -0.367831498998180194),
    (0.249147045813402785, -0.125233408511468915),
];
const GL20: [(f64, f64); 10] = [
    (0.0176140071391521183, -0.993128599185094925),
    (0.0406014298003869413, -0.963971927277913791),
    (0.0626720483341090636, -0.912234428251325906),
    (0.0832767415767047487, -0.839116971822218823),
    (0.101930119817240435, -0.746331906460150793),
    (0.118194531961518417, -0.636053680726515025),
    (0.131688638449176627, -0.510867001950827098),
    (0.142096109318382051, -0.373706088715419561),
    (0.149172986472603747, -0.227785851141645078),
    (0.152753387130725851, -0.0765265211334973338),
];

/// Bivariate standard normal cdf P(X <= x, Y <= y) with correlation `rho`.
pub fn bvn_cdf(x: f64, y: f64, rho: f64) -> f64 {
    bvnd(-x, -y, rho).clamp(0.0, 1.0)
}

/// Genz's BVND: the upper-orthant probability P(X > dh, Y > dk).
fn bvnd(dh: f64, dk: f64, r: f64) -> f64 {
    let twopi = 2.0 * std::f64::consts::PI;
    let nodes: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };

    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        if r.abs() > 0.0 {
            let hs = (h * h + k * k) / 2.0;
            let asr = r.asin();
            for &(w, xn) in nodes {
                for is in [-1.0, 1.0] {
                    let sn = (asr * (is * xn + 1.0) / 2.0).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn = bvn * asr / (2.0 * twopi);
        }
        bvn + std_normal_cdf(-h) * std_normal_cdf(-k)
    } else {
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let a_sq = (1.0 - r) * (1.0 + r);
            let mut a = a_sq.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 16.0;
            let mut asr = -(bs / a_sq + hk) / 2.0;
            if asr > -100.0 {
                bvn = a * asr.exp()
                    * (1.0 - c * (bs - a_sq) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a_sq * a_sq / 5.0);
            }
            if -hk < 100.0 {
                let b = bs.sqrt();
                bvn -= (-hk / 2.0).exp()
                    * twopi.sqrt()
                    * std_normal_cdf(-b / a)
                    * b
                    * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for &(w, xn) in nodes {
                for is in [-1.0, 1.0] {
                    let xs = (a * (is * xn + 1.0)).powi(2);
                    let rs = (1.0 - xs).sqrt();
                    asr = -(bs / xs + hk) / 2.0;
                    if asr > -100.0 {
                        let sp = 1.0 + c * xs * (1.0 + d * xs);
                        let ep = (-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs;
                        bvn += a * w * asr.exp() * (ep - sp);
                    }
                }
            }
            bvn = -bvn / twopi;
        }
        if r > 0.0 {
            bvn + std_normal_cdf(-h.max(k))
        } else {
            bvn = -bvn;
            if k > h {
                bvn += std_normal_cdf(k) - std_normal_cdf(h);
            }
            bvn
        }
    }
}
