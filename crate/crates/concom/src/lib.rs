//! Joint distributions of order statistics and their concomitants for
//! bivariate models, with majorization-weighted mixture envelopes that
//! sandwich the underlying cdf.
//!
//! The crate is organized around a pipeline:
//!
//! * [`models`] supplies pluggable bivariate laws (an FGM copula, a
//!   product law with selectable marginals, and a bivariate normal),
//! * [`concomitant`] integrates the rank law F_{r:n}(x, y) of the r-th
//!   order statistic of X together with its concomitant Y-value, and
//!   caches grids of those values,
//! * [`majorization`] provides the ordered-probability-vector machinery
//!   and the flattening weight family p_i(m),
//! * [`envelope`] mixes rank laws into lower/upper envelopes of the true
//!   cdf and measures their gap,
//! * [`montecarlo`] re-derives the same rank laws empirically from
//!   reproducible simulation, as an independent cross-check.

pub mod concomitant;
pub mod envelope;
pub mod error;
pub mod majorization;
pub mod models;
pub mod montecarlo;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
