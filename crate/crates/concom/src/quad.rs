//! Numerical integration: adaptive Gauss-Legendre panels for the rank
//! integrals and a parabola-segment Simpson rule for grid integrals.

use crate::error::{Error, Result};

/// 15-point Gauss-Legendre nodes and weights on [-1, 1].
const GL15: [(f64, f64); 15] = [
    (-0.9879925180204854284896, 0.03075324199611726835463),
    (-0.9372733924007059043078, 0.07036604748810812470927),
    (-0.8482065834104272162006, 0.1071592204671719350119),
    (-0.7244177313601700474162, 0.1395706779261543144478),
    (-0.5709721726085388475372, 0.1662692058169939335532),
    (-0.3941513470775633698972, 0.1861610000155622110268),
    (-0.2011940939974345223006, 0.1984314853271115764561),
    (0.0, 0.2025782419255612728806),
    (0.2011940939974345223006, 0.1984314853271115764561),
    (0.3941513470775633698972, 0.1861610000155622110268),
    (0.5709721726085388475372, 0.1662692058169939335532),
    (0.7244177313601700474162, 0.1395706779261543144478),
    (0.8482065834104272162006, 0.1071592204671719350119),
    (0.9372733924007059043078, 0.07036604748810812470927),
    (0.9879925180204854284896, 0.03075324199611726835463),
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the per-panel |refined - coarse| estimates.
    pub error_estimate: f64,
    /// Number of accepted panels.
    pub panels: usize,
}

/// Fixed 15-point Gauss-Legendre rule on [a, b].
pub fn gauss_legendre_15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in &GL15 {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive composite Gauss-Legendre integration of `f` over [a, b].
///
/// Panels are bisected recursively until the |whole - halves| estimate on a
/// panel fits its share of `abs_tol`. Fails with an accuracy error if more
/// than `max_panels` leaf panels would be needed.
pub fn adaptive_gauss_legendre<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let whole = gauss_legendre_15(&mut f, a, b);
    let mut budget = max_panels;
    let mut state = Accum {
        value: 0.0,
        error: 0.0,
        panels: 0,
        exhausted: false,
    };
    bisect(&mut f, a, b, whole, abs_tol, &mut budget, &mut state);
    if state.exhausted {
        return Err(Error::Accuracy {
            context: format!("adaptive quadrature on [{a}, {b}]"),
            requested: abs_tol,
            achieved: state.error,
        });
    }
    Ok(QuadResult {
        value: state.value,
        error_estimate: state.error,
        panels: state.panels,
    })
}

struct Accum {
    value: f64,
    error: f64,
    panels: usize,
    exhausted: bool,
}

fn bisect<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    budget: &mut usize,
    state: &mut Accum,
) {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre_15(&mut *f, a, mid);
    let right = gauss_legendre_15(&mut *f, mid, b);
    let refined = left + right;
    let est = (refined - whole).abs();
    // the bisected pair must also be representable: below that width the
    // estimate can no longer improve
    let vanishing = mid <= a || mid >= b;
    if est <= tol || vanishing {
        state.value += refined;
        state.error += est;
        state.panels += 2;
        return;
    }
    if *budget < 2 {
        // no room to split further; count what we would have accepted
        state.value += refined;
        state.error += est;
        state.panels += 2;
        state.exhausted = true;
        return;
    }
    *budget -= 2;
    bisect(f, a, mid, left, 0.5 * tol, budget, state);
    bisect(f, mid, b, right, 0.5 * tol, budget, state);
}

/// Integral over [x0, x2] of the parabola through (x0,f0), (x1,f1), (x2,f2),
/// restricted to [lo, hi]. Exact for quadratics on arbitrary spacing.
fn parabola_segment(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64, lo: f64, hi: f64) -> f64 {
    // Lagrange basis integrated termwise.
    let int_basis = |xa: f64, xb: f64| {
        // integral of (x - xa)(x - xb) over [lo, hi]
        let prim = |x: f64| x * x * x / 3.0 - 0.5 * (xa + xb) * x * x + xa * xb * x;
        prim(hi) - prim(lo)
    };
    let l0 = int_basis(x1, x2) / ((x0 - x1) * (x0 - x2));
    let l1 = int_basis(x0, x2) / ((x1 - x0) * (x1 - x2));
    let l2 = int_basis(x0, x1) / ((x2 - x0) * (x2 - x1));
    f0 * l0 + f1 * l1 + f2 * l2
}

/// Composite Simpson rule on arbitrarily spaced, strictly increasing
/// abscissae. Pairs of intervals carry a quadratic; a trailing odd interval
/// integrates the parabola through the last three points over itself only.
pub fn simpson_irregular(x: &[f64], f: &[f64]) -> Result<f64> {
    if x.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: f.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::domain("simpson rule needs at least two abscissae"));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("simpson abscissae must be strictly increasing"));
    }
    if x.len() == 2 {
        return Ok(0.5 * (x[1] - x[0]) * (f[0] + f[1]));
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < x.len() {
        total += parabola_segment(x[i], x[i + 1], x[i + 2], f[i], f[i + 1], f[i + 2], x[i], x[i + 2]);
        i += 2;
    }
    if i + 1 < x.len() {
        // one interval left over; reuse the final triple on its last interval
        let k = x.len() - 3;
        total += parabola_segment(
            x[k],
            x[k + 1],
            x[k + 2],
            f[k],
            f[k + 1],
            f[k + 2],
            x[k + 1],
            x[k + 2],
        );
    }
    Ok(total)
}

/// Tensor-product Simpson integral of a grid function, `values[ix][iy]`
/// supplied through a closure. Integrates along y for each x, then along x.
pub fn simpson_grid_2d<F>(x: &[f64], y: &[f64], mut value: F) -> Result<f64>
where
    F: FnMut(usize, usize) -> f64,
{
    let mut rows = Vec::with_capacity(x.len());
    let mut col = vec![0.0; y.len()];
    for ix in 0..x.len() {
        for (iy, slot) in col.iter_mut().enumerate() {
            *slot = value(ix, iy);
        }
        rows.push(simpson_irregular(y, &col)?);
    }
    simpson_irregular(x, &rows)
}

/// 2D Simpson with a grid-refinement error estimate: the same integrand on
/// every other grid point. Requires odd point counts >= 3 on both axes so
/// the coarse grid shares its endpoints.
pub fn simpson_grid_2d_with_refinement<F>(x: &[f64], y: &[f64], mut value: F) -> Result<(f64, f64)>
where
    F: FnMut(usize, usize) -> f64,
{
    let full = simpson_grid_2d(x, y, &mut value)?;
    if x.len() < 5 || y.len() < 5 || x.len() % 2 == 0 || y.len() % 2 == 0 {
        // cannot halve; report the value with an unknown-but-bounded estimate
        return Ok((full, f64::NAN));
    }
    let xs: Vec<f64> = x.iter().copied().step_by(2).collect();
    let ys: Vec<f64> = y.iter().copied().step_by(2).collect();
    let coarse = simpson_grid_2d(&xs, &ys, |i, j| value(2 * i, 2 * j))?;
    Ok((full, (full - coarse).abs()))
}
