//! Sampler validation against known dependence identities, plus the
//! simulation-vs-quadrature agreement check at desk scale.

use concom::concomitant::{build_table, probability_grid, QuadSpec};
use concom::models::{BivariateModel, FgmCopula, GaussianConditional};
use concom::montecarlo::{compare_with_table, replicate_rng, run_simulation, sample_bivariate};

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut r = vec![0.0; values.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = (rank + 1) as f64;
    }
    r
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..xs.len() {
        let a = rx[i] - mean;
        let b = ry[i] - mean;
        num += a * b;
        dx += a * a;
        dy += b * b;
    }
    num / (dx * dy).sqrt()
}

#[test]
fn fgm_sampler_reproduces_spearman_identity() {
    // rank correlation of the FGM family is theta / 3
    let model = FgmCopula::new(1.0).unwrap();
    let mut rng = replicate_rng(2024, 0);
    let draws = 1_000_000;
    let mut xs = Vec::with_capacity(draws);
    let mut ys = Vec::with_capacity(draws);
    for _ in 0..draws {
        let (x, y) = sample_bivariate(&model, &mut rng);
        xs.push(x);
        ys.push(y);
    }
    let rho_s = spearman(&xs, &ys);
    assert!(
        (rho_s - 1.0 / 3.0).abs() < 0.01,
        "spearman {rho_s} vs theta/3"
    );
}

#[test]
fn fgm_theta_zero_draws_are_independent_uniforms() {
    let model = FgmCopula::new(0.0).unwrap();
    let mut rng = replicate_rng(7, 0);
    let draws = 200_000;
    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut cross = 0.0;
    for _ in 0..draws {
        let (x, y) = sample_bivariate(&model, &mut rng);
        assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        sum_x += x;
        sum_y += y;
        cross += (x - 0.5) * (y - 0.5);
    }
    let n = draws as f64;
    assert!((sum_x / n - 0.5).abs() < 0.005);
    assert!((sum_y / n - 0.5).abs() < 0.005);
    // covariance of independent uniforms is 0, se ~ (1/12)/sqrt(n)
    assert!((cross / n).abs() < 4.0 / 12.0 / n.sqrt());
}

#[test]
fn gaussian_rho_zero_y_is_standard_normal() {
    let model = GaussianConditional::new(0.0).unwrap();
    let mut rng = replicate_rng(11, 0);
    let draws = 200_000;
    let mut mean = 0.0;
    let mut var = 0.0;
    for _ in 0..draws {
        let (_, y) = sample_bivariate(&model, &mut rng);
        mean += y;
        var += y * y;
    }
    let n = draws as f64;
    mean /= n;
    var = var / n - mean * mean;
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "var {var}");
}

#[test]
fn simulation_agrees_with_quadrature_at_three_sigma() {
    let spec = QuadSpec::default();
    let model = FgmCopula::new(0.5).unwrap();
    let eps = spec.window_eps;
    let gx = probability_grid(|t| model.marginal_quantile_x(t), 5, eps).unwrap();
    let gy = probability_grid(|t| model.marginal_quantile_y(t), 5, eps).unwrap();
    let table = build_table(&model, 3, &gx, &gy, &spec).unwrap();
    let run = run_simulation(&model, 3, 100_000, 31, &gx, &gy).unwrap();
    let cmp = compare_with_table(&run, &table).unwrap();
    assert!(cmp.pass, "coverage {} of {}", cmp.coverage, cmp.total);
    assert!(!cmp.resolution_warning);

    // the frozen example point: quadrature 0.294912 at (0.8, 0.6), r=n=3
    let m2 = FgmCopula::new(0.5).unwrap();
    let run2 = run_simulation(&m2, 3, 1_000_000, 17, &[0.8], &[0.6]).unwrap();
    let emp = run2.empirical_cdf()[[2, 0, 0]];
    let se = (0.294912f64 * (1.0 - 0.294912) / 1_000_000.0).sqrt();
    assert!(
        (emp - 0.294912).abs() <= 3.0 * se,
        "empirical {emp} vs 0.294912 (3se = {:.2e})",
        3.0 * se
    );
}

#[test]
fn tiny_reps_flag_resolution_warning_but_still_compare() {
    let spec = QuadSpec::default();
    let model = FgmCopula::new(0.5).unwrap();
    let gx = probability_grid(|t| model.marginal_quantile_x(t), 3, spec.window_eps).unwrap();
    let table = build_table(&model, 2, &gx, &gx, &spec).unwrap();
    let run = run_simulation(&model, 2, 10, 1, &gx, &gx).unwrap();
    let cmp = compare_with_table(&run, &table).unwrap();
    assert!(cmp.resolution_warning);
    // wide error bars make the comparison vacuously agreeable
    assert!(cmp.pass);
}
