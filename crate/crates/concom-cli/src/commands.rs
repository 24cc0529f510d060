//! Command implementations. Every command is deterministic given its
//! config: identical bytes on re-runs and for any worker thread count.

use crate::config::{OutputFormat, ScenarioConfig};
use crate::CliError;
use concom::concomitant::{
    build_table, concomitant_joint_cdf, order_stat_cdf, probability_grid, ConcomitantCdfTable,
    QuadSpec,
};
use concom::envelope::{
    c_n_constant, gap_bound, lower_envelope, nesting_check, sandwich_check, truth_grid,
    upper_envelope, EnvelopePair, EnvelopeSummary, SweepPoint, INEQUALITY_SLACK,
};
use concom::majorization::{weight_sequence, WeightVector};
use concom::models::{BivariateModel, ModelDescriptor};
use concom::montecarlo::{compare_with_table, run_simulation, OracleComparison};
use ndarray::Array2;
use serde::Serialize;
use std::path::PathBuf;

/// Slack granted to the L1 rate inequality for quadrature and grid error.
pub const RATE_SLACK: f64 = 1e-6;

/// A fully resolved run: config plus the constructed model and grids.
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub model: Box<dyn BivariateModel>,
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    pub spec: QuadSpec,
}

impl Scenario {
    pub fn new(cfg: ScenarioConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let model = cfg.model.build()?;
        let spec = cfg.quad_spec();
        let grid_x = match &cfg.grid.x {
            Some(g) => g.clone(),
            None => probability_grid(|t| model.marginal_quantile_x(t), cfg.grid.nx, cfg.epsilon)?,
        };
        let grid_y = match &cfg.grid.y {
            Some(g) => g.clone(),
            None => probability_grid(|t| model.marginal_quantile_y(t), cfg.grid.ny, cfg.epsilon)?,
        };
        Ok(Self {
            cfg,
            model,
            grid_x,
            grid_y,
            spec,
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let dir = &self.cfg.output.dir;
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.clone(),
            source: e,
        })?;
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
        Ok(path)
    }

    fn format(&self) -> OutputFormat {
        self.cfg.output.format
    }

    fn table(&self) -> Result<ConcomitantCdfTable, CliError> {
        Ok(build_table(
            self.model.as_ref(),
            self.cfg.n,
            &self.grid_x,
            &self.grid_y,
            &self.spec,
        )?)
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// `envelope`: emit the H/F/K grids and the gap summary for one m.
pub fn cmd_envelope(sc: &Scenario, m: u64) -> Result<bool, CliError> {
    let table = sc.table()?;
    let truth = truth_grid(sc.model.as_ref(), &sc.grid_x, &sc.grid_y);
    let pair = EnvelopePair::for_sweep(&table, &truth, m)?;
    let c_n = c_n_constant(&table)?;
    let summary = EnvelopeSummary {
        m,
        max_gap: pair.max_gap,
        l1_gap: pair.l1_gap.value,
        gap_bound: gap_bound(table.n, m, c_n.value)?,
        c_n: c_n.value,
    };
    if sc.format().wants_csv() {
        sc.write(&format!("envelope_m{m}.csv"), &pair.to_csv())?;
        sc.write("table.csv", &table.to_csv())?;
    }
    if sc.format().wants_json() {
        sc.write(&format!("envelope_m{m}.json"), &json_line(&summary))?;
        sc.write("table.json", &table.to_json_meta())?;
    }
    println!(
        "envelope m={m}: max_gap={} l1_gap={} bound={}",
        summary.max_gap, summary.l1_gap, summary.gap_bound
    );
    Ok(true)
}

/// `converge`: sweep m and emit (m, max_gap, l1_gap, gap_bound) rows,
/// asserting the L1 gap stays under its bound.
pub fn cmd_converge(sc: &Scenario) -> Result<bool, CliError> {
    if sc.cfg.m_sweep.is_empty() {
        return Err(CliError::Config("m_sweep must be nonempty".into()));
    }
    let table = sc.table()?;
    let truth = truth_grid(sc.model.as_ref(), &sc.grid_x, &sc.grid_y);
    let c_n = c_n_constant(&table)?;
    let mut rows = Vec::with_capacity(sc.cfg.m_sweep.len());
    let mut pass = true;
    for &m in &sc.cfg.m_sweep {
        let pair = EnvelopePair::for_sweep(&table, &truth, m)?;
        let row = SweepPoint {
            m,
            max_gap: pair.max_gap,
            l1_gap: pair.l1_gap.value,
            gap_bound: gap_bound(table.n, m, c_n.value)?,
        };
        pass &= row.l1_gap <= row.gap_bound + RATE_SLACK;
        rows.push(row);
    }

    if sc.format().wants_csv() {
        let mut csv = String::from("m,max_gap,l1_gap,gap_bound\n");
        for r in &rows {
            csv.push_str(&format!("{},{},{},{}\n", r.m, r.max_gap, r.l1_gap, r.gap_bound));
        }
        sc.write("converge.csv", &csv)?;
    }
    if sc.format().wants_json() {
        #[derive(Serialize)]
        struct ConvergeReport<'a> {
            model: &'a ModelDescriptor,
            n: usize,
            /// Integration window of every L1 value in `rows`.
            window: concom::models::Window,
            c_n: f64,
            rate_slack: f64,
            rows: &'a [SweepPoint],
            pass: bool,
        }
        sc.write(
            "converge.json",
            &json_line(&ConvergeReport {
                model: &sc.cfg.model,
                n: sc.cfg.n,
                window: sc.model.support_window(sc.cfg.epsilon)?,
                c_n: c_n.value,
                rate_slack: RATE_SLACK,
                rows: &rows,
                pass,
            }),
        )?;
    }
    for r in &rows {
        println!(
            "converge m={}: max_gap={} l1_gap={} bound={}",
            r.m, r.max_gap, r.l1_gap, r.gap_bound
        );
    }
    Ok(pass)
}

/// One named check in the verify report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// The measured worst violation or deviation.
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn measured(name: impl Into<String>, metric: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            metric,
            tolerance,
            pass: metric <= tolerance,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, detail: String) -> Self {
        Self {
            name: name.into(),
            metric: f64::NAN,
            tolerance: 0.0,
            pass: false,
            detail: Some(detail),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub model: ModelDescriptor,
    pub n: usize,
    pub m_sweep: Vec<u64>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// `verify`: run the full invariant suite against one scenario.
pub fn cmd_verify(sc: &Scenario) -> Result<bool, CliError> {
    let n = sc.cfg.n;
    let table = sc.table()?;
    let truth = truth_grid(sc.model.as_ref(), &sc.grid_x, &sc.grid_y);
    let mut checks = Vec::new();

    // mixture identity: the rank average reproduces the joint cdf
    let mut worst = f64::NEG_INFINITY;
    for ix in 0..sc.grid_x.len() {
        for iy in 0..sc.grid_y.len() {
            let avg: f64 = (1..=n)
                .map(|r| table.values[[r - 1, ix, iy]])
                .sum::<f64>()
                / n as f64;
            worst = worst.max((avg - truth[[ix, iy]]).abs());
        }
    }
    checks.push(CheckResult::measured("mixture_identity", worst, 1e-8));

    // rank ordering: F_{r+1:n} <= F_{r:n} pointwise
    let mut worst = f64::NEG_INFINITY;
    for r in 1..n {
        for ix in 0..sc.grid_x.len() {
            for iy in 0..sc.grid_y.len() {
                worst = worst.max(table.values[[r, ix, iy]] - table.values[[r - 1, ix, iy]]);
            }
        }
    }
    checks.push(CheckResult::measured("rank_ordering", worst.max(0.0), 1e-9));

    // marginalization: the y → ∞ limit is the order-statistic cdf
    let mut worst = f64::NEG_INFINITY;
    for r in 1..=n {
        for &x in &sc.grid_x {
            let limit =
                concomitant_joint_cdf(sc.model.as_ref(), r, n, x, f64::INFINITY, &sc.spec)?;
            let direct = order_stat_cdf(sc.model.as_ref(), r, n, x)?;
            worst = worst.max((limit - direct).abs());
        }
    }
    checks.push(CheckResult::measured("marginalization", worst, 1e-8));

    // sandwich per sweep index, honoring the tamper hook
    for &m in &sc.cfg.m_sweep {
        let name = format!("sandwich_m{m}");
        let weights = match &sc.cfg.override_weights {
            Some(raw) => WeightVector::new(raw.clone()),
            None => weight_sequence(n, m),
        };
        match weights {
            Ok(p) => {
                let pair = EnvelopePair::build(&table, &truth, &p, m)?;
                let rep = sandwich_check(&pair);
                checks.push(CheckResult::measured(
                    name,
                    rep.max_lower_violation.max(rep.max_upper_violation).max(0.0),
                    INEQUALITY_SLACK,
                ));
            }
            Err(e) => checks.push(CheckResult::failed(name, format!("weights rejected: {e}"))),
        }
    }

    // nesting between consecutive sweep indices (flatter ≺ steeper)
    let mut sorted = sc.cfg.m_sweep.clone();
    sorted.sort_unstable();
    sorted.dedup();
    for pair in sorted.windows(2) {
        let (m_lo, m_hi) = (pair[0], pair[1]);
        let name = format!("nesting_m{m_hi}_in_m{m_lo}");
        let result = match &sc.cfg.override_weights {
            Some(raw) => WeightVector::new(raw.clone())
                .and_then(|p| nesting_check(&table, &truth, &p, &weight_sequence(n, m_lo)?)),
            None => nesting_check(
                &table,
                &truth,
                &weight_sequence(n, m_hi)?,
                &weight_sequence(n, m_lo)?,
            ),
        };
        match result {
            Ok(rep) => checks.push(CheckResult::measured(
                name,
                rep.max_lower_order_violation
                    .max(rep.max_lower_truth_violation)
                    .max(rep.max_upper_truth_violation)
                    .max(rep.max_upper_order_violation)
                    .max(0.0),
                INEQUALITY_SLACK,
            )),
            Err(e) => checks.push(CheckResult::failed(name, format!("nesting rejected: {e}"))),
        }
    }

    // equality case: uniform weights reproduce the cdf from both sides
    let uniform = WeightVector::uniform(n)?;
    let k = upper_envelope(&table, &uniform)?;
    let h = lower_envelope(&table, &uniform)?;
    let worst = max_abs_diff(&k, &truth).max(max_abs_diff(&h, &truth));
    checks.push(CheckResult::measured("uniform_equality", worst, 1e-8));

    // L1 rate: the gap stays under its closed-form bound
    let c_n = c_n_constant(&table)?;
    for &m in &sc.cfg.m_sweep {
        let pair = EnvelopePair::for_sweep(&table, &truth, m)?;
        let bound = gap_bound(n, m, c_n.value)?;
        checks.push(CheckResult::measured(
            format!("l1_rate_m{m}"),
            (pair.l1_gap.value - bound).max(0.0),
            RATE_SLACK,
        ));
    }

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        model: sc.cfg.model.clone(),
        n,
        m_sweep: sc.cfg.m_sweep.clone(),
        checks,
        pass,
    };
    sc.write("verify_report.json", &json_line(&report))?;
    for c in &report.checks {
        println!(
            "verify {}: {} (metric {:e}, tol {:e})",
            c.name,
            if c.pass { "pass" } else { "FAIL" },
            c.metric,
            c.tolerance
        );
    }
    Ok(pass)
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub model: ModelDescriptor,
    pub n: usize,
    pub seed: u64,
    pub reps: u64,
    pub within_three_sigma: usize,
    pub total: usize,
    pub coverage: f64,
    pub max_abs_z: f64,
    pub pass: bool,
    pub resolution_warning: bool,
}

/// `oracle`: simulate, compare against quadrature, and report deviations.
pub fn cmd_oracle(sc: &Scenario) -> Result<bool, CliError> {
    // interior probability levels keep every comparison cell away from the
    // degenerate 0/1 corners
    let n = sc.cfg.n;
    let gx = interior_grid(sc.model.as_ref(), sc.cfg.oracle.nx, true)?;
    let gy = interior_grid(sc.model.as_ref(), sc.cfg.oracle.ny, false)?;
    let table = build_table(sc.model.as_ref(), n, &gx, &gy, &sc.spec)?;
    let run = run_simulation(sc.model.as_ref(), n, sc.cfg.reps, sc.cfg.seed, &gx, &gy)?;
    let cmp = compare_with_table(&run, &table)?;

    if sc.format().wants_json() {
        sc.write("oracle_run.json", &run.to_json())?;
        sc.write("oracle_report.json", &json_line(&report_of(sc, &cmp)))?;
    }
    if sc.format().wants_csv() {
        let mut csv = String::from("r,x,y,empirical,quadrature,stderr,z\n");
        for c in &cmp.cells {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.r, c.x, c.y, c.empirical, c.quadrature, c.stderr, c.z
            ));
        }
        sc.write("oracle_deviations.csv", &csv)?;
    }
    println!(
        "oracle: {}/{} within 3σ (coverage {:.4}), max |z| = {:.3}{}",
        cmp.within_three_sigma,
        cmp.total,
        cmp.coverage,
        cmp.max_abs_z,
        if cmp.resolution_warning {
            " [warning: reps too small to resolve deviations]"
        } else {
            ""
        }
    );
    Ok(cmp.pass)
}

fn report_of(sc: &Scenario, cmp: &OracleComparison) -> OracleReport {
    OracleReport {
        model: sc.cfg.model.clone(),
        n: sc.cfg.n,
        seed: sc.cfg.seed,
        reps: sc.cfg.reps,
        within_three_sigma: cmp.within_three_sigma,
        total: cmp.total,
        coverage: cmp.coverage,
        max_abs_z: cmp.max_abs_z,
        pass: cmp.pass,
        resolution_warning: cmp.resolution_warning,
    }
}

fn interior_grid(
    model: &dyn BivariateModel,
    points: usize,
    x_axis: bool,
) -> Result<Vec<f64>, CliError> {
    (1..=points)
        .map(|k| {
            let p = k as f64 / (points + 1) as f64;
            if x_axis {
                model.marginal_quantile_x(p)
            } else {
                model.marginal_quantile_y(p)
            }
        })
        .collect::<Result<_, _>>()
        .map_err(CliError::from)
}
