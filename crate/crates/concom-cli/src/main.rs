use clap::{Args, Parser, Subcommand};
use concom_cli::commands::{cmd_converge, cmd_envelope, cmd_oracle, cmd_verify, Scenario};
use concom_cli::config::{OutputFormat, ScenarioConfig};
use concom_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Rank laws of order statistics with their concomitants, majorization
/// envelope diagnostics, and a simulation cross-check.
#[derive(Parser)]
#[command(name = "concom", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the invariant suite and write a machine-readable report
    Verify(Common),
    /// Emit the lower/truth/upper envelope grids for one sweep index
    Envelope {
        #[command(flatten)]
        common: Common,
        /// Sweep index m of the flattening weight family
        #[arg(long)]
        m: u64,
    },
    /// Sweep m and emit gap metrics against the closed-form bound
    Converge(Common),
    /// Cross-check quadrature against reproducible simulation
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario description (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn scenario(common: &Common) -> Result<Scenario, CliError> {
    let mut cfg = ScenarioConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(format) = common.format {
        cfg.output.format = format;
    }
    Scenario::new(cfg)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match &cli.cmd {
        Cmd::Verify(c) => cmd_verify(&scenario(c)?),
        Cmd::Envelope { common, m } => cmd_envelope(&scenario(common)?, *m),
        Cmd::Converge(c) => cmd_converge(&scenario(c)?),
        Cmd::Oracle(c) => cmd_oracle(&scenario(c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
