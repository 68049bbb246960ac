//! `pppcov`: coverage sweeps, fading densities and validation runs.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{thread_cap, RawConfig, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "pppcov",
    version,
    about = "Coverage probability of Poisson cellular networks under double shadowed fading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form coverage over a θ sweep, optionally with checks.
    Coverage(Overrides),
    /// Double shadowed fading density on a grid of h.
    Pdf(Overrides),
    /// Run the acceptance checks and print a pass/fail table.
    Validate(Overrides),
}

/// Each option overrides the key of the same name in the config file.
#[derive(Debug, Args)]
struct Overrides {
    /// Configuration file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base-station density λ per unit area
    #[arg(long)]
    density: Option<String>,
    /// Path-loss exponent α (> 2)
    #[arg(long)]
    path_loss_exponent: Option<String>,
    /// Transmit power P
    #[arg(long)]
    tx_power: Option<String>,
    /// Desired link: kms:kappa=<real>,mu=<int>,m=<int>[,sigma_db=<real>]
    #[arg(long)]
    desired: Option<String>,
    /// Interferers: rayleigh | nakagami:m=<int> | lognormal:sigma_db=<real> |
    /// rayleigh*lognormal:sigma_db=<real> | kms:kappa=<real>,mu=<int>,m=<int>
    #[arg(long)]
    interferer: Option<String>,
    /// Gauss-Hermite order for the lognormal shadowing
    #[arg(long)]
    ghq_order: Option<String>,
    /// Single SIR threshold in dB (replaces the sweep)
    #[arg(long, allow_hyphen_values = true)]
    theta_db: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_db_start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_db_stop: Option<String>,
    #[arg(long)]
    theta_db_step: Option<String>,
    /// Add the radial-integral column
    #[arg(long)]
    check: bool,
    /// Add Monte Carlo columns
    #[arg(long)]
    mc: bool,
    /// Monte Carlo realizations per threshold
    #[arg(long)]
    realizations: Option<String>,
    /// Simulation disk radius in units of 1/√(πλ)
    #[arg(long)]
    window_radius_factor: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads (also capped by PPPCOV_THREADS)
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    h_min: Option<String>,
    #[arg(long)]
    h_max: Option<String>,
    #[arg(long)]
    points: Option<String>,
    /// Add the exact-density and error columns
    #[arg(long)]
    exact: bool,
    /// Skip the Monte Carlo checks
    #[arg(long)]
    quick: bool,
    /// Output file (standard output when absent)
    #[arg(long)]
    output: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

impl Overrides {
    fn into_raw(self) -> Result<RawConfig, CliError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let values = [
            ("density", self.density),
            ("path_loss_exponent", self.path_loss_exponent),
            ("tx_power", self.tx_power),
            ("desired", self.desired),
            ("interferer", self.interferer),
            ("ghq_order", self.ghq_order),
            ("theta_db", self.theta_db),
            ("theta_db_start", self.theta_db_start),
            ("theta_db_stop", self.theta_db_stop),
            ("theta_db_step", self.theta_db_step),
            ("realizations", self.realizations),
            ("window_radius_factor", self.window_radius_factor),
            ("seed", self.seed),
            ("workers", self.workers),
            ("h_min", self.h_min),
            ("h_max", self.h_max),
            ("points", self.points),
            ("output", self.output),
            ("format", self.format),
        ];
        for (key, value) in values {
            if let Some(v) = value {
                raw.set_flag(key, v);
            }
        }
        for (key, set) in [
            ("check", self.check),
            ("mc", self.mc),
            ("exact", self.exact),
            ("quick", self.quick),
        ] {
            if set {
                raw.set_flag(key, "true".into());
            }
        }
        Ok(raw)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(cap) = thread_cap()? {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cap)
            .build_global();
    }
    match cli.command {
        Command::Coverage(o) => commands::cmd_coverage(&RunConfig::from_raw(&o.into_raw()?)?),
        Command::Pdf(o) => commands::cmd_pdf(&RunConfig::from_raw(&o.into_raw()?)?),
        Command::Validate(o) => commands::cmd_validate(&RunConfig::from_raw(&o.into_raw()?)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pppcov: {e}");
            e.exit_code()
        }
    }
}
