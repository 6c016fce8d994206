//! Command-line front end: configuration, subcommands and output files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "vacrc", version, about = "Reduction-model characteristic length from decaying vacuum energy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Characteristic length, volume and decoherence time at the present epoch.
    RcNow,
    /// Integrate the background and track V_c and R_c along it.
    Evolve,
    /// Monte Carlo check of the mean square velocity growth law.
    McVerify,
    /// Sweep one parameter (--axis delta|mass|h0, --grid v1,v2,...).
    Sweep,
    /// Filling fraction of characteristic volumes and continuity residual.
    Consistency,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RcNow => "rc-now",
            Command::Evolve => "evolve",
            Command::McVerify => "mc-verify",
            Command::Sweep => "sweep",
            Command::Consistency => "consistency",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Payload destination; stdout when omitted.
    #[arg(long = "out", alias = "out-path", global = true)]
    pub out_path: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h0_gev: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_d0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_b0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega_vac0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mass_gev: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m_dark_gev: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a_start: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a_end: Option<String>,
    #[arg(long, global = true)]
    pub n_samples: Option<String>,
    #[arg(long, global = true)]
    pub n_traj: Option<String>,
    #[arg(long, global = true)]
    pub n_steps: Option<String>,
    #[arg(long, global = true)]
    pub dt: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// constant or from-evolve.
    #[arg(long, global = true)]
    pub vc_profile: Option<String>,
    /// Scaled V_c for the constant profile.
    #[arg(long, global = true)]
    pub vc_scaled: Option<String>,
    /// Monte Carlo worker threads (0 = all cores); never changes results.
    #[arg(long, global = true)]
    pub threads: Option<String>,
    #[arg(long, global = true)]
    pub axis: Option<String>,
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

impl Overrides {
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("out_path", &self.out_path),
            ("format", &self.format),
            ("h0_gev", &self.h0_gev),
            ("omega_d0", &self.omega_d0),
            ("omega_b0", &self.omega_b0),
            ("omega_vac0", &self.omega_vac0),
            ("delta", &self.delta),
            ("mass_gev", &self.mass_gev),
            ("m_dark_gev", &self.m_dark_gev),
            ("a_start", &self.a_start),
            ("a_end", &self.a_end),
            ("n_samples", &self.n_samples),
            ("n_traj", &self.n_traj),
            ("n_steps", &self.n_steps),
            ("dt", &self.dt),
            ("seed", &self.seed),
            ("vc_profile", &self.vc_profile),
            ("vc_scaled", &self.vc_scaled),
            ("threads", &self.threads),
            ("axis", &self.axis),
            ("grid", &self.grid),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => config::read_config_file(path)?,
            None => BTreeMap::new(),
        };
        RunConfig::resolve(&file, &self.to_map())
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::RcNow => commands::cmd_rc_now(cfg),
        Command::Evolve => commands::cmd_evolve(cfg),
        Command::McVerify => commands::cmd_mc_verify(cfg),
        Command::Sweep => commands::cmd_sweep(cfg),
        Command::Consistency => commands::cmd_consistency(cfg),
    }
}

/// Runs one invocation and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(passed) => {
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.code.exit_status()
        }
    }
}

fn run_inner(cli: &Cli) -> Result<bool, CliError> {
    let cfg = cli.overrides.resolve()?;
    let outcome = execute(cli.command, &cfg)?;
    let body = outcome.record.render(cfg.format);
    match &cfg.out_path {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::io(format!("cannot write {path}: {e}")))?;
            println!("{}: {}", cli.command.name(), outcome.summary);
        }
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::io(format!("stdout: {e}")))?;
            eprintln!("{}: {}", cli.command.name(), outcome.summary);
        }
    }
    Ok(outcome.passed)
}
