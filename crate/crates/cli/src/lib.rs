//! Command-line front end: configuration, scans, self-checks and diagnostics.

pub mod commands;
pub mod config;
pub mod error;
pub mod model;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use polaritonic::gauge::Gauge;
use polaritonic::scan::ScanKind;

pub use config::{Overrides, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "polaritonic", version, about = "Two-state cavity QED spectra in dipole and Coulomb gauges")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; every key is optional.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_fock: Option<usize>,
    /// One or more coupling strengths (a.u.), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub a0: Option<Vec<f64>>,
    /// Cavity photon energy in eV.
    #[arg(long, global = true)]
    pub omega_ev: Option<f64>,
    /// Gauges to compare, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_gauge)]
    pub gauges: Option<Vec<Gauge>>,
}

fn parse_gauge(s: &str) -> Result<Gauge, String> {
    s.parse::<Gauge>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Electronic structure of the configured grid model.
    Matter {
        #[command(subcommand)]
        action: MatterAction,
    },
    /// Polariton spectra over R or over coupling strength.
    Scan {
        #[command(subcommand)]
        kind: ScanAction,
    },
    /// Internal consistency checks of the configured model.
    Verify {
        /// Deliberately break one construction to see the checks fail.
        #[arg(long, value_parser = clap::value_parser!(verify::Fault))]
        inject_fault: Option<verify::Fault>,
    },
    /// Completeness diagnostics of the electronic basis.
    Diagnose {
        #[command(subcommand)]
        what: DiagnoseAction,
    },
    /// Print the effective configuration as JSON.
    Config,
}

impl clap::builder::ValueParserFactory for verify::Fault {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<verify::Fault>())
    }
}

#[derive(Debug, Subcommand)]
pub enum MatterAction {
    Solve,
}

#[derive(Debug, Subcommand)]
pub enum ScanAction {
    Pes,
    Coupling,
}

#[derive(Debug, Subcommand)]
pub enum DiagnoseAction {
    /// Thomas–Reiche–Kuhn sum at one proton position.
    Trk {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 60)]
        n_states: usize,
        #[arg(long, default_value_t = 0)]
        state: usize,
    },
    /// Dipole-squared leakage as the resolving basis grows.
    Leakage {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 60)]
        n_states: usize,
        #[arg(long, default_value_t = 2)]
        n_target: usize,
    },
}

impl CommonArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            out_dir: self.out_dir.clone(),
            n_fock: self.n_fock,
            a0: self.a0.clone(),
            omega_ev: self.omega_ev,
            gauges: self.gauges.clone(),
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one command and returns its stdout text.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = cli.common.load()?;
    match &cli.command {
        Command::Matter { action: MatterAction::Solve } => commands::matter_solve(&cfg),
        Command::Scan { kind: ScanAction::Pes } => commands::scan(&cfg, ScanKind::Pes),
        Command::Scan { kind: ScanAction::Coupling } => commands::scan(&cfg, ScanKind::Coupling),
        Command::Verify { inject_fault } => {
            let report = verify::run(&cfg, *inject_fault)?;
            let text = report.render();
            if report.passed() {
                Ok(text)
            } else {
                print!("{text}");
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
                Err(CliError::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Diagnose { what: DiagnoseAction::Trk { r, n_states, state } } => {
            commands::diagnose_trk(&cfg, *r, *n_states, *state)
        }
        Command::Diagnose { what: DiagnoseAction::Leakage { r, n_states, n_target } } => {
            commands::diagnose_leakage(&cfg, *r, *n_states, *n_target)
        }
        Command::Config => Ok(cfg.to_json() + "\n"),
    }
}
