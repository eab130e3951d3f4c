//! `madcap`: analyses and parameter sweeps of multi-level amplitude damping channels.

mod commands;
mod output;
mod selftest;
mod spec;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mad_capacity::CertifyOptions;

/// Exit status 2: the input could not be used. Exit status 1: the numerics failed.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Numeric(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

pub trait InputContext<T> {
    fn input(self) -> CmdResult<T>;
    fn numeric(self) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for std::result::Result<T, E> {
    fn input(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn numeric(self) -> CmdResult<T> {
        self.map_err(|e| Failure::Numeric(e.into()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "madcap", version, about = "Structure and quantum capacity of multi-level amplitude damping channels")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative tolerance for positive semidefiniteness.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Largest gap between border certificates accepted as equality.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_border: f64,
    /// Coarse simplex grid spacing for the diagonal maximisation.
    #[arg(long, global = true, default_value_t = 0.02)]
    pub grid_step: f64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalOpts {
    pub fn certify(&self) -> CmdResult<CertifyOptions> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.tol_psd) || !ok(self.tol_border) || !ok(self.grid_step) || self.grid_step > 1.0 {
            return Err(Failure::Input(anyhow::anyhow!("tolerances and grid step must be positive and finite")));
        }
        Ok(CertifyOptions {
            tol_psd: self.tol_psd,
            tol_border: self.tol_border,
            grid_step: self.grid_step,
            ..CertifyOptions::default()
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify one channel and certify its quantum capacity (JSON report).
    Analyze {
        /// Channel JSON: {"dim": d, "decays": [{"from": j, "to": i, "p": γ_ji}, ...]}.
        channel: PathBuf,
    },
    /// Evaluate a sweep specification on its grid (CSV).
    Sweep {
        /// Sweep specification JSON.
        spec: PathBuf,
        /// Suppress progress messages.
        #[arg(long)]
        quiet: bool,
    },
    /// Boundary scans and slice certificates for three-level channels at fixed γ10.
    Mad3(commands::Mad3Args),
    /// Quick internal consistency checks.
    Selftest,
}

fn run(cli: Cli) -> CmdResult {
    let g = &cli.global;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.threads).build().numeric()?;
    pool.install(|| match &cli.command {
        Command::Analyze { channel } => commands::analyze(channel, g),
        Command::Sweep { spec, quiet } => commands::sweep(spec, g, !quiet),
        Command::Mad3(args) => commands::mad3(args, g),
        Command::Selftest => selftest::run(g),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(e) | Failure::Numeric(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
