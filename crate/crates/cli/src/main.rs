//! `nodeqmc` command-line entry point.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime abort.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::OutputSet;

#[derive(Parser)]
#[command(
    name = "nodeqmc",
    version,
    about = "Nodal structure and fixed-node QMC for few-electron atoms"
)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Write outputs here instead of the configured directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sign grid on two-dimensional cross-sections.
    Scan { config: PathBuf },
    /// Variational Monte Carlo energy.
    Vmc { config: PathBuf },
    /// Fixed-node diffusion Monte Carlo energy.
    Dmc {
        config: PathBuf,
        /// Run these time steps and extrapolate to zero, e.g. 0.01,0.005,0.0025.
        #[arg(long, value_delimiter = ',')]
        tau_ladder: Option<Vec<f64>>,
    },
    /// Nodal-region count with path evidence.
    Topology { config: PathBuf },
    /// Crossing coincidence between the wave function and a node.
    Crossings { config: PathBuf },
    /// Node-parameter scan or wave-function optimization.
    Optimize { config: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scan { .. } => "scan",
            Command::Vmc { .. } => "vmc",
            Command::Dmc { .. } => "dmc",
            Command::Topology { .. } => "topology",
            Command::Crossings { .. } => "crossings",
            Command::Optimize { .. } => "optimize",
        }
    }

    fn config_path(&self) -> &PathBuf {
        match self {
            Command::Scan { config }
            | Command::Vmc { config }
            | Command::Dmc { config, .. }
            | Command::Topology { config }
            | Command::Crossings { config }
            | Command::Optimize { config } => config,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(cli.command.config_path())?;
    if let Command::Dmc {
        tau_ladder: Some(ladder),
        ..
    } = &cli.command
    {
        let dmc = config
            .dmc
            .as_mut()
            .ok_or_else(|| CliError::Config("--tau-ladder needs a [dmc] table".into()))?;
        dmc.tau = None;
        dmc.tau_ladder = Some(ladder.clone());
    }
    if let Some(dir) = &cli.output {
        config.output = std::path::absolute(dir).unwrap_or_else(|_| dir.clone());
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let config = load(cli)?;
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Config("--workers must be positive".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut out = OutputSet::new(&config.output)?;
    pool.install(|| match &cli.command {
        Command::Scan { .. } => run::scan(&config, &mut out),
        Command::Vmc { .. } => run::vmc(&config, &mut out),
        Command::Dmc { .. } => run::dmc(&config, &mut out),
        Command::Topology { .. } => run::topology(&config, &mut out),
        Command::Crossings { .. } => run::crossings(&config, &mut out),
        Command::Optimize { .. } => run::optimize(&config, &mut out),
    })?;
    out.finish(cli.command.name(), &config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nodeqmc {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
