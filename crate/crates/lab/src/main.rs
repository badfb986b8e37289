use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enclosure_lab::commands::{self, check_provenance, RunOptions};
use enclosure_lab::{io, LabResult, Scenario};

#[derive(Parser)]
#[command(name = "enclosure", version, about = "Onset and support reconstruction for the inverse heat-source problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem and write boundary traces.
    Simulate(Common),
    /// Evaluate the indicator over every configured probe, τ and s.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Boundary CSV (defaults to <out>/boundary.csv).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Fit onset time, support values and the enclosing polytope.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Sweep CSV (defaults to <out>/sweep.csv).
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// Run the closed-form and volume-identity cross-checks.
    Oracle(Common),
    /// simulate, sweep, estimate and oracle in sequence.
    All(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> LabResult<(Scenario, RunOptions)> {
        let mut sc = Scenario::load(&self.config)?;
        if let Some(seed) = self.seed {
            sc = sc.with_seed(seed)?;
        }
        let out = self.out.clone().unwrap_or_else(|| PathBuf::from(&sc.config.output.dir));
        Ok((sc, RunOptions { out, jobs: self.jobs }))
    }
}

fn run(cli: Cli) -> LabResult<()> {
    match cli.command {
        Command::Simulate(c) => {
            let (sc, opts) = c.load()?;
            commands::simulate(&sc, &opts)?;
        }
        Command::Sweep { common, data } => {
            let (sc, opts) = common.load()?;
            let path = data.unwrap_or_else(|| opts.path(io::BOUNDARY_FILE));
            check_provenance(&path, &sc)?;
            let data = io::read_boundary(&path, &sc)?;
            commands::sweep(&sc, &data, &opts)?;
        }
        Command::Estimate { common, sweep } => {
            let (sc, opts) = common.load()?;
            let path = sweep.unwrap_or_else(|| opts.path(io::SWEEP_FILE));
            check_provenance(&path, &sc)?;
            let rows = io::read_sweep(&path)?;
            commands::estimate(&sc, &rows, &opts)?;
        }
        Command::Oracle(c) => {
            let (sc, opts) = c.load()?;
            commands::oracle(&sc, &opts)?;
        }
        Command::All(c) => {
            let (sc, opts) = c.load()?;
            commands::run_all(&sc, &opts)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
