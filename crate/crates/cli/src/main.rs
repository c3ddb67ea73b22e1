use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use uabayes_cli::config::{Overrides, RunConfig};
use uabayes_cli::Experiment;

#[derive(Parser)]
#[command(name = "uabayes", version, about = "Tempered Bayes experiments: fusion, filtering, classification, tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Full-size settings: 500 episodes and a 0.01 grid step.
    #[arg(long, global = true)]
    paper_scale: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the α-scaling and fusion properties and write their curves.
    Properties,
    /// Fuse the configured prior and likelihood.
    Fuse,
    /// Accuracy of the λ-weighted naive Bayes classifier and tuned λ.
    Classify,
    /// Tempered Kalman filter under process-noise misspecification.
    Kalman,
    /// Tempered particle filter on the nonlinear benchmark.
    Pf,
    /// Tempered IMM on the jump-linear scenario, grid-tuned.
    Imm,
    /// Tune the exponents of one experiment by grid or surrogate search.
    Tune,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Properties => Experiment::Properties,
            Command::Fuse => Experiment::Fuse,
            Command::Classify => Experiment::Classify,
            Command::Kalman => Experiment::Kalman,
            Command::Pf => Experiment::Pf,
            Command::Imm => Experiment::Imm,
            Command::Tune => Experiment::Tune,
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let flags = Overrides { seed: cli.seed, out: cli.out.clone(), workers: cli.workers, paper_scale: cli.paper_scale };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &flags)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    uabayes_cli::run(cli.command.into(), &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
