//! Batch experiments for the tempered-posterior toolkit: configuration,
//! output handling and one runner per subcommand.

pub mod config;
pub mod experiments;
pub mod output;

use anyhow::Result;

use config::RunConfig;
use output::OutputDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Properties,
    Fuse,
    Classify,
    Kalman,
    Pf,
    Imm,
    Tune,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Properties => "properties",
            Self::Fuse => "fuse",
            Self::Classify => "classify",
            Self::Kalman => "kalman",
            Self::Pf => "pf",
            Self::Imm => "imm",
            Self::Tune => "tune",
        }
    }
}

/// Runs one experiment into `cfg.out` and writes the manifest. Returns
/// whether the experiment's embedded checks passed.
pub fn run(experiment: Experiment, cfg: &RunConfig) -> Result<bool> {
    let mut out = OutputDir::create(&cfg.out)?;
    let passed = match experiment {
        Experiment::Properties => experiments::properties::run(cfg, &mut out)?,
        Experiment::Fuse => experiments::fuse::run(cfg, &mut out)?,
        Experiment::Classify => experiments::classify::run(cfg, &mut out)?,
        Experiment::Kalman => experiments::kalman::run(cfg, &mut out)?,
        Experiment::Pf => experiments::pf::run(cfg, &mut out)?,
        Experiment::Imm => experiments::imm::run(cfg, &mut out)?,
        Experiment::Tune => experiments::tune::run(cfg, &mut out)?,
    };
    out.finish(experiment.name(), cfg, passed)?;
    Ok(passed)
}
