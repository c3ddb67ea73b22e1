//! One-shot fusion of a configured prior and likelihood.

use anyhow::{bail, Result};
use serde::Serialize;
use uabayes::posterior::{fuse_discrete, fuse_gaussian, weights_to_temper};
use uabayes::{FusionWeights, ScalableDistribution, TemperPair};

use crate::config::{Belief, FuseConfig, RunConfig};
use crate::output::OutputDir;

#[derive(Debug, Clone, Serialize)]
pub struct FuseReport {
    pub alpha: f64,
    pub beta: f64,
    /// `α / (α + β)`, when defined.
    pub lambda: Option<f64>,
    pub posterior: Belief,
    pub entropy: f64,
}

pub fn temper_of(f: &FuseConfig) -> Result<TemperPair> {
    Ok(match f.weights {
        Some([a1, a2, a3]) => weights_to_temper(&FusionWeights::new(a1, a2, a3)?)?,
        None => TemperPair::new(f.alpha, f.beta)?,
    })
}

pub fn fuse(f: &FuseConfig) -> Result<FuseReport> {
    let t = temper_of(f)?;
    let (posterior, entropy) = match (&f.prior, &f.likelihood) {
        (Belief::Discrete(p), Belief::Discrete(l)) => {
            let post = fuse_discrete(p, l, t)?;
            let h = post.entropy();
            (Belief::Discrete(post), h)
        }
        (Belief::Gaussian(p), Belief::Gaussian(l)) => {
            let post = fuse_gaussian(p, l, t)?;
            let h = post.entropy();
            (Belief::Gaussian(post), h)
        }
        _ => bail!("prior and likelihood must both be discrete or both Gaussian"),
    };
    Ok(FuseReport { alpha: t.alpha, beta: t.beta, lambda: t.lambda(), posterior, entropy })
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let report = fuse(&cfg.fuse)?;
    out.json("posterior.json", &report)?;
    Ok(true)
}
