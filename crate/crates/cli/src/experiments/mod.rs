//! The seven batch experiments. Each `run` writes its files into the output
//! directory and returns whether its embedded checks passed.

pub mod classify;
pub mod fuse;
pub mod imm;
pub mod kalman;
pub mod pf;
pub mod properties;
pub mod tune;

use anyhow::Result;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use uabayes::filters::{rtamse, run_imm, run_particle_filter, FilterError, ImmOptions, ParticleSet};
use uabayes::simulate::{episode_seed, BenchmarkParams, EpisodeRecord, JumpLinearParams, ScenarioConfig};
use uabayes::TemperPair;

use crate::config::RunConfig;

/// Separates the particle-filter random stream from the scenario stream
/// while keeping it paired across `(N, α, β)` settings.
pub const PF_STREAM: u64 = 0x5046_5f53_5452_4541;

pub fn scenario(cfg: &RunConfig) -> Result<ScenarioConfig> {
    Ok(ScenarioConfig::new(cfg.seed, cfg.horizon, cfg.episodes)?)
}

/// Mean over episodes of the per-episode RTAMSE. The estimator receives
/// the episode index and record; a failure in any episode makes the value
/// `+∞`.
pub fn mean_rtamse<F>(episodes: &[EpisodeRecord], estimator: F) -> f64
where
    F: Fn(usize, &EpisodeRecord) -> Option<Vec<DVector<f64>>> + Sync,
{
    let per: Vec<f64> = episodes
        .par_iter()
        .enumerate()
        .map(|(i, ep)| estimator(i, ep).and_then(|est| rtamse(&est, &ep.truth).ok()).unwrap_or(f64::INFINITY))
        .collect();
    let mean = per.iter().sum::<f64>() / per.len() as f64;
    if mean.is_nan() {
        f64::INFINITY
    } else {
        mean
    }
}

/// Per-step state estimates and mode probabilities.
pub type ImmTrace = (Vec<DVector<f64>>, Vec<Vec<f64>>);

/// IMM output for one episode, or `None` if the filter fails.
pub fn imm_estimates(
    params: &JumpLinearParams,
    opts: ImmOptions,
    ep: &EpisodeRecord,
    t: TemperPair,
) -> Option<ImmTrace> {
    let model = params.filter_model().ok()?;
    let steps = run_imm(params.filter_bank().ok()?, &[model], &ep.measurements, t, opts).ok()?;
    let est = steps.iter().map(|s| s.estimate.mean().clone()).collect();
    let probs = steps.iter().map(|s| s.bank.model_probs.weights().to_vec()).collect();
    Some((est, probs))
}

/// Particle-filter estimates for episode `index`. The particle stream
/// depends only on `(seed, index)`, so every setting sees the same draws.
pub fn pf_estimates(
    params: &BenchmarkParams,
    particles: usize,
    seed: u64,
    index: usize,
    ep: &EpisodeRecord,
    t: TemperPair,
) -> Result<Vec<f64>, FilterError> {
    let model = params.nominal_model().map_err(|e| FilterError::InvalidModel(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(seed ^ PF_STREAM, index));
    let initial = ParticleSet::sample_gaussian(particles, params.initial_mean, params.initial_var, &mut rng)?;
    run_particle_filter(initial, &model, &ep.measurements_scalar(), t, &mut rng)
}

pub fn to_vectors(xs: &[f64]) -> Vec<DVector<f64>> {
    xs.iter().map(|x| DVector::from_element(1, *x)).collect()
}
