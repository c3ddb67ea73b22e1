//! Seeded scenario generators.
//!
//! Every generator is a pure function of its configuration. Randomness comes
//! from ChaCha8 (`rand_chacha::ChaCha8Rng`); episode `i` of a run is seeded
//! with [`episode_seed`]`(seed, i)`, so episodes can be produced in any order
//! or in parallel and still match.

mod benchmark;
mod corpus;
mod jump;
mod linear;

pub use benchmark::{benchmark_transition, simulate_benchmark_nonlinear, BenchmarkParams};
pub use corpus::{generate_classification_corpus, CorpusKind, CorpusParams};
pub use jump::{simulate_jump_linear, JumpLinearParams};
pub use linear::simulate_linear_ssm;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::filters::TrajectoryRow;

#[derive(Debug, thiserror::Error)]
pub enum SimulateError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Filter(#[from] crate::filters::FilterError),
    #[error(transparent)]
    Classify(#[from] crate::classify::ClassifyError),
}

pub type Result<T, E = SimulateError> = std::result::Result<T, E>;

/// Seed, episode length and episode count shared by every generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub horizon: usize,
    pub episodes: usize,
}

impl ScenarioConfig {
    pub fn new(seed: u64, horizon: usize, episodes: usize) -> Result<Self> {
        let cfg = Self { seed, horizon, episodes };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.episodes == 0 {
            return Err(SimulateError::InvalidConfig("horizon and episodes must be at least 1".into()));
        }
        Ok(())
    }

    /// Generator for episode `index`.
    pub fn episode_rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(episode_seed(self.seed, index))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed of episode `index` under master seed `seed`.
pub fn episode_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64))
}

/// One simulated run. `truth[k]` and `measurements[k]` belong to time
/// `k + 1`; `modes` is empty except for jump-linear scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub truth: Vec<DVector<f64>>,
    pub measurements: Vec<DVector<f64>>,
    pub modes: Vec<usize>,
}

impl EpisodeRecord {
    pub fn horizon(&self) -> usize {
        self.truth.len()
    }

    /// Scalar states, for one-dimensional scenarios.
    pub fn truth_scalar(&self) -> Vec<f64> {
        self.truth.iter().map(|x| x[0]).collect()
    }

    pub fn measurements_scalar(&self) -> Vec<f64> {
        self.measurements.iter().map(|y| y[0]).collect()
    }

    /// Trajectory rows pairing this record with filter output. `probs` may be
    /// empty.
    pub fn trajectory_rows(&self, estimates: &[DVector<f64>], probs: &[Vec<f64>]) -> Vec<TrajectoryRow> {
        (0..self.horizon())
            .map(|k| TrajectoryRow {
                k: k + 1,
                truth: self.truth[k].iter().copied().collect(),
                measurement: self.measurements[k].iter().copied().collect(),
                estimate: estimates.get(k).map_or_else(Vec::new, |e| e.iter().copied().collect()),
                model_probs: probs.get(k).cloned().unwrap_or_default(),
            })
            .collect()
    }
}

/// Runs `episode(rng, horizon)` for every episode of `cfg` in parallel,
/// returning records in episode order.
pub(crate) fn run_episodes<F>(cfg: &ScenarioConfig, episode: F) -> Result<Vec<EpisodeRecord>>
where
    F: Fn(&mut ChaCha8Rng, usize) -> EpisodeRecord + Sync,
{
    cfg.validate()?;
    Ok((0..cfg.episodes)
        .into_par_iter()
        .map(|i| episode(&mut cfg.episode_rng(i), cfg.horizon))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| episode_seed(7, i)).collect();
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_eq!(a[3], episode_seed(7, 3));
        assert_ne!(episode_seed(7, 0), episode_seed(8, 0));
    }

    #[test]
    fn config_validation() {
        assert!(ScenarioConfig::new(1, 0, 1).is_err());
        assert!(ScenarioConfig::new(1, 1, 0).is_err());
        assert!(ScenarioConfig::new(1, 1, 1).is_ok());
    }
}
