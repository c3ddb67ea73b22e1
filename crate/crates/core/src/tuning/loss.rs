use nalgebra::DVector;
use rayon::prelude::*;

use super::{Result, TuningError};
use crate::simulate::EpisodeRecord;

/// Turns a parametrized estimator into the empirical loss
/// `ω ↦ (1/E) Σ_e (1/K) Σ_k ‖x_k − x̂_k(ω)‖²` over the given episodes.
///
/// The estimator returns one estimate per time step, or `None` when it
/// fails (e.g. a collapsed filter); any failure makes the loss `+∞`.
/// Episodes are evaluated in parallel and summed in episode order.
pub fn empirical_estimation_loss<'a, F>(
    estimator: F,
    episodes: &'a [EpisodeRecord],
) -> Result<impl Fn(&[f64]) -> f64 + Sync + 'a>
where
    F: Fn(&[f64], &EpisodeRecord) -> Option<Vec<DVector<f64>>> + Sync + 'a,
{
    if episodes.is_empty() {
        return Err(TuningError::EmptyDataset);
    }
    Ok(move |omega: &[f64]| {
        let per_episode: Vec<f64> = episodes
            .par_iter()
            .map(|ep| match estimator(omega, ep) {
                Some(est) if est.len() == ep.truth.len() && !est.is_empty() => {
                    let total: f64 = est.iter().zip(&ep.truth).map(|(e, x)| (e - x).norm_squared()).sum();
                    total / ep.truth.len() as f64
                }
                _ => f64::INFINITY,
            })
            .collect();
        let mean = per_episode.iter().sum::<f64>() / episodes.len() as f64;
        if mean.is_nan() {
            f64::INFINITY
        } else {
            mean
        }
    })
}
