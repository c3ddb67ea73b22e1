use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{run_episodes, EpisodeRecord, Result, ScenarioConfig, SimulateError};
use crate::filters::LinearSSM;

/// Square root `S` with `S Sᵀ = A` for a symmetric positive semi-definite
/// `A`; works when `A` is singular.
fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots)
}

fn gaussian<R: Rng>(sqrt: &DMatrix<f64>, rng: &mut R) -> DVector<f64> {
    let z = DVector::from_fn(sqrt.ncols(), |_, _| StandardNormal.sample(rng));
    sqrt * z
}

/// Linear-Gaussian rollouts `x_k = F x_{k-1} + G w`, `y_k = H x_k + v`
/// from `x0`.
pub fn simulate_linear_ssm(cfg: &ScenarioConfig, model: &LinearSSM, x0: &DVector<f64>) -> Result<Vec<EpisodeRecord>> {
    if x0.len() != model.state_dim() {
        return Err(SimulateError::InvalidConfig(format!(
            "initial state has length {}, model {}",
            x0.len(),
            model.state_dim()
        )));
    }
    let q = psd_sqrt(&model.q);
    let r = psd_sqrt(&model.r);
    run_episodes(cfg, |rng, horizon| {
        let mut x = x0.clone();
        let mut truth = Vec::with_capacity(horizon);
        let mut measurements = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            x = &model.f * &x + &model.g * gaussian(&q, rng);
            measurements.push(&model.h * &x + gaussian(&r, rng));
            truth.push(x.clone());
        }
        EpisodeRecord { truth, measurements, modes: Vec::new() }
    })
}
