//! Tempered Kalman filter on a linear scenario whose true process noise is
//! larger than the filter assumes.

use anyhow::{bail, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use uabayes::filters::{kalman_filter, rtamse, write_trajectory_csv, LinearSSM};
use uabayes::simulate::{simulate_linear_ssm, EpisodeRecord};
use uabayes::{GaussianBelief, TemperPair};

use super::scenario;
use crate::config::{KalmanConfig, LinearModelConfig, RunConfig};
use crate::output::OutputDir;

pub fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        bail!("matrix {name} must be a non-empty rectangular array");
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl LinearModelConfig {
    pub fn to_model(&self, process_scale: f64) -> Result<LinearSSM> {
        Ok(LinearSSM::new(
            matrix("f", &self.f)?,
            matrix("g", &self.g)?,
            matrix("h", &self.h)?,
            matrix("q", &self.q)? * process_scale,
            matrix("r", &self.r)?,
        )?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KalmanRow {
    pub alpha: f64,
    pub beta: f64,
    pub mean_rtamse: f64,
    /// First-component posterior variance after the last step of episode 0.
    pub final_variance: f64,
}

pub struct KalmanOutcome {
    pub rows: Vec<KalmanRow>,
    pub episodes: Vec<EpisodeRecord>,
    /// Posterior variance shrinks as β grows, for every α.
    pub variance_monotone_in_beta: bool,
}

fn initial_belief(k: &KalmanConfig, n: usize) -> Result<GaussianBelief> {
    if k.x0.len() != n {
        bail!("x0 has {} entries, the model state {n}", k.x0.len());
    }
    Ok(GaussianBelief::new(DVector::from_column_slice(&k.x0), DMatrix::identity(n, n) * k.initial_var)?)
}

pub fn filter_episode(
    k: &KalmanConfig,
    model: &LinearSSM,
    ep: &EpisodeRecord,
    t: TemperPair,
) -> Result<Vec<GaussianBelief>> {
    Ok(kalman_filter(&initial_belief(k, model.state_dim())?, model, &ep.measurements, t)?)
}

pub fn kalman(cfg: &RunConfig) -> Result<KalmanOutcome> {
    let k = &cfg.kalman;
    let model = k.model.to_model(1.0)?;
    let truth = k.model.to_model(k.truth_process_scale)?;
    let episodes = simulate_linear_ssm(&scenario(cfg)?, &truth, &DVector::from_column_slice(&k.x0))?;

    let mut rows = Vec::new();
    for &alpha in &k.alphas {
        for &beta in &k.betas {
            let t = TemperPair::new(alpha, beta)?;
            let per: Vec<f64> = episodes
                .par_iter()
                .map(|ep| {
                    let est: Vec<DVector<f64>> =
                        filter_episode(k, &model, ep, t)?.iter().map(|b| b.mean().clone()).collect();
                    Ok(rtamse(&est, &ep.truth)?)
                })
                .collect::<Result<_>>()?;
            let last = filter_episode(k, &model, &episodes[0], t)?;
            rows.push(KalmanRow {
                alpha,
                beta,
                mean_rtamse: per.iter().sum::<f64>() / per.len() as f64,
                final_variance: last.last().map_or(f64::NAN, |b| b.covariance()[(0, 0)]),
            });
        }
    }

    let variance_monotone_in_beta = k.alphas.iter().all(|a| {
        let mut same: Vec<&KalmanRow> = rows.iter().filter(|r| r.alpha == *a).collect();
        same.sort_by(|x, y| x.beta.total_cmp(&y.beta));
        same.windows(2).all(|w| w[1].beta == w[0].beta || w[1].final_variance < w[0].final_variance)
    });
    Ok(KalmanOutcome { rows, episodes, variance_monotone_in_beta })
}

#[derive(Serialize)]
struct Summary<'a> {
    best: &'a KalmanRow,
    conventional: Option<&'a KalmanRow>,
    variance_monotone_in_beta: bool,
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let outcome = kalman(cfg)?;
    let Some(best) = outcome.rows.iter().min_by(|a, b| a.mean_rtamse.total_cmp(&b.mean_rtamse)) else {
        bail!("kalman.alphas and kalman.betas must be non-empty");
    };
    out.csv("kalman_metrics.csv", &["alpha", "beta", "mean_rtamse", "final_variance"], &outcome.rows)?;

    let model = cfg.kalman.model.to_model(1.0)?;
    let ep = &outcome.episodes[0];
    let beliefs = filter_episode(&cfg.kalman, &model, ep, TemperPair::new(best.alpha, best.beta)?)?;
    let est: Vec<DVector<f64>> = beliefs.iter().map(|b| b.mean().clone()).collect();
    write_trajectory_csv(out.file("kalman_trajectory.csv")?, &ep.trajectory_rows(&est, &[]))?;

    let summary = Summary {
        best,
        conventional: outcome.rows.iter().find(|r| r.alpha == 1.0 && r.beta == 1.0),
        variance_monotone_in_beta: outcome.variance_monotone_in_beta,
    };
    out.json("kalman_summary.json", &summary)?;
    eprintln!("best (alpha, beta) = ({}, {}): mean RTAMSE {:.4}", best.alpha, best.beta, best.mean_rtamse);
    Ok(outcome.variance_monotone_in_beta)
}
