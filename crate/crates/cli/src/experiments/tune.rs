//! Hyper-parameter tuning of one experiment's loss by grid search or the
//! RBF surrogate.

use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use uabayes::classify::misclassification_rate;
use uabayes::simulate::{simulate_benchmark_nonlinear, simulate_jump_linear};
use uabayes::tuning::{grid_search, rbf_surrogate_optimize, SearchDomain, SurrogateOptions, TuningResult};
use uabayes::TemperPair;

use super::classify::{load_data, TrainedModel};
use super::imm::imm_loss;
use super::{mean_rtamse, pf_estimates, scenario, to_vectors};
use crate::config::{RunConfig, TuneMethod, TuneTarget};
use crate::output::OutputDir;

#[derive(Debug, Clone, Serialize)]
pub struct TuneReport {
    pub target: TuneTarget,
    pub method: TuneMethod,
    pub wall_clock_seconds: f64,
    #[serde(flatten)]
    pub result: TuningResult,
}

fn search<F>(cfg: &RunConfig, loss: F, domain: &SearchDomain, default_step: f64, default_start: Vec<f64>) -> Result<TuningResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let t = &cfg.tune;
    Ok(match t.method {
        TuneMethod::Grid => grid_search(loss, domain, t.step.unwrap_or(default_step), &domain.default_anchors())?,
        TuneMethod::Surrogate => {
            let start = t.start.clone().unwrap_or(default_start);
            rbf_surrogate_optimize(loss, domain, t.budget, cfg.seed, &start, &SurrogateOptions::default())?
        }
    })
}

pub fn tune(cfg: &RunConfig) -> Result<TuneReport> {
    let started = Instant::now();
    let result = match cfg.tune.target {
        TuneTarget::Imm => {
            let episodes = simulate_jump_linear(&scenario(cfg)?, &cfg.imm.jump)?;
            let domain = SearchDomain::square(cfg.imm.tau)?;
            search(cfg, imm_loss(&cfg.imm, &episodes), &domain, cfg.imm.step, vec![1.0, 1.0])?
        }
        TuneTarget::Pf => {
            let episodes = simulate_benchmark_nonlinear(&scenario(cfg)?, &cfg.pf.benchmark)?;
            let n = cfg.tune.particles;
            let loss = |w: &[f64]| {
                let Ok(t) = TemperPair::new(w[0], w[1]) else { return f64::INFINITY };
                mean_rtamse(&episodes, |i, ep| {
                    pf_estimates(&cfg.pf.benchmark, n, cfg.seed, i, ep, t).ok().map(|est| to_vectors(&est))
                })
            };
            let domain = SearchDomain::square(cfg.imm.tau)?;
            search(cfg, loss, &domain, cfg.imm.step, vec![1.0, 1.0])?
        }
        TuneTarget::Classify => {
            let (train, test) = load_data(cfg.seed, &cfg.classify)?;
            let model = TrainedModel::train(cfg.classify.model, &train)?;
            let loss = |w: &[f64]| misclassification_rate(model.as_dyn(), &test, w[0]).unwrap_or(f64::INFINITY);
            search(cfg, loss, &SearchDomain::unit_interval(), cfg.classify.lambda_step, vec![0.5])?
        }
    };
    Ok(TuneReport {
        target: cfg.tune.target,
        method: cfg.tune.method,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        result,
    })
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let report = tune(cfg)?;
    report.result.write_trace_csv(out.file("tuning_trace.csv")?)?;
    out.json("tuning_result.json", &report)?;
    eprintln!(
        "best point {:?}: loss {:.6} after {} evaluations ({:.2} s)",
        report.result.best_point,
        report.result.best_value,
        report.result.evaluations.len(),
        report.wall_clock_seconds
    );
    Ok(report.result.best_value.is_finite())
}
