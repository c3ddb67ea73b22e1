use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{run_episodes, EpisodeRecord, Result, ScenarioConfig, SimulateError};
use crate::filters::NonlinearSSM;

/// The scalar nonlinear benchmark
/// `x_k = x/2 + 25x/(1 + x²) + 8 cos(1.2k) + w`, observed through
/// `y = x²/20 + a·sin(x) + v`. Filters are handed the nominal map
/// `y = x²/20`, so `a ≠ 0` is a misspecified measurement model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkParams {
    pub process_var: f64,
    pub measurement_var: f64,
    pub x0: f64,
    /// Amplitude `a` of the unmodelled `sin(x)` term.
    pub sin_amplitude: f64,
    /// Prior handed to the filter, `N(initial_mean, initial_var)`.
    pub initial_mean: f64,
    pub initial_var: f64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self { process_var: 10.0, measurement_var: 1.0, x0: 0.0, sin_amplitude: 0.5, initial_mean: 0.0, initial_var: 1.0 }
    }
}

impl BenchmarkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.process_var >= 0.0 && self.measurement_var >= 0.0 && self.initial_var > 0.0) {
            return Err(SimulateError::InvalidConfig("benchmark variances must be non-negative".into()));
        }
        if ![self.process_var, self.measurement_var, self.x0, self.sin_amplitude, self.initial_mean, self.initial_var]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(SimulateError::InvalidConfig("benchmark parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn true_measurement(&self, x: f64) -> f64 {
        x * x / 20.0 + self.sin_amplitude * x.sin()
    }

    pub fn nominal_measurement(x: f64) -> f64 {
        x * x / 20.0
    }

    /// The model the data are generated from.
    pub fn true_model(&self) -> Result<NonlinearSSM> {
        let a = self.sin_amplitude;
        Ok(NonlinearSSM::new(
            benchmark_transition,
            move |x: f64| x * x / 20.0 + a * x.sin(),
            self.process_var,
            self.measurement_var,
        )?)
    }

    /// The model a filter is given: the true dynamics with the nominal
    /// measurement map.
    pub fn nominal_model(&self) -> Result<NonlinearSSM> {
        Ok(NonlinearSSM::new(benchmark_transition, Self::nominal_measurement, self.process_var, self.measurement_var)?)
    }
}

/// Noise-free benchmark dynamics at time `k`.
pub fn benchmark_transition(x: f64, k: usize) -> f64 {
    x / 2.0 + 25.0 * x / (1.0 + x * x) + 8.0 * (1.2 * k as f64).cos()
}

fn episode<R: Rng>(params: &BenchmarkParams, horizon: usize, rng: &mut R) -> EpisodeRecord {
    let sw = params.process_var.sqrt();
    let sv = params.measurement_var.sqrt();
    let mut x = params.x0;
    let mut truth = Vec::with_capacity(horizon);
    let mut measurements = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let w: f64 = StandardNormal.sample(rng);
        let v: f64 = StandardNormal.sample(rng);
        x = benchmark_transition(x, k) + sw * w;
        truth.push(DVector::from_element(1, x));
        measurements.push(DVector::from_element(1, params.true_measurement(x) + sv * v));
    }
    EpisodeRecord { truth, measurements, modes: Vec::new() }
}

/// `cfg.episodes` benchmark episodes generated with the true measurement map.
pub fn simulate_benchmark_nonlinear(cfg: &ScenarioConfig, params: &BenchmarkParams) -> Result<Vec<EpisodeRecord>> {
    params.validate()?;
    run_episodes(cfg, |rng, horizon| episode(params, horizon, rng))
}
