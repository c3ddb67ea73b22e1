use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{run_episodes, EpisodeRecord, Result, ScenarioConfig, SimulateError};
use crate::filters::{ImmBank, LinearSSM};
use crate::posterior::GaussianBelief;

/// Maneuvering target on one axis: state `[position, velocity]`,
/// `x_k = F x_{k-1} + G (a_{m_k} + w)` with `F = [[1, T], [0, 1]]`,
/// `G = [T²/2, T]`, a Markov-switching acceleration mode `m_k`, and
/// position-only measurements.
///
/// With `incomplete_model_set` the truth switches among the finer
/// acceleration set `truth_accelerations` while a filter built from
/// [`JumpLinearParams::filter_bank`] only knows `accelerations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JumpLinearParams {
    pub dt: f64,
    pub process_std: f64,
    pub measurement_std: f64,
    /// Accelerations known to the filter.
    pub accelerations: Vec<f64>,
    pub stay_prob: f64,
    pub incomplete_model_set: bool,
    /// Accelerations the truth uses when `incomplete_model_set` is set.
    pub truth_accelerations: Vec<f64>,
    pub initial_state: [f64; 2],
    pub initial_mode: usize,
    /// Initial covariance handed to each mode filter (diagonal).
    pub initial_var: [f64; 2],
}

impl Default for JumpLinearParams {
    fn default() -> Self {
        Self {
            dt: 1.0,
            process_std: 1.0,
            measurement_std: 1.0,
            accelerations: vec![0.0, 10.0, -10.0],
            stay_prob: 0.8,
            incomplete_model_set: false,
            truth_accelerations: vec![0.0, 2.5, -2.5, 5.0, -5.0, 7.5, -7.5, 10.0, -10.0],
            initial_state: [0.0, 0.0],
            initial_mode: 0,
            initial_var: [1.0, 1.0],
        }
    }
}

/// `stay` on the diagonal, the rest spread evenly.
fn symmetric_tpm(m: usize, stay: f64) -> DMatrix<f64> {
    let mut tpm = DMatrix::from_element(m, m, (1.0 - stay) / (m - 1) as f64);
    tpm.fill_diagonal(stay);
    tpm
}

impl JumpLinearParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimulateError::InvalidConfig(format!("sampling time {}", self.dt)));
        }
        if !(self.process_std >= 0.0 && self.measurement_std > 0.0) {
            return Err(SimulateError::InvalidConfig("noise deviations must be non-negative, measurement positive".into()));
        }
        if !(0.0..=1.0).contains(&self.stay_prob) {
            return Err(SimulateError::InvalidConfig(format!("stay probability {}", self.stay_prob)));
        }
        let truth = self.truth_mode_accelerations();
        if self.accelerations.len() < 2 || truth.len() < 2 {
            return Err(SimulateError::InvalidConfig("need at least two acceleration modes".into()));
        }
        if self.initial_mode >= truth.len() {
            return Err(SimulateError::InvalidConfig(format!("initial mode {}", self.initial_mode)));
        }
        Ok(())
    }

    pub fn transition(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, self.dt, 0.0, 1.0])
    }

    pub fn input_gain(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(2, 1, &[self.dt * self.dt / 2.0, self.dt])
    }

    /// The accelerations the truth switches among.
    pub fn truth_mode_accelerations(&self) -> &[f64] {
        if self.incomplete_model_set {
            &self.truth_accelerations
        } else {
            &self.accelerations
        }
    }

    /// Mode transition matrix of the truth.
    pub fn truth_tpm(&self) -> DMatrix<f64> {
        symmetric_tpm(self.truth_mode_accelerations().len(), self.stay_prob)
    }

    /// Mode transition matrix handed to the filter.
    pub fn filter_tpm(&self) -> DMatrix<f64> {
        symmetric_tpm(self.accelerations.len(), self.stay_prob)
    }

    /// The linear model shared by every mode; the mode enters as an input.
    pub fn filter_model(&self) -> Result<LinearSSM> {
        Ok(LinearSSM::new(
            self.transition(),
            self.input_gain(),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::from_element(1, 1, self.process_std * self.process_std),
            DMatrix::from_element(1, 1, self.measurement_std * self.measurement_std),
        )?)
    }

    /// Initial IMM bank: every mode starts from the initial state with
    /// uniform mode probabilities.
    pub fn filter_bank(&self) -> Result<ImmBank> {
        let init = GaussianBelief::new(
            DVector::from_column_slice(&self.initial_state),
            DMatrix::from_diagonal(&DVector::from_column_slice(&self.initial_var)),
        )
        .map_err(crate::filters::FilterError::from)?;
        let inputs = self.accelerations.iter().map(|a| DVector::from_element(1, *a)).collect();
        Ok(ImmBank::uniform(init, self.filter_tpm(), inputs)?)
    }
}

fn draw_mode<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    row.len() - 1
}

fn episode<R: Rng>(params: &JumpLinearParams, horizon: usize, rng: &mut R) -> EpisodeRecord {
    let f = params.transition();
    let g = params.input_gain();
    let accel = params.truth_mode_accelerations();
    let tpm = params.truth_tpm();
    let rows: Vec<Vec<f64>> = tpm.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut x = DVector::from_column_slice(&params.initial_state);
    let mut mode = params.initial_mode;
    let mut truth = Vec::with_capacity(horizon);
    let mut measurements = Vec::with_capacity(horizon);
    let mut modes = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        mode = draw_mode(&rows[mode], rng);
        let w: f64 = StandardNormal.sample(rng);
        let v: f64 = StandardNormal.sample(rng);
        x = &f * &x + &g * (accel[mode] + params.process_std * w);
        measurements.push(DVector::from_element(1, x[0] + params.measurement_std * v));
        truth.push(x.clone());
        modes.push(mode);
    }
    EpisodeRecord { truth, measurements, modes }
}

/// `cfg.episodes` jump-linear episodes. Mode indices refer to
/// [`JumpLinearParams::truth_mode_accelerations`].
pub fn simulate_jump_linear(cfg: &ScenarioConfig, params: &JumpLinearParams) -> Result<Vec<EpisodeRecord>> {
    params.validate()?;
    run_episodes(cfg, |rng, horizon| episode(params, horizon, rng))
}
