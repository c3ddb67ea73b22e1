//! Uncertainty-aware state estimators.
//!
//! Each filter applies the (α, β)-posterior at its Bayes update: the Kalman
//! filter rescales the predicted covariance by `1/β` and the measurement
//! covariance by `1/α`; the particle filter tempers particle weights and
//! likelihoods; the IMM filter tempers the model-probability update.

mod imm;
mod kalman;
mod metrics;
mod particle;
mod trajectory;

pub use imm::{run_imm, ua_imm_step, ImmBank, ImmOptions, ImmStep};
pub use kalman::{kalman_filter, ua_kalman_step, ua_kalman_step_with_input, LinearSSM};
pub use metrics::{rtamse, rtamse_scalar};
pub use particle::{
    effective_sample_size, run_particle_filter, systematic_resample, ua_pf_step, NonlinearSSM,
    ParticleSet, PfStep,
};
pub use trajectory::{write_trajectory_csv, TrajectoryRow};

use thiserror::Error;

use crate::posterior::PosteriorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("innovation covariance is singular")]
    NumericalSingularity,
    #[error("all particle likelihoods are zero")]
    ParticleDepletion,
    #[error("all tempered model weights are zero")]
    ModelCollapse,
    #[error("invalid tempering exponents: {0}")]
    InvalidTemper(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Posterior(#[from] PosteriorError),
}

pub type Result<T, E = FilterError> = std::result::Result<T, E>;
