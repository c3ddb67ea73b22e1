use nalgebra::{DMatrix, DVector};

use super::kalman::{predict, tempered_cycle, update, LinearSSM};
use super::{FilterError, Result};
use crate::posterior::{DiscreteDistribution, GaussianBelief, TemperPair};

/// State of an interacting-multiple-model filter: one Gaussian belief per
/// mode, the mode probabilities, the mode transition matrix and each mode's
/// known input (e.g. a maneuvering acceleration entering through `G`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImmBank {
    pub beliefs: Vec<GaussianBelief>,
    pub model_probs: DiscreteDistribution,
    pub tpm: DMatrix<f64>,
    pub inputs: Vec<DVector<f64>>,
}

impl ImmBank {
    pub fn new(
        beliefs: Vec<GaussianBelief>,
        model_probs: DiscreteDistribution,
        tpm: DMatrix<f64>,
        inputs: Vec<DVector<f64>>,
    ) -> Result<Self> {
        let m = beliefs.len();
        if m < 2 {
            return Err(FilterError::InvalidModel("an IMM bank needs at least two modes".into()));
        }
        if model_probs.len() != m || inputs.len() != m || tpm.shape() != (m, m) {
            return Err(FilterError::Shape(format!("{m} modes but mismatched probabilities, inputs or tpm")));
        }
        for row in tpm.row_iter() {
            if row.iter().any(|v| *v < 0.0 || !v.is_finite()) || (row.sum() - 1.0).abs() > 1e-12 {
                return Err(FilterError::InvalidModel("tpm rows must be stochastic".into()));
            }
        }
        Ok(Self { beliefs, model_probs, tpm, inputs })
    }

    /// Same initial belief in every mode, uniform mode probabilities.
    pub fn uniform(initial: GaussianBelief, tpm: DMatrix<f64>, inputs: Vec<DVector<f64>>) -> Result<Self> {
        let m = inputs.len();
        Self::new(vec![initial; m], DiscreteDistribution::uniform(m)?, tpm, inputs)
    }

    pub fn mode_count(&self) -> usize {
        self.beliefs.len()
    }

    /// Moment-matched mixture of the mode beliefs.
    pub fn combined(&self) -> GaussianBelief {
        moment_match(&self.beliefs, self.model_probs.weights())
    }
}

fn moment_match(beliefs: &[GaussianBelief], weights: &[f64]) -> GaussianBelief {
    let n = beliefs[0].dim();
    let mut mean = DVector::zeros(n);
    for (b, w) in beliefs.iter().zip(weights) {
        mean += b.mean() * *w;
    }
    let mut cov = DMatrix::zeros(n, n);
    for (b, w) in beliefs.iter().zip(weights) {
        if *w == 0.0 {
            continue;
        }
        let d = b.mean() - &mean;
        cov += (b.covariance() + &d * d.transpose()) * *w;
    }
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianBelief::from_parts(mean, cov)
}

/// Switches for [`ua_imm_step`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ImmOptions {
    /// Also apply the `(α, β)` covariance rescaling inside each mode's
    /// Kalman update. Off by default: only the model probabilities are
    /// tempered.
    pub temper_mode_filters: bool,
}

/// Result of one IMM cycle.
#[derive(Debug, Clone)]
pub struct ImmStep {
    pub bank: ImmBank,
    pub estimate: GaussianBelief,
    /// Per-mode innovation log-likelihoods `ln Λ_j`.
    pub log_likelihoods: Vec<f64>,
}

/// One uncertainty-aware IMM cycle.
///
/// Mixing and per-mode Kalman updates are standard; the mode probabilities
/// are updated as `μ_j ∝ c_j^β · Λ_j^α`, where `c_j` is the predicted mode
/// probability and `Λ_j` the Gaussian innovation likelihood of mode `j`.
/// `models` holds either one model shared by every mode or one per mode.
pub fn ua_imm_step(
    bank: &ImmBank,
    models: &[LinearSSM],
    y: &DVector<f64>,
    t: TemperPair,
    opts: ImmOptions,
) -> Result<ImmStep> {
    let m = bank.mode_count();
    if models.len() != 1 && models.len() != m {
        return Err(FilterError::Shape(format!("{} models for {m} modes", models.len())));
    }
    if opts.temper_mode_filters && !(t.alpha > 0.0 && t.beta > 0.0) {
        return Err(FilterError::InvalidTemper("tempered mode filters need alpha, beta > 0".into()));
    }
    let model_of = |j: usize| if models.len() == 1 { &models[0] } else { &models[j] };
    let mu = bank.model_probs.weights();

    // Predicted mode probabilities and mixing weights μ_{i|j}.
    let predicted: Vec<f64> = (0..m).map(|j| (0..m).map(|i| bank.tpm[(i, j)] * mu[i]).sum()).collect();
    let mut mixed = Vec::with_capacity(m);
    for j in 0..m {
        if predicted[j] > 0.0 {
            let w: Vec<f64> = (0..m).map(|i| bank.tpm[(i, j)] * mu[i] / predicted[j]).collect();
            mixed.push(moment_match(&bank.beliefs, &w));
        } else {
            mixed.push(bank.beliefs[j].clone());
        }
    }

    let mut beliefs = Vec::with_capacity(m);
    let mut log_likelihoods = Vec::with_capacity(m);
    for (j, start) in mixed.iter().enumerate() {
        let model = model_of(j);
        let out = if opts.temper_mode_filters {
            tempered_cycle(start, model, y, Some(&bank.inputs[j]), t)?
        } else {
            let (mean, cov) = predict(start, model, Some(&bank.inputs[j]));
            update(&mean, &cov, &model.h, &model.r, y)?
        };
        beliefs.push(out.belief);
        log_likelihoods.push(out.log_likelihood);
    }

    let log_weights: Vec<f64> = (0..m)
        .map(|j| {
            let prior = match (t.beta == 0.0, predicted[j] > 0.0) {
                (true, _) => 0.0,
                (false, true) => t.beta * predicted[j].ln(),
                (false, false) => f64::NEG_INFINITY,
            };
            let data = if t.alpha == 0.0 { 0.0 } else { t.alpha * log_likelihoods[j] };
            prior + data
        })
        .collect();
    let model_probs = DiscreteDistribution::from_log_weights(&log_weights).map_err(|_| FilterError::ModelCollapse)?;

    let bank = ImmBank { beliefs, model_probs, tpm: bank.tpm.clone(), inputs: bank.inputs.clone() };
    let estimate = bank.combined();
    Ok(ImmStep { bank, estimate, log_likelihoods })
}

/// Runs the IMM over a measurement sequence, returning each step's output.
pub fn run_imm(
    initial: ImmBank,
    models: &[LinearSSM],
    measurements: &[DVector<f64>],
    t: TemperPair,
    opts: ImmOptions,
) -> Result<Vec<ImmStep>> {
    let mut bank = initial;
    let mut steps = Vec::with_capacity(measurements.len());
    for y in measurements {
        let step = ua_imm_step(&bank, models, y, t, opts)?;
        bank = step.bank.clone();
        steps.push(step);
    }
    Ok(steps)
}
