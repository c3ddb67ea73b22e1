use serde::{Deserialize, Serialize};

use super::{ClassifyError, LabeledDataset, NaiveBayes, Result};

/// Additive smoothing constant for the per-class feature counts.
pub const LAPLACE_SMOOTHING: f64 = 1.0;

/// Multinomial naive Bayes over count features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialNBModel {
    pub class_log_prior: Vec<f64>,
    /// `feature_log_prob[c][f] = ln θ_cf`; each row's exponentials sum to 1.
    pub feature_log_prob: Vec<Vec<f64>>,
}

/// Fits class frequencies and Laplace-smoothed feature parameters
/// `(count + 1) / (class total + vocabulary size)`.
pub fn train_multinomial(data: &LabeledDataset) -> Result<MultinomialNBModel> {
    let d = data.n_features();
    if d == 0 || data.is_empty() {
        return Err(ClassifyError::InvalidShape("multinomial training needs at least one feature and one instance".into()));
    }
    let r = data.n_classes();
    let mut totals = vec![vec![0.0; d]; r];
    for (row, (x, y)) in data.features().iter().zip(data.labels()).enumerate() {
        if let Some(column) = x.iter().position(|v| *v < 0.0) {
            return Err(ClassifyError::InvalidFeature { row, column, message: "negative count".into() });
        }
        for (t, v) in totals[*y].iter_mut().zip(x) {
            *t += v;
        }
    }
    let counts = data.class_counts();
    if let Some(c) = counts.iter().position(|n| *n == 0) {
        return Err(ClassifyError::MissingClass(c));
    }
    let n = data.len() as f64;
    let class_log_prior = counts.iter().map(|c| (*c as f64 / n).ln()).collect();
    let feature_log_prob = totals
        .iter()
        .map(|row| {
            let denom = (row.iter().sum::<f64>() + LAPLACE_SMOOTHING * d as f64).ln();
            row.iter().map(|v| (v + LAPLACE_SMOOTHING).ln() - denom).collect()
        })
        .collect();
    Ok(MultinomialNBModel { class_log_prior, feature_log_prob })
}

impl NaiveBayes for MultinomialNBModel {
    fn n_classes(&self) -> usize {
        self.class_log_prior.len()
    }

    fn n_features(&self) -> usize {
        self.feature_log_prob.first().map_or(0, Vec::len)
    }

    fn class_log_prior(&self) -> &[f64] {
        &self.class_log_prior
    }

    /// `Σ_f x_f ln θ_cf`; the multinomial coefficient is class-independent.
    fn log_likelihoods(&self, x: &[f64]) -> Vec<f64> {
        self.feature_log_prob.iter().map(|row| row.iter().zip(x).map(|(l, v)| l * v).sum()).collect()
    }
}
