use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, LabeledDataset, NaiveBayes, Result};

/// Variances are floored at this fraction of the largest per-feature
/// variance of the training data.
pub const VARIANCE_FLOOR_RATIO: f64 = 1e-9;

/// Gaussian naive Bayes with per-class, per-feature means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNBModel {
    pub class_log_prior: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl GaussianNBModel {
    /// The floor applied during training: `1e-9 · max_f Var(x_f)`, or `1e-9`
    /// when every feature is constant.
    pub fn variance_floor(data: &LabeledDataset) -> f64 {
        let n = data.len() as f64;
        let max_var = (0..data.n_features())
            .map(|f| {
                let mean = data.features().iter().map(|x| x[f]).sum::<f64>() / n;
                data.features().iter().map(|x| (x[f] - mean).powi(2)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        if max_var > 0.0 {
            VARIANCE_FLOOR_RATIO * max_var
        } else {
            VARIANCE_FLOOR_RATIO
        }
    }
}

/// Maximum-likelihood class-conditional Gaussians with a variance floor.
pub fn train_gaussian(data: &LabeledDataset) -> Result<GaussianNBModel> {
    let d = data.n_features();
    if d == 0 {
        return Err(ClassifyError::InvalidShape("Gaussian training needs at least one feature".into()));
    }
    let counts = data.class_counts();
    if let Some((class, count)) = counts.iter().enumerate().find(|(_, n)| **n < 2) {
        return Err(ClassifyError::InsufficientData { class, count: *count });
    }
    let r = data.n_classes();
    let mut means = vec![vec![0.0; d]; r];
    for (x, y) in data.features().iter().zip(data.labels()) {
        for (m, v) in means[*y].iter_mut().zip(x) {
            *m += v;
        }
    }
    for (row, n) in means.iter_mut().zip(&counts) {
        row.iter_mut().for_each(|m| *m /= *n as f64);
    }
    let mut variances = vec![vec![0.0; d]; r];
    for (x, y) in data.features().iter().zip(data.labels()) {
        for ((s, v), m) in variances[*y].iter_mut().zip(x).zip(&means[*y]) {
            *s += (v - m).powi(2);
        }
    }
    let floor = GaussianNBModel::variance_floor(data);
    for (row, n) in variances.iter_mut().zip(&counts) {
        row.iter_mut().for_each(|s| *s = (*s / *n as f64).max(floor));
    }
    let total = data.len() as f64;
    let class_log_prior = counts.iter().map(|c| (*c as f64 / total).ln()).collect();
    Ok(GaussianNBModel { class_log_prior, means, variances })
}

impl NaiveBayes for GaussianNBModel {
    fn n_classes(&self) -> usize {
        self.class_log_prior.len()
    }

    fn n_features(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    fn class_log_prior(&self) -> &[f64] {
        &self.class_log_prior
    }

    fn log_likelihoods(&self, x: &[f64]) -> Vec<f64> {
        self.means
            .iter()
            .zip(&self.variances)
            .map(|(mu, var)| {
                mu.iter()
                    .zip(var)
                    .zip(x)
                    .map(|((m, s), v)| -0.5 * ((2.0 * PI * s).ln() + (v - m).powi(2) / s))
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_class() {
        let data = LabeledDataset::new(vec![vec![0.0], vec![2.0], vec![5.0], vec![7.0]], vec![0, 0, 1, 1], 2).unwrap();
        let m = train_gaussian(&data).unwrap();
        assert_eq!(m.means[0][0], 1.0);
        assert_eq!(m.variances[0][0], 1.0);
        assert_relative_eq!(m.class_log_prior[1].exp(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn identical_samples_hit_the_floor() {
        let data = LabeledDataset::new(vec![vec![3.0]; 4], vec![0, 0, 1, 1], 2).unwrap();
        let m = train_gaussian(&data).unwrap();
        assert_eq!(m.variances[0][0], VARIANCE_FLOOR_RATIO);
        let data = LabeledDataset::new(vec![vec![3.0], vec![3.0], vec![1.0], vec![5.0]], vec![0, 0, 1, 1], 2).unwrap();
        let m = train_gaussian(&data).unwrap();
        assert_eq!(m.variances[0][0], GaussianNBModel::variance_floor(&data));
        assert!(m.log_likelihoods(&[4.0]).iter().all(|l| l.is_finite()));
    }

    #[test]
    fn insufficient_data() {
        let data = LabeledDataset::new(vec![vec![0.0], vec![2.0], vec![5.0]], vec![0, 0, 1], 2).unwrap();
        assert!(matches!(train_gaussian(&data), Err(ClassifyError::InsufficientData { class: 1, count: 1 })));
    }
}
