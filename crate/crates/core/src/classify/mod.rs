//! Naive Bayes classifiers and the λ-weighted decision rule
//! `argmax_c (1 − λ) ln p(c) + λ ln l(x | c)`.
//!
//! The likelihood's normalizer over classes is constant and dropped, so only
//! unnormalized log-likelihoods are computed. Ties go to the lowest class
//! index.

mod dataset;
mod gaussian;
mod multinomial;

pub use dataset::{read_dataset_csv, write_dataset_csv, LabeledDataset};
pub use gaussian::{train_gaussian, GaussianNBModel, VARIANCE_FLOOR_RATIO};
pub use multinomial::{train_multinomial, MultinomialNBModel, LAPLACE_SMOOTHING};

use crate::posterior::TemperPair;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("class {0} has no training instances")]
    MissingClass(usize),
    #[error("class {class} has {count} instances, at least 2 are needed")]
    InsufficientData { class: usize, count: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid feature at row {row}, column {column}: {message}")]
    InvalidFeature { row: usize, column: usize, message: String },
    #[error("label {label} at row {row} is not below the class count {n_classes}")]
    InvalidLabel { row: usize, label: usize, n_classes: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("alpha and beta are both zero")]
    DegenerateClassifier,
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ClassifyError> = std::result::Result<T, E>;

/// A trained class-conditional model.
pub trait NaiveBayes {
    fn n_classes(&self) -> usize;
    fn n_features(&self) -> usize;
    fn class_log_prior(&self) -> &[f64];
    /// Unnormalized `ln l(x | c)` per class. Terms constant across classes
    /// may be omitted.
    fn log_likelihoods(&self, x: &[f64]) -> Vec<f64>;
}

fn check_features<M: NaiveBayes + ?Sized>(model: &M, x: &[f64]) -> Result<()> {
    if x.len() != model.n_features() {
        return Err(ClassifyError::InvalidShape(format!(
            "instance has {} features, model {}",
            x.len(),
            model.n_features()
        )));
    }
    Ok(())
}

fn argmax_weighted<M: NaiveBayes + ?Sized>(model: &M, x: &[f64], prior_weight: f64, data_weight: f64) -> usize {
    let prior = model.class_log_prior();
    let lik = model.log_likelihoods(x);
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for c in 0..model.n_classes() {
        // A zero weight removes the term, even when it is -inf.
        let mut score = 0.0;
        if prior_weight != 0.0 {
            score += prior_weight * prior[c];
        }
        if data_weight != 0.0 {
            score += data_weight * lik[c];
        }
        if score > best_score {
            best = c;
            best_score = score;
        }
    }
    best
}

/// Class maximizing `(1 − λ) ln p(c) + λ ln l(x | c)`.
pub fn predict_lambda<M: NaiveBayes + ?Sized>(model: &M, x: &[f64], lambda: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ClassifyError::InvalidLambda(lambda));
    }
    check_features(model, x)?;
    Ok(argmax_weighted(model, x, 1.0 - lambda, lambda))
}

/// Class maximizing `β ln p(c) + α ln l(x | c)`. Only the ratio of the two
/// exponents matters.
pub fn predict_ab<M: NaiveBayes + ?Sized>(model: &M, x: &[f64], t: TemperPair) -> Result<usize> {
    if t.alpha + t.beta <= 0.0 {
        return Err(ClassifyError::DegenerateClassifier);
    }
    check_features(model, x)?;
    let lambda = t.alpha / (t.alpha + t.beta);
    Ok(argmax_weighted(model, x, 1.0 - lambda, lambda))
}

/// Fraction of instances whose λ-prediction differs from the label.
pub fn misclassification_rate<M: NaiveBayes + ?Sized>(model: &M, data: &LabeledDataset, lambda: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(ClassifyError::EmptyDataset);
    }
    let mut wrong = 0usize;
    for (x, y) in data.features().iter().zip(data.labels()) {
        if predict_lambda(model, x, lambda)? != *y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}
