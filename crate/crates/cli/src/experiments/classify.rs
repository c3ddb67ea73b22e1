//! λ-weighted naive Bayes: accuracy curve over λ and a surrogate-tuned λ.

use std::fs::File;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use uabayes::classify::{
    misclassification_rate, read_dataset_csv, train_gaussian, train_multinomial, GaussianNBModel, LabeledDataset,
    MultinomialNBModel, NaiveBayes,
};
use uabayes::simulate::{generate_classification_corpus, ScenarioConfig};
use uabayes::tuning::{rbf_surrogate_optimize, SearchDomain, SurrogateOptions, TuningResult};

use crate::config::{ClassifierKind, ClassifyConfig, RunConfig};
use crate::output::OutputDir;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Gaussian(GaussianNBModel),
    Multinomial(MultinomialNBModel),
}

impl TrainedModel {
    pub fn train(kind: ClassifierKind, data: &LabeledDataset) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Gaussian => Self::Gaussian(train_gaussian(data)?),
            ClassifierKind::Multinomial => Self::Multinomial(train_multinomial(data)?),
        })
    }

    pub fn as_dyn(&self) -> &dyn NaiveBayes {
        match self {
            Self::Gaussian(m) => m,
            Self::Multinomial(m) => m,
        }
    }
}

/// Train and test splits: the external CSVs when both are configured,
/// otherwise the seeded synthetic corpus.
pub fn load_data(seed: u64, c: &ClassifyConfig) -> Result<(LabeledDataset, LabeledDataset)> {
    match (&c.train_csv, &c.test_csv) {
        (Some(train), Some(test)) => {
            let open = |p: &std::path::Path| File::open(p).with_context(|| format!("opening {}", p.display()));
            let train = read_dataset_csv(open(train)?, None).with_context(|| format!("reading {}", train.display()))?;
            let test = read_dataset_csv(open(test)?, Some(train.n_classes()))
                .with_context(|| format!("reading {}", test.display()))?;
            Ok((train, test))
        }
        (None, None) => Ok(generate_classification_corpus(&ScenarioConfig::new(seed, 1, 1)?, &c.corpus)?),
        _ => bail!("train_csv and test_csv must be given together"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub lambda_star: f64,
    pub accuracy_star: f64,
    pub accuracy_at_half: f64,
    /// Best λ on the accuracy curve (earliest on ties).
    pub grid_lambda: f64,
    pub grid_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
}

pub struct ClassifyOutcome {
    pub report: ClassifyReport,
    /// `(λ, accuracy)` along the grid.
    pub curve: Vec<(f64, f64)>,
    pub tuning: TuningResult,
    pub model: TrainedModel,
}

pub fn lambda_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        bail!("lambda_step must lie in (0, 1], got {step}");
    }
    let n = (1.0 / step).round() as usize;
    Ok((0..=n).map(|i| (i as f64 * step).min(1.0)).collect())
}

pub fn classify(seed: u64, c: &ClassifyConfig) -> Result<ClassifyOutcome> {
    let (train, test) = load_data(seed, c)?;
    let model = TrainedModel::train(c.model, &train)?;
    let m = model.as_dyn();
    let error = |w: &[f64]| misclassification_rate(m, &test, w[0]).unwrap_or(f64::INFINITY);

    let curve: Vec<(f64, f64)> = lambda_grid(c.lambda_step)?.into_iter().map(|l| (l, 1.0 - error(&[l]))).collect();
    let (grid_lambda, grid_accuracy) = curve.iter().copied().fold((0.5, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best });

    let tuning = rbf_surrogate_optimize(
        |w: &[f64]| error(w),
        &SearchDomain::unit_interval(),
        c.budget,
        seed,
        &[0.5],
        &SurrogateOptions::default(),
    )?;
    let report = ClassifyReport {
        lambda_star: tuning.best_point[0],
        accuracy_star: 1.0 - tuning.best_value,
        accuracy_at_half: 1.0 - tuning.evaluations[0].value,
        grid_lambda,
        grid_accuracy,
        train_size: train.len(),
        test_size: test.len(),
    };
    Ok(ClassifyOutcome { report, curve, tuning, model })
}

#[derive(Serialize)]
struct CurveRow {
    lambda: f64,
    accuracy: f64,
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let outcome = classify(cfg.seed, &cfg.classify)?;
    let rows: Vec<CurveRow> = outcome.curve.iter().map(|(lambda, accuracy)| CurveRow { lambda: *lambda, accuracy: *accuracy }).collect();
    out.csv("accuracy_curve.csv", &["lambda", "accuracy"], &rows)?;
    outcome.tuning.write_trace_csv(out.file("classify_trace.csv")?)?;
    out.json("classify_result.json", &outcome.report)?;
    out.json("model.json", &outcome.model)?;
    let r = &outcome.report;
    eprintln!("lambda* = {:.4}: accuracy {:.4} (λ = 0.5: {:.4})", r.lambda_star, r.accuracy_star, r.accuracy_at_half);
    Ok(r.accuracy_star >= r.accuracy_at_half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use uabayes::simulate::CorpusParams;

    #[test]
    fn grid_covers_both_ends() {
        let g = lambda_grid(0.001).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!((g[0], g[500], g[1000]), (0.0, 0.5, 1.0));
        assert!(lambda_grid(0.0).is_err());
    }

    #[test]
    fn tuned_lambda_never_loses_to_half() {
        let c = ClassifyConfig {
            corpus: CorpusParams { instances: 500, corrupted_train_probs: Some(vec![0.9, 0.1]), ..Default::default() },
            lambda_step: 0.01,
            budget: 15,
            ..Default::default()
        };
        let o = classify(4, &c).unwrap();
        assert!(o.report.accuracy_star >= o.report.accuracy_at_half);
        assert_eq!(o.tuning.evaluations[0].point, vec![0.5]);
    }
}
