use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{episode_seed, Result, ScenarioConfig, SimulateError};
use crate::classify::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    /// Bag-of-words counts drawn from per-class multinomials.
    Counts,
    /// Real features drawn from per-class unit-variance Gaussians.
    Gaussian,
}

/// Synthetic classification corpus with optional train/test mismatch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusParams {
    pub kind: CorpusKind,
    pub n_classes: usize,
    pub n_features: usize,
    /// Total instances; 80% go to training.
    pub instances: usize,
    /// Class frequencies of the test split (and of training when the prior
    /// is not corrupted).
    pub class_probs: Vec<f64>,
    /// Training class frequencies, when they differ from the test split.
    pub corrupted_train_probs: Option<Vec<f64>>,
    /// Spread of the per-class Gaussian means.
    pub separation: f64,
    /// Words per document for count corpora.
    pub doc_length: usize,
    /// Likelihood corruption: Gaussian test features are shifted by this
    /// amount; count corpora mix this fraction of a foreign word
    /// distribution into each test class.
    pub likelihood_shift: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            kind: CorpusKind::Gaussian,
            n_classes: 2,
            n_features: 4,
            instances: 2000,
            class_probs: vec![0.7, 0.3],
            corrupted_train_probs: None,
            separation: 0.5,
            doc_length: 30,
            likelihood_shift: 0.0,
        }
    }
}

impl CorpusParams {
    pub fn validate(&self) -> Result<()> {
        let check_probs = |p: &[f64], name: &str| {
            if p.len() != self.n_classes || p.iter().any(|v| v.is_nan() || *v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(SimulateError::InvalidConfig(format!("{name} must be {} probabilities summing to 1", self.n_classes)));
            }
            Ok(())
        };
        if self.n_classes < 2 || self.n_features == 0 {
            return Err(SimulateError::InvalidConfig("need at least 2 classes and 1 feature".into()));
        }
        if self.instances < 5 {
            return Err(SimulateError::InvalidConfig("need at least 5 instances for an 80/20 split".into()));
        }
        check_probs(&self.class_probs, "class_probs")?;
        if let Some(p) = &self.corrupted_train_probs {
            check_probs(p, "corrupted_train_probs")?;
        }
        if !(self.separation >= 0.0 && self.separation.is_finite() && self.likelihood_shift.is_finite()) {
            return Err(SimulateError::InvalidConfig("separation and shift must be finite".into()));
        }
        if self.kind == CorpusKind::Counts && !(0.0..=1.0).contains(&self.likelihood_shift) {
            return Err(SimulateError::InvalidConfig("count corpora take a mixing fraction in [0, 1]".into()));
        }
        Ok(())
    }
}

enum ClassModel {
    Gaussian(Vec<Vec<f64>>),
    Counts { words: Vec<WeightedIndex<f64>>, n_features: usize, doc_length: usize },
}

impl ClassModel {
    fn draw<R: Rng>(&self, class: usize, rng: &mut R) -> Vec<f64> {
        match self {
            ClassModel::Gaussian(means) => means[class]
                .iter()
                .map(|m| m + Distribution::<f64>::sample(&StandardNormal, rng))
                .collect(),
            ClassModel::Counts { words, n_features, doc_length } => {
                let mut x = vec![0.0; *n_features];
                for _ in 0..*doc_length {
                    x[words[class].sample(rng)] += 1.0;
                }
                x
            }
        }
    }
}

fn split<R: Rng>(model: &ClassModel, probs: &[f64], n: usize, n_classes: usize, rng: &mut R) -> Result<LabeledDataset> {
    let classes = WeightedIndex::new(probs).map_err(|e| SimulateError::InvalidConfig(e.to_string()))?;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let c = classes.sample(rng);
        features.push(model.draw(c, rng));
        labels.push(c);
    }
    Ok(LabeledDataset::new(features, labels, n_classes)?)
}

/// Seeded `(train, test)` corpora with an 80/20 split. Class-conditional
/// distributions are drawn once from the seed; the test split may see a
/// different class prior or shifted class-conditionals.
pub fn generate_classification_corpus(
    cfg: &ScenarioConfig,
    params: &CorpusParams,
) -> Result<(LabeledDataset, LabeledDataset)> {
    cfg.validate()?;
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(cfg.seed, 0));
    let (r, d) = (params.n_classes, params.n_features);
    let (train_model, test_model) = match params.kind {
        CorpusKind::Gaussian => {
            let spread = Normal::new(0.0, params.separation).map_err(|e| SimulateError::InvalidConfig(e.to_string()))?;
            let means: Vec<Vec<f64>> = (0..r).map(|_| (0..d).map(|_| spread.sample(&mut rng)).collect()).collect();
            let shifted = means.iter().map(|m| m.iter().map(|v| v + params.likelihood_shift).collect()).collect();
            (ClassModel::Gaussian(means), ClassModel::Gaussian(shifted))
        }
        CorpusKind::Counts => {
            let gamma = Gamma::new(1.0, 1.0).map_err(|e| SimulateError::InvalidConfig(e.to_string()))?;
            let dirichlet = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let g: Vec<f64> = (0..d).map(|_| gamma.sample(rng)).collect();
                let s: f64 = g.iter().sum();
                g.iter().map(|v| v / s).collect()
            };
            let theta: Vec<Vec<f64>> = (0..r).map(|_| dirichlet(&mut rng)).collect();
            let foreign = dirichlet(&mut rng);
            let mix = params.likelihood_shift;
            let shifted: Vec<Vec<f64>> =
                theta.iter().map(|t| t.iter().zip(&foreign).map(|(a, b)| (1.0 - mix) * a + mix * b).collect()).collect();
            let index = |ps: &[Vec<f64>]| -> Result<Vec<WeightedIndex<f64>>> {
                ps.iter()
                    .map(|p| WeightedIndex::new(p).map_err(|e| SimulateError::InvalidConfig(e.to_string())))
                    .collect()
            };
            let doc_length = params.doc_length;
            (
                ClassModel::Counts { words: index(&theta)?, n_features: d, doc_length },
                ClassModel::Counts { words: index(&shifted)?, n_features: d, doc_length },
            )
        }
    };
    let n_train = (params.instances as f64 * 0.8).round() as usize;
    let n_test = params.instances - n_train;
    let train_probs = params.corrupted_train_probs.as_deref().unwrap_or(&params.class_probs);
    let train = split(&train_model, train_probs, n_train, r, &mut rng)?;
    let test = split(&test_model, &params.class_probs, n_test, r, &mut rng)?;
    Ok((train, test))
}
