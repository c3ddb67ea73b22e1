//! Run configuration: built-in defaults, overridden by a JSON file,
//! overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use uabayes::simulate::{BenchmarkParams, CorpusParams, JumpLinearParams};
use uabayes::{DiscreteDistribution, GaussianBelief};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads; all cores when unset.
    pub workers: Option<usize>,
    pub paper_scale: bool,
    pub horizon: usize,
    pub episodes: usize,
    pub properties: PropertiesConfig,
    pub fuse: FuseConfig,
    pub kalman: KalmanConfig,
    pub pf: PfConfig,
    pub imm: ImmConfig,
    pub classify: ClassifyConfig,
    pub tune: TuneConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            out: PathBuf::from("out"),
            workers: None,
            paper_scale: false,
            horizon: 100,
            episodes: 100,
            properties: PropertiesConfig::default(),
            fuse: FuseConfig::default(),
            kalman: KalmanConfig::default(),
            pf: PfConfig::default(),
            imm: ImmConfig::default(),
            classify: ClassifyConfig::default(),
            tune: TuneConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertiesConfig {
    /// Random distributions checked for the entropy and self-divergence
    /// properties.
    pub distributions: usize,
    pub atoms: usize,
    /// Random instances for the closed form vs. oracle comparison.
    pub oracle_instances: usize,
    /// Random pairs for the scaling-gain property.
    pub scale_pairs: usize,
    /// Distributions whose curves are written out.
    pub curve_samples: usize,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        Self { distributions: 200, atoms: 50, oracle_instances: 100, scale_pairs: 100, curve_samples: 5 }
    }
}

/// A prior or likelihood for `fuse`: a discrete weight vector (optionally
/// with atoms) or a Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Belief {
    Gaussian(GaussianBelief),
    Discrete(DiscreteDistribution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuseConfig {
    pub prior: Belief,
    pub likelihood: Belief,
    pub alpha: f64,
    pub beta: f64,
    /// Objective weights `[a1, a2, a3]`; when given they determine the
    /// exponents instead of `alpha` and `beta`.
    pub weights: Option<[f64; 3]>,
}

impl Default for FuseConfig {
    fn default() -> Self {
        Self {
            prior: Belief::Discrete(DiscreteDistribution::new(vec![0.4, 0.6]).expect("valid")),
            likelihood: Belief::Discrete(DiscreteDistribution::new(vec![0.4, 0.6]).expect("valid")),
            alpha: 1.0,
            beta: 1.0,
            weights: None,
        }
    }
}

/// Linear-Gaussian model given as nested row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearModelConfig {
    pub f: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

impl Default for LinearModelConfig {
    /// Constant-velocity target with unit acceleration noise and unit
    /// position-measurement noise.
    fn default() -> Self {
        Self {
            f: vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            g: vec![vec![0.5], vec![1.0]],
            h: vec![vec![1.0, 0.0]],
            q: vec![vec![1.0]],
            r: vec![vec![1.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KalmanConfig {
    /// Model handed to the filter.
    pub model: LinearModelConfig,
    /// The truth uses the filter's `Q` multiplied by this factor; values
    /// other than 1 misspecify the process noise.
    pub truth_process_scale: f64,
    pub x0: Vec<f64>,
    pub initial_var: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            model: LinearModelConfig::default(),
            truth_process_scale: 4.0,
            x0: vec![0.0, 0.0],
            initial_var: 1.0,
            alphas: vec![0.5, 1.0, 2.0],
            betas: vec![0.25, 0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfConfig {
    pub particles: Vec<usize>,
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub benchmark: BenchmarkParams,
}

impl Default for PfConfig {
    fn default() -> Self {
        Self {
            particles: vec![50, 100, 200],
            alphas: vec![0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
            beta: 1.0,
            benchmark: BenchmarkParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImmConfig {
    /// Grid bound: `(α, β) ∈ [0, tau]²`.
    pub tau: f64,
    pub step: f64,
    pub temper_mode_filters: bool,
    pub jump: JumpLinearParams,
}

impl Default for ImmConfig {
    fn default() -> Self {
        Self {
            tau: 3.0,
            step: 0.1,
            temper_mode_filters: false,
            jump: JumpLinearParams { incomplete_model_set: true, ..JumpLinearParams::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Gaussian,
    Multinomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub model: ClassifierKind,
    pub corpus: CorpusParams,
    /// External dataset CSVs; both must be given to replace the synthetic
    /// corpus.
    pub train_csv: Option<PathBuf>,
    pub test_csv: Option<PathBuf>,
    pub lambda_step: f64,
    pub budget: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            model: ClassifierKind::Gaussian,
            corpus: CorpusParams::default(),
            train_csv: None,
            test_csv: None,
            lambda_step: 0.001,
            budget: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneTarget {
    Imm,
    Pf,
    Classify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuneMethod {
    Grid,
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneConfig {
    pub target: TuneTarget,
    pub method: TuneMethod,
    /// Grid step; the target experiment's step when unset.
    pub step: Option<f64>,
    pub budget: usize,
    /// Surrogate start; the conventional setting when unset.
    pub start: Option<Vec<f64>>,
    /// Particle count for the `pf` target.
    pub particles: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self { target: TuneTarget::Imm, method: TuneMethod::Surrogate, step: None, budget: 60, start: None, particles: 100 }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub paper_scale: bool,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Defaults, then the file (if any), then the flags.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut cfg = match file {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        if flags.paper_scale {
            cfg.paper_scale = true;
        }
        if cfg.paper_scale {
            cfg.apply_paper_scale();
        }
        if let Some(seed) = flags.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &flags.out {
            cfg.out = out.clone();
        }
        if flags.workers.is_some() {
            cfg.workers = flags.workers;
        }
        Ok(cfg)
    }

    /// Full-size experiment settings: 500 episodes and a 0.01 grid.
    pub fn apply_paper_scale(&mut self) {
        self.episodes = 500;
        self.imm.step = 0.01;
        if self.tune.step.is_some() {
            self.tune.step = Some(0.01);
        }
    }
}
