//! Tempered Bayes fusion on finite parameter sets and Gaussian families.
//!
//! The central object is the (α, β)-posterior `p^β · l^α` (normalized), where
//! `p` is the prior and `l` the likelihood distribution obtained by
//! normalizing the likelihood function over the parameter set. The module
//! also carries the variational objective the posterior minimizes, a
//! projected-gradient oracle for that objective, and the entropy/KL tools
//! used to study α-scaled distributions.

mod discrete;
mod fusion;
mod gaussian;
mod objective;
mod ridge;
mod scaling;

pub use discrete::{likelihood_distribution, DiscreteDistribution};
pub use fusion::{
    fuse_discrete, fuse_gaussian, fuse_multi_prior, fuse_multi_sample, generalized_posterior,
    weights_to_temper, WeightedPrior,
};
pub use gaussian::GaussianBelief;
pub use objective::{brute_force_posterior, objective_value, OracleSettings};
pub use ridge::map_ridge;
pub use scaling::{bh_bound, best_scale, scaling_gain_condition, ScaleSearch, DEFAULT_ALPHA_MAX};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that weights form a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PosteriorError {
    #[error("invalid likelihood: values must be finite, non-negative and not all zero")]
    InvalidLikelihood,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid exponent {name} = {value}")]
    InvalidExponent { name: &'static str, value: f64 },
    #[error("invalid fusion weights: {0}")]
    InvalidWeights(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("alpha = 0 has no Gaussian representation (uniform limit)")]
    DegenerateScale,
    #[error("posterior collapses onto the weighted MAP set (a3 = a1 + a2)")]
    DegenerateWeights,
    #[error("posterior collapses onto the weighted MAP set {argmax:?}")]
    DegenerateMap { argmax: Vec<usize> },
    #[error("alpha and beta are both zero")]
    DegeneratePosterior,
    #[error("prior and likelihood have disjoint supports")]
    EmptyPosterior,
    #[error("covariance is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("scaling is idle: the nominal distribution is uniform")]
    NoGain,
    #[error("oracle did not converge within {iterations} iterations")]
    OracleFailure { iterations: usize },
    #[error("singular normal equations")]
    SingularSystem,
}

pub type Result<T, E = PosteriorError> = std::result::Result<T, E>;

/// Exponents applied to the likelihood (`alpha`) and the prior (`beta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperPair {
    pub alpha: f64,
    pub beta: f64,
}

impl TemperPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_exponent("alpha", alpha)?;
        check_exponent("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    /// The conventional Bayes rule, `(1, 1)`.
    pub const fn conventional() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }

    /// α-posterior: `p · l^a`.
    pub fn alpha_posterior(a: f64) -> Result<Self> {
        Self::new(a, 1.0)
    }

    /// β-posterior: `p^b · l`.
    pub fn beta_posterior(b: f64) -> Result<Self> {
        Self::new(1.0, b)
    }

    /// γ-posterior: `p^g · l^g`.
    pub fn gamma_posterior(g: f64) -> Result<Self> {
        Self::new(g, g)
    }

    /// α-pooled posterior: `p^a · l^(1-a)` with `a ∈ [0, 1]`.
    pub fn pooled(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(PosteriorError::InvalidExponent { name: "pooling weight", value: a });
        }
        Self::new(1.0 - a, a)
    }

    /// α-prior: the data is ignored, `p^a`.
    pub fn alpha_prior(a: f64) -> Result<Self> {
        Self::new(0.0, a)
    }

    /// α-likelihood: the prior is ignored, `l^a`.
    pub fn alpha_likelihood(a: f64) -> Result<Self> {
        Self::new(a, 0.0)
    }

    /// Classifier mixing weight `λ = α / (α + β)`; `None` when both are zero.
    pub fn lambda(&self) -> Option<f64> {
        let total = self.alpha + self.beta;
        (total > 0.0).then(|| self.alpha / total)
    }
}

impl Default for TemperPair {
    fn default() -> Self {
        Self::conventional()
    }
}

/// Weights `(a1, a2, a3)` of the objective
/// `a1·KL(q‖p) + a2·KL(q‖l) + a3·Ent(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl FusionWeights {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && a3.is_finite()) {
            return Err(PosteriorError::InvalidWeights("weights must be finite".into()));
        }
        if a1 < 0.0 || a2 < 0.0 {
            return Err(PosteriorError::InvalidWeights(format!(
                "a1 and a2 must be non-negative, got ({a1}, {a2})"
            )));
        }
        if a3 > a1 + a2 {
            return Err(PosteriorError::InvalidWeights(format!(
                "a3 = {a3} exceeds a1 + a2 = {}",
                a1 + a2
            )));
        }
        Ok(Self { a1, a2, a3 })
    }

    /// Coefficient of `Σ q ln q` once the objective is expanded.
    pub fn entropy_coefficient(&self) -> f64 {
        self.a1 + self.a2 - self.a3
    }
}

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(PosteriorError::InvalidExponent { name, value })
    }
}

/// Entropy, divergence and α-scaling shared by the discrete and Gaussian
/// families.
pub trait ScalableDistribution: Sized {
    /// Shannon entropy (discrete) or differential entropy (Gaussian), in nats.
    fn entropy(&self) -> f64;

    /// `KL(self ‖ other)`. Returns `f64::INFINITY` when the support of
    /// `self` is not contained in the support of `other`.
    fn kl_divergence(&self, other: &Self) -> Result<f64>;

    /// The α-scaled distribution `h^α / ∫ h^α`.
    fn alpha_scale(&self, alpha: f64) -> Result<Self>;

    /// Uniform distributions are fixed points of α-scaling.
    fn is_uniform(&self) -> bool;
}

pub fn entropy<D: ScalableDistribution>(h: &D) -> f64 {
    h.entropy()
}

pub fn kl_divergence<D: ScalableDistribution>(a: &D, b: &D) -> Result<f64> {
    a.kl_divergence(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_cases_map_to_expected_exponents() {
        assert_eq!(TemperPair::pooled(0.3).unwrap(), TemperPair { alpha: 0.7, beta: 0.3 });
        assert_eq!(TemperPair::alpha_prior(2.0).unwrap(), TemperPair { alpha: 0.0, beta: 2.0 });
        assert_eq!(TemperPair::alpha_likelihood(2.0).unwrap(), TemperPair { alpha: 2.0, beta: 0.0 });
        assert_eq!(TemperPair::gamma_posterior(0.5).unwrap(), TemperPair { alpha: 0.5, beta: 0.5 });
        assert!(TemperPair::pooled(1.5).is_err());
        assert!(TemperPair::new(-1.0, 1.0).is_err());
        assert!(TemperPair::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn fusion_weights_enforce_assumptions() {
        assert!(FusionWeights::new(-0.1, 1.0, 0.0).is_err());
        assert!(FusionWeights::new(1.0, 1.0, 2.5).is_err());
        assert!(FusionWeights::new(1.0, 1.0, -3.0).is_ok());
        assert!(FusionWeights::new(1.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn lambda_of_pair() {
        assert_eq!(TemperPair::new(1.0, 3.0).unwrap().lambda(), Some(0.25));
        assert_eq!(TemperPair::new(0.0, 0.0).unwrap().lambda(), None);
    }
}
