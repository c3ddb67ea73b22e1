use serde::{Deserialize, Serialize};

use super::{check_exponent, PosteriorError, Result, ScalableDistribution, NORMALIZATION_TOL};

/// A probability vector over a finite parameter set, optionally carrying the
/// parameter value of each atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteRepr", into = "DiscreteRepr")]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
    atoms: Option<Vec<f64>>,
}

/// JSON form: a bare weight array, or `{weights, atoms}` when atoms exist.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DiscreteRepr {
    Weights(Vec<f64>),
    WithAtoms { weights: Vec<f64>, atoms: Vec<f64> },
}

impl TryFrom<DiscreteRepr> for DiscreteDistribution {
    type Error = PosteriorError;

    fn try_from(repr: DiscreteRepr) -> Result<Self> {
        match repr {
            DiscreteRepr::Weights(w) => Self::new(w),
            DiscreteRepr::WithAtoms { weights, atoms } => Self::new(weights)?.with_atoms(atoms),
        }
    }
}

impl From<DiscreteDistribution> for DiscreteRepr {
    fn from(d: DiscreteDistribution) -> Self {
        match d.atoms {
            Some(atoms) => DiscreteRepr::WithAtoms { weights: d.weights, atoms },
            None => DiscreteRepr::Weights(d.weights),
        }
    }
}

impl DiscreteDistribution {
    /// Wraps an already-normalized weight vector.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(PosteriorError::InvalidDistribution("no atoms".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PosteriorError::InvalidDistribution(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(PosteriorError::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { weights, atoms: None })
    }

    /// Normalizes arbitrary non-negative masses.
    pub fn from_unnormalized(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(PosteriorError::InvalidDistribution("no atoms".into()));
        }
        if values.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PosteriorError::InvalidDistribution(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(PosteriorError::InvalidDistribution("all masses are zero".into()));
        }
        Ok(Self { weights: values.into_iter().map(|v| v / total).collect(), atoms: None })
    }

    /// Builds a distribution from log-masses; `-inf` entries get weight 0.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(PosteriorError::EmptyPosterior);
        }
        let unnorm: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
        let total: f64 = unnorm.iter().sum();
        Ok(Self { weights: unnorm.into_iter().map(|v| v / total).collect(), atoms: None })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(PosteriorError::InvalidDistribution("no atoms".into()));
        }
        Ok(Self { weights: vec![1.0 / n as f64; n], atoms: None })
    }

    pub fn with_atoms(mut self, atoms: Vec<f64>) -> Result<Self> {
        if atoms.len() != self.weights.len() {
            return Err(PosteriorError::DimensionMismatch {
                expected: self.weights.len(),
                found: atoms.len(),
            });
        }
        self.atoms = Some(atoms);
        Ok(self)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> Option<&[f64]> {
        self.atoms.as_deref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, _)| i)
    }

    /// Posterior-mean (MMSE) estimate `Σ θ_i w_i`; requires atoms.
    pub fn mean(&self) -> Option<f64> {
        self.atoms
            .as_ref()
            .map(|atoms| atoms.iter().zip(&self.weights).map(|(a, w)| a * w).sum())
    }

    /// Total-variation distance `½ Σ |a_i − b_i|`.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        self.check_len(other)?;
        Ok(0.5 * self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    pub(crate) fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(PosteriorError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn carry_atoms_from(mut self, source: &Self) -> Self {
        self.atoms = source.atoms.clone();
        self
    }
}

/// Normalizes likelihood values `p(y | θ_i)` over the parameter set.
pub fn likelihood_distribution(
    likelihood_values: &[f64],
    atoms: Option<Vec<f64>>,
) -> Result<DiscreteDistribution> {
    if likelihood_values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(PosteriorError::InvalidLikelihood);
    }
    let total: f64 = likelihood_values.iter().sum();
    if likelihood_values.is_empty() || total <= 0.0 {
        return Err(PosteriorError::InvalidLikelihood);
    }
    let dist = DiscreteDistribution {
        weights: likelihood_values.iter().map(|v| v / total).collect(),
        atoms: None,
    };
    match atoms {
        Some(a) => dist.with_atoms(a),
        None => Ok(dist),
    }
}

impl ScalableDistribution for DiscreteDistribution {
    fn entropy(&self) -> f64 {
        -self.weights.iter().filter(|w| **w > 0.0).map(|w| w * w.ln()).sum::<f64>()
    }

    fn kl_divergence(&self, other: &Self) -> Result<f64> {
        self.check_len(other)?;
        let mut kl = 0.0;
        for (a, b) in self.weights.iter().zip(&other.weights) {
            if *a == 0.0 {
                continue;
            }
            if *b == 0.0 {
                return Ok(f64::INFINITY);
            }
            kl += a * (a / b).ln();
        }
        // Rounding can leave a tiny negative value for a ≈ b.
        Ok(kl.max(0.0))
    }

    fn alpha_scale(&self, alpha: f64) -> Result<Self> {
        check_exponent("alpha", alpha)?;
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        let scaled = if alpha == 0.0 {
            let support = self.support().count() as f64;
            let weights =
                self.weights.iter().map(|w| if *w > 0.0 { 1.0 / support } else { 0.0 }).collect();
            Self { weights, atoms: None }
        } else {
            let logs: Vec<f64> = self
                .weights
                .iter()
                .map(|w| if *w > 0.0 { alpha * w.ln() } else { f64::NEG_INFINITY })
                .collect();
            Self::from_log_weights(&logs)?
        };
        Ok(scaled.carry_atoms_from(self))
    }

    fn is_uniform(&self) -> bool {
        let first = self.weights[0];
        self.weights.iter().all(|w| (w - first).abs() <= NORMALIZATION_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dist(w: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn likelihood_distribution_normalizes() {
        let l = likelihood_distribution(&[2.0, 2.0], None).unwrap();
        assert_eq!(l.weights(), &[0.5, 0.5]);
        let l = likelihood_distribution(&[1.0, 3.0], Some(vec![-1.0, 1.0])).unwrap();
        assert_eq!(l.weights(), &[0.25, 0.75]);
        assert_eq!(l.atoms(), Some(&[-1.0, 1.0][..]));
        assert_eq!(
            likelihood_distribution(&[0.0, 0.0], None),
            Err(PosteriorError::InvalidLikelihood)
        );
        assert_eq!(
            likelihood_distribution(&[1.0, f64::INFINITY], None),
            Err(PosteriorError::InvalidLikelihood)
        );
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![-0.5, 1.5]).is_err());
        assert!(dist(&[0.5, 0.5]).with_atoms(vec![1.0]).is_err());
    }

    #[test]
    fn alpha_scaling_examples() {
        let h = dist(&[0.4, 0.6]).alpha_scale(2.0).unwrap();
        assert_relative_eq!(h.weights()[0], 0.16 / 0.52, epsilon = 1e-15);
        assert!((h.weights()[0] - 0.3077).abs() < 1e-4);
        assert!((h.weights()[0] - 0.3).abs() < 0.01);

        let h = dist(&[0.2, 0.8]).alpha_scale(0.6).unwrap();
        let a = 0.2f64.powf(0.6);
        let b = 0.8f64.powf(0.6);
        assert_relative_eq!(h.weights()[0], a / (a + b), epsilon = 1e-14);
        assert!((h.weights()[0] - 0.3032).abs() < 1e-4);
    }

    #[test]
    fn alpha_one_is_bit_exact_identity() {
        let h = dist(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(h.alpha_scale(1.0).unwrap(), h);
    }

    #[test]
    fn alpha_zero_is_uniform_over_support() {
        let h = dist(&[0.1, 0.0, 0.9]).alpha_scale(0.0).unwrap();
        assert_eq!(h.weights(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn entropy_and_kl_examples() {
        assert_relative_eq!(dist(&[0.5, 0.5]).entropy(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(dist(&[1.0]).entropy(), 0.0);
        assert_eq!(dist(&[1.0, 0.0]).entropy(), 0.0);

        let h = dist(&[0.3, 0.7]);
        assert_eq!(h.kl_divergence(&h).unwrap(), 0.0);

        let kl = dist(&[0.5, 0.5]).kl_divergence(&dist(&[0.25, 0.75])).unwrap();
        let expected = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert_relative_eq!(kl, expected, epsilon = 1e-15);
        assert!((kl - 0.1438).abs() < 1e-4);
    }

    #[test]
    fn kl_support_violation_is_infinite() {
        let kl = dist(&[0.5, 0.5]).kl_divergence(&dist(&[1.0, 0.0])).unwrap();
        assert!(kl.is_infinite());
        let kl = dist(&[1.0, 0.0]).kl_divergence(&dist(&[0.5, 0.5])).unwrap();
        assert_relative_eq!(kl, 2f64.ln());
        assert!(dist(&[1.0]).kl_divergence(&dist(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let h = dist(&[0.25, 0.75]);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, "[0.25,0.75]");
        let back: DiscreteDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);

        let h = h.with_atoms(vec![0.0, 1.0]).unwrap();
        let back: DiscreteDistribution =
            serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.mean(), Some(0.75));

        assert!(serde_json::from_str::<DiscreteDistribution>("[0.5, 0.6]").is_err());
    }
}
