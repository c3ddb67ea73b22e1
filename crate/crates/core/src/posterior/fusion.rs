use nalgebra::Cholesky;

use super::{
    DiscreteDistribution, FusionWeights, GaussianBelief, PosteriorError, Result, TemperPair,
    NORMALIZATION_TOL,
};

/// Maps objective weights `(a1, a2, a3)` to the exponents of the posterior
/// that minimizes the objective: `β = a1/(a1+a2−a3)`, `α = a2/(a1+a2−a3)`.
pub fn weights_to_temper(w: &FusionWeights) -> Result<TemperPair> {
    let denom = w.entropy_coefficient();
    if denom <= 0.0 {
        return Err(PosteriorError::DegenerateWeights);
    }
    TemperPair::new(w.a2 / denom, w.a1 / denom)
}

/// Normalized product `Π d_k^{e_k}` computed in the log domain. A zero
/// exponent drops its factor entirely (`0⁰ = 1`).
fn tempered_product(factors: &[(&DiscreteDistribution, f64)]) -> Result<DiscreteDistribution> {
    let n = factors[0].0.len();
    for (d, _) in factors {
        if d.len() != n {
            return Err(PosteriorError::DimensionMismatch { expected: n, found: d.len() });
        }
    }
    let logs: Vec<f64> = (0..n)
        .map(|i| {
            factors
                .iter()
                .filter(|(_, e)| *e > 0.0)
                .map(|(d, e)| {
                    let w = d.weights()[i];
                    if w > 0.0 {
                        e * w.ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .sum()
        })
        .collect();
    DiscreteDistribution::from_log_weights(&logs)
}

/// The (α, β)-posterior `p^β · l^α` on a finite parameter set.
pub fn fuse_discrete(
    prior: &DiscreteDistribution,
    lik: &DiscreteDistribution,
    t: TemperPair,
) -> Result<DiscreteDistribution> {
    let post = tempered_product(&[(prior, t.beta), (lik, t.alpha)])?;
    Ok(post.carry_atoms_from(prior))
}

/// Multi-sample rule: `p^β · Π_i l_i^{α/n}`.
pub fn fuse_multi_sample(
    prior: &DiscreteDistribution,
    liks: &[DiscreteDistribution],
    t: TemperPair,
) -> Result<DiscreteDistribution> {
    if liks.is_empty() {
        return Err(PosteriorError::InvalidDistribution("no likelihoods supplied".into()));
    }
    let share = t.alpha / liks.len() as f64;
    let mut factors = vec![(prior, t.beta)];
    factors.extend(liks.iter().map(|l| (l, share)));
    Ok(tempered_product(&factors)?.carry_atoms_from(prior))
}

/// A prior with its pooling weight `β_i` in the multi-prior rule.
#[derive(Debug, Clone)]
pub struct WeightedPrior {
    pub prior: DiscreteDistribution,
    pub weight: f64,
}

/// Multi-prior, multi-sample rule: `Π_i p_i^{β·β_i} · Π_j l_j^{α/n}`.
pub fn fuse_multi_prior(
    priors: &[WeightedPrior],
    liks: &[DiscreteDistribution],
    t: TemperPair,
) -> Result<DiscreteDistribution> {
    if priors.is_empty() || liks.is_empty() {
        return Err(PosteriorError::InvalidWeights("need at least one prior and one sample".into()));
    }
    if priors.iter().any(|p| !(0.0..=1.0).contains(&p.weight)) {
        return Err(PosteriorError::InvalidWeights("prior weights must lie in [0, 1]".into()));
    }
    let total: f64 = priors.iter().map(|p| p.weight).sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(PosteriorError::InvalidWeights(format!("prior weights sum to {total}")));
    }
    let share = t.alpha / liks.len() as f64;
    let mut factors: Vec<(&DiscreteDistribution, f64)> =
        priors.iter().map(|p| (&p.prior, t.beta * p.weight)).collect();
    factors.extend(liks.iter().map(|l| (l, share)));
    Ok(tempered_product(&factors)?.carry_atoms_from(&priors[0].prior))
}

/// Minimizer of the weighted objective. When `a3 = a1 + a2` the minimizer is
/// any distribution on the weighted-MAP set, which is reported in the error.
pub fn generalized_posterior(
    prior: &DiscreteDistribution,
    lik: &DiscreteDistribution,
    w: &FusionWeights,
) -> Result<DiscreteDistribution> {
    prior.check_len(lik)?;
    match weights_to_temper(w) {
        Ok(t) => fuse_discrete(prior, lik, t),
        Err(PosteriorError::DegenerateWeights) => {
            Err(PosteriorError::DegenerateMap { argmax: weighted_map_set(prior, lik, w) })
        }
        Err(e) => Err(e),
    }
}

fn weighted_map_set(p: &DiscreteDistribution, l: &DiscreteDistribution, w: &FusionWeights) -> Vec<usize> {
    let term = |coef: f64, x: f64| {
        if coef == 0.0 {
            0.0
        } else if x > 0.0 {
            coef * x.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let scores: Vec<f64> =
        p.weights().iter().zip(l.weights()).map(|(pi, li)| term(w.a1, *pi) + term(w.a2, *li)).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * best.abs().max(1.0);
    scores.iter().enumerate().filter(|(_, s)| **s >= best - slack).map(|(i, _)| i).collect()
}

/// The (α, β)-posterior for Gaussian prior and likelihood, in information
/// form: precision `βΛ_p + αΛ_l`, information vector `βΛ_p μ_p + αΛ_l μ_l`.
pub fn fuse_gaussian(prior: &GaussianBelief, lik: &GaussianBelief, t: TemperPair) -> Result<GaussianBelief> {
    if prior.dim() != lik.dim() {
        return Err(PosteriorError::DimensionMismatch { expected: prior.dim(), found: lik.dim() });
    }
    if t.alpha + t.beta <= 0.0 {
        return Err(PosteriorError::DegeneratePosterior);
    }
    let prior_prec = prior.precision()?;
    let lik_prec = lik.precision()?;
    let precision = &prior_prec * t.beta + &lik_prec * t.alpha;
    let information = &prior_prec * prior.mean() * t.beta + &lik_prec * lik.mean() * t.alpha;
    let chol = Cholesky::new(precision).ok_or(PosteriorError::NotPositiveDefinite)?;
    let mean = chol.solve(&information);
    let cov = chol.inverse();
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianBelief::from_parts(mean, cov))
}
