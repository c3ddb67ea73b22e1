use super::{DiscreteDistribution, FusionWeights, PosteriorError, Result, ScalableDistribution};

/// `a1·KL(q‖p) + a2·KL(q‖l) + a3·Ent(q)`; `+∞` when `q` puts mass where a
/// weighted reference has none.
pub fn objective_value(
    q: &DiscreteDistribution,
    prior: &DiscreteDistribution,
    lik: &DiscreteDistribution,
    w: &FusionWeights,
) -> Result<f64> {
    q.check_len(prior)?;
    q.check_len(lik)?;
    let mut value = 0.0;
    if w.a1 != 0.0 {
        value += w.a1 * q.kl_divergence(prior)?;
    }
    if w.a2 != 0.0 {
        value += w.a2 * q.kl_divergence(lik)?;
    }
    if w.a3 != 0.0 {
        value += w.a3 * q.entropy();
    }
    Ok(value)
}

/// Stopping rule for [`brute_force_posterior`].
#[derive(Debug, Clone, Copy)]
pub struct OracleSettings {
    /// Stop once the predicted objective decrease falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 1_000_000 }
    }
}

/// Minimizes the weighted objective directly over the probability simplex.
///
/// This never forms `p^β · l^α`; it descends the expanded objective
/// `c·Σ q ln q − Σ q (a1 ln p + a2 ln l)` with `c = a1 + a2 − a3`, using
/// gradient steps preconditioned by the (diagonal) Hessian and projected
/// onto the hyperplane `Σ q = 1`, with backtracking to stay inside the
/// simplex. The expected result is the closed-form posterior, which makes
/// this an independent check on it.
pub fn brute_force_posterior(
    prior: &DiscreteDistribution,
    lik: &DiscreteDistribution,
    w: &FusionWeights,
    settings: OracleSettings,
) -> Result<DiscreteDistribution> {
    prior.check_len(lik)?;
    let c = w.entropy_coefficient();
    if c <= 0.0 {
        return Err(PosteriorError::DegenerateWeights);
    }

    // Atoms outside the weighted supports make the objective infinite.
    let support: Vec<usize> = (0..prior.len())
        .filter(|&i| (w.a1 == 0.0 || prior.weights()[i] > 0.0) && (w.a2 == 0.0 || lik.weights()[i] > 0.0))
        .collect();
    if support.is_empty() {
        return Err(PosteriorError::EmptyPosterior);
    }
    let linear: Vec<f64> = support
        .iter()
        .map(|&i| {
            let mut b = 0.0;
            if w.a1 != 0.0 {
                b += w.a1 * prior.weights()[i].ln();
            }
            if w.a2 != 0.0 {
                b += w.a2 * lik.weights()[i].ln();
            }
            b
        })
        .collect();
    let objective = |q: &[f64]| -> f64 {
        q.iter().zip(&linear).map(|(qi, bi)| if *qi > 0.0 { c * qi * qi.ln() - qi * bi } else { 0.0 }).sum()
    };

    let m = support.len();
    let mut q = vec![1.0 / m as f64; m];
    let mut f = objective(&q);
    let mut converged = false;
    for _ in 0..settings.max_iter {
        let grad: Vec<f64> = q.iter().zip(&linear).map(|(qi, bi)| c * (qi.ln() + 1.0) - bi).collect();
        // Hessian is diag(c / q_i); project the scaled step onto Σ Δ = 0.
        let nu: f64 = q.iter().zip(&grad).map(|(qi, gi)| qi * gi).sum::<f64>() / q.iter().sum::<f64>();
        let step: Vec<f64> = q.iter().zip(&grad).map(|(qi, gi)| -(qi / c) * (gi - nu)).collect();
        let decrement: f64 = q.iter().zip(&grad).map(|(qi, gi)| (gi - nu).powi(2) * qi / c).sum();
        if decrement / 2.0 <= settings.tol {
            converged = true;
            break;
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = q.iter().zip(&step).map(|(qi, di)| qi + t * di).collect();
            if trial.iter().all(|v| *v > 0.0) {
                let ft = objective(&trial);
                if ft <= f - 0.25 * t * decrement {
                    q = trial;
                    f = ft;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-30 {
                // No representable decrease left; the iterate is optimal to
                // machine precision.
                converged = true;
                break;
            }
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(PosteriorError::OracleFailure { iterations: settings.max_iter });
    }

    let mut weights = vec![0.0; prior.len()];
    for (slot, qi) in support.iter().zip(&q) {
        weights[*slot] = *qi;
    }
    DiscreteDistribution::from_unnormalized(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::{fuse_discrete, weights_to_temper, TemperPair};

    fn dist(w: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn objective_at_identical_inputs_is_entropy() {
        let p = dist(&[0.2, 0.3, 0.5]);
        let w = FusionWeights::new(1.0, 1.0, 1.0).unwrap();
        let v = objective_value(&p, &p, &p, &w).unwrap();
        assert!((v - p.entropy()).abs() < 1e-15);
    }

    #[test]
    fn objective_support_violation_is_infinite() {
        let w = FusionWeights::new(1.0, 1.0, 1.0).unwrap();
        let v = objective_value(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0]), &dist(&[0.5, 0.5]), &w).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn closed_form_beats_random_simplex_points() {
        // Deterministic low-discrepancy points on the 3-simplex.
        let p = dist(&[0.2, 0.5, 0.3]);
        let l = dist(&[0.6, 0.1, 0.3]);
        let w = FusionWeights::new(1.0, 1.0, 1.0).unwrap();
        let best = fuse_discrete(&p, &l, TemperPair::conventional()).unwrap();
        let best_value = objective_value(&best, &p, &l, &w).unwrap();
        for i in 1..10_000u32 {
            let u = (i as f64 * 0.618_033_988_749_895).fract();
            let v = (i as f64 * 0.754_877_666_246_693).fract();
            let (a, b) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
            let q = DiscreteDistribution::from_unnormalized(vec![a, b, 1.0 - a - b]).unwrap();
            assert!(objective_value(&q, &p, &l, &w).unwrap() >= best_value - 1e-12);
        }
    }

    #[test]
    fn oracle_matches_closed_form_cases() {
        let p = dist(&[0.2, 0.5, 0.3]);
        let l = dist(&[0.6, 0.1, 0.3]);
        for (a1, a2, a3) in [(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (0.5, 1.5, -1.0)] {
            let w = FusionWeights::new(a1, a2, a3).unwrap();
            let oracle = brute_force_posterior(&p, &l, &w, OracleSettings::default()).unwrap();
            let closed = fuse_discrete(&p, &l, weights_to_temper(&w).unwrap()).unwrap();
            assert!(oracle.total_variation(&closed).unwrap() < 1e-6, "{a1} {a2} {a3}");
        }
        let w = FusionWeights::new(1.0, 0.0, 0.0).unwrap();
        let oracle = brute_force_posterior(&p, &l, &w, OracleSettings::default()).unwrap();
        assert!(oracle.total_variation(&p).unwrap() < 1e-6);
    }

    #[test]
    fn oracle_rejects_degenerate_weights() {
        let p = dist(&[0.5, 0.5]);
        let w = FusionWeights::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(
            brute_force_posterior(&p, &p, &w, OracleSettings::default()),
            Err(PosteriorError::DegenerateWeights)
        );
    }

    #[test]
    fn oracle_reports_iteration_cap() {
        let p = dist(&[0.01, 0.99]);
        let l = dist(&[0.9, 0.1]);
        let w = FusionWeights::new(1.0, 1.0, 1.0).unwrap();
        let settings = OracleSettings { tol: 0.0, max_iter: 1 };
        assert!(matches!(
            brute_force_posterior(&p, &l, &w, settings),
            Err(PosteriorError::OracleFailure { .. })
        ));
    }
}
