//! Property suites for α-scaling and the fusion rule, plus the entropy and
//! self-divergence curves.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use uabayes::posterior::{
    best_scale, brute_force_posterior, fuse_discrete, scaling_gain_condition, weights_to_temper, OracleSettings,
    DEFAULT_ALPHA_MAX,
};
use uabayes::simulate::episode_seed;
use uabayes::{DiscreteDistribution, FusionWeights, ScalableDistribution};

use crate::config::{PropertiesConfig, RunConfig};
use crate::output::OutputDir;

/// Outcome of one property over its seeded population.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Check {
    pub checked: usize,
    pub passed: usize,
    /// Instances that did not meet the property's precondition.
    pub skipped: usize,
    /// Seed of the first failing instance.
    pub failing_seed: Option<u64>,
}

impl Check {
    fn record(&mut self, seed: u64, ok: bool) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else if self.failing_seed.is_none() {
            self.failing_seed = Some(seed);
        }
    }

    pub fn ok(&self) -> bool {
        self.failing_seed.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub entropy_decreasing: Check,
    pub entropy_sign_pattern: Check,
    pub self_divergence_shape: Check,
    pub oracle_agreement: Check,
    pub scaling_gain: Check,
    pub passed: bool,
}

/// `0.1, 0.2, …, 5.0`; the tenth entry is exactly 1.
pub fn alpha_grid() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 10.0).collect()
}

pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn seeded(seed: u64, stream: u64, i: usize) -> (u64, ChaCha8Rng) {
    let s = episode_seed(seed ^ stream, i);
    (s, ChaCha8Rng::seed_from_u64(s))
}

/// Entropy of `h^(α)` strictly decreasing along the grid.
fn entropy_decreasing(h: &DiscreteDistribution) -> bool {
    let ents: Vec<f64> = alpha_grid().iter().map(|a| h.alpha_scale(*a).map(|s| s.entropy())).collect::<Result<_, _>>().unwrap_or_default();
    ents.len() == alpha_grid().len() && ents.windows(2).all(|w| w[1] < w[0])
}

/// `E(α) = H(h^(α)) − H(h)` positive below 1, negative above, zero at 1.
fn entropy_signs(h: &DiscreteDistribution) -> bool {
    let base = h.entropy();
    alpha_grid().iter().all(|a| match h.alpha_scale(*a) {
        Ok(s) => {
            let e = s.entropy() - base;
            if *a < 1.0 {
                e > 0.0
            } else if *a > 1.0 {
                e < 0.0
            } else {
                e == 0.0
            }
        }
        Err(_) => false,
    })
}

/// `KL(h ‖ h^(α))` decreasing on `(0, 1]`, increasing on `[1, ∞)`, and
/// midpoint-convex along the grid.
fn self_divergence_shape(h: &DiscreteDistribution) -> bool {
    let grid = alpha_grid();
    let Ok(kl) = grid.iter().map(|a| h.kl_divergence(&h.alpha_scale(*a)?)).collect::<Result<Vec<f64>, _>>() else {
        return false;
    };
    let monotone = (1..grid.len()).all(|i| {
        if grid[i] <= 1.0 {
            kl[i] < kl[i - 1]
        } else if grid[i - 1] >= 1.0 {
            kl[i] > kl[i - 1]
        } else {
            true
        }
    });
    let convex = (1..grid.len() - 1).all(|i| kl[i] <= 0.5 * (kl[i - 1] + kl[i + 1]) + 1e-10);
    monotone && convex
}

/// Random admissible objective weights: `a1, a2 > 0`, `a3 < a1 + a2`.
pub fn random_weights<R: Rng>(rng: &mut R) -> FusionWeights {
    loop {
        let a1 = rng.random_range(0.1..2.0);
        let a2 = rng.random_range(0.1..2.0);
        let a3 = rng.random_range(-1.0..0.9 * (a1 + a2));
        if let Ok(w) = FusionWeights::new(a1, a2, a3) {
            return w;
        }
    }
}

/// Closed-form posterior agrees with the direct minimizer of the objective
/// within total variation `1e-3`.
fn oracle_agrees(rng: &mut ChaCha8Rng) -> bool {
    let prior = DiscreteDistribution::new(random_simplex(rng, 3)).expect("simplex");
    let lik = DiscreteDistribution::new(random_simplex(rng, 3)).expect("simplex");
    let w = random_weights(rng);
    let closed = weights_to_temper(&w).and_then(|t| fuse_discrete(&prior, &lik, t));
    let direct = brute_force_posterior(&prior, &lik, &w, OracleSettings::default());
    match (closed, direct) {
        (Ok(a), Ok(b)) => a.total_variation(&b).is_ok_and(|tv| tv <= 1e-3),
        _ => false,
    }
}

/// When the gain condition is clearly non-zero, the best scaling improves
/// the divergence strictly. Returns `None` when the precondition fails.
fn scaling_improves(h0: &DiscreteDistribution, h: &DiscreteDistribution) -> Option<bool> {
    let cond = scaling_gain_condition(h0, h).ok()?;
    if cond.abs() <= 0.01 {
        return None;
    }
    Some(best_scale(h0, h, DEFAULT_ALPHA_MAX).is_ok_and(|s| s.kl_star < s.kl_unscaled - 1e-9))
}

pub fn population(seed: u64, p: &PropertiesConfig) -> Vec<(u64, DiscreteDistribution)> {
    (0..p.distributions)
        .map(|i| {
            let (s, mut rng) = seeded(seed, 1, i);
            (s, DiscreteDistribution::new(random_simplex(&mut rng, p.atoms)).expect("simplex"))
        })
        .collect()
}

pub fn check_properties(seed: u64, p: &PropertiesConfig) -> PropertyReport {
    let mut entropy_decreasing_check = Check::default();
    let mut sign = Check::default();
    let mut shape = Check::default();
    for (s, h) in population(seed, p) {
        entropy_decreasing_check.record(s, entropy_decreasing(&h));
        sign.record(s, entropy_signs(&h));
        shape.record(s, self_divergence_shape(&h));
    }

    let mut oracle = Check::default();
    for i in 0..p.oracle_instances {
        let (s, mut rng) = seeded(seed, 2, i);
        oracle.record(s, oracle_agrees(&mut rng));
    }

    let mut gain = Check::default();
    for i in 0..p.scale_pairs {
        let (s, mut rng) = seeded(seed, 3, i);
        let n = rng.random_range(2..10);
        let h0 = DiscreteDistribution::new(random_simplex(&mut rng, n)).expect("simplex");
        let h = DiscreteDistribution::new(random_simplex(&mut rng, n)).expect("simplex");
        match scaling_improves(&h0, &h) {
            Some(ok) => gain.record(s, ok),
            None => gain.skipped += 1,
        }
    }

    let passed = [&entropy_decreasing_check, &sign, &shape, &oracle, &gain].iter().all(|c| c.ok());
    PropertyReport {
        entropy_decreasing: entropy_decreasing_check,
        entropy_sign_pattern: sign,
        self_divergence_shape: shape,
        oracle_agreement: oracle,
        scaling_gain: gain,
        passed,
    }
}

#[derive(Serialize)]
struct CurveRow {
    alpha: f64,
    sample: usize,
    value: f64,
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let p = &cfg.properties;
    let report = check_properties(cfg.seed, p);
    out.json("properties_report.json", &report)?;

    let mut entropy_rows = Vec::new();
    let mut kl_rows = Vec::new();
    for (sample, (_, h)) in population(cfg.seed, p).iter().take(p.curve_samples).enumerate() {
        let base = h.entropy();
        for alpha in alpha_grid() {
            let scaled = h.alpha_scale(alpha)?;
            entropy_rows.push(CurveRow { alpha, sample, value: scaled.entropy() - base });
            kl_rows.push(CurveRow { alpha, sample, value: h.kl_divergence(&scaled)? });
        }
    }
    out.csv("entropy_curve.csv", &["alpha", "sample", "entropy_difference"], &entropy_rows)?;
    out.csv("kl_curve.csv", &["alpha", "sample", "kl"], &kl_rows)?;

    for (name, check) in [
        ("entropy_decreasing", &report.entropy_decreasing),
        ("entropy_sign_pattern", &report.entropy_sign_pattern),
        ("self_divergence_shape", &report.self_divergence_shape),
        ("oracle_agreement", &report.oracle_agreement),
        ("scaling_gain", &report.scaling_gain),
    ] {
        match check.failing_seed {
            None => eprintln!("{name}: {}/{} passed", check.passed, check.checked),
            Some(s) => eprintln!("{name}: FAILED at seed {s} ({}/{} passed)", check.passed, check.checked),
        }
    }
    Ok(report.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_population_passes() {
        let p = PropertiesConfig { distributions: 10, atoms: 8, oracle_instances: 5, scale_pairs: 10, curve_samples: 1 };
        let report = check_properties(3, &p);
        assert!(report.passed, "{report:?}");
        assert_eq!(report.entropy_decreasing.checked, 10);
        assert_eq!(report.scaling_gain.checked + report.scaling_gain.skipped, 10);
    }

    #[test]
    fn uniform_distribution_fails_strict_monotonicity() {
        let h = DiscreteDistribution::uniform(4).unwrap();
        assert!(!entropy_decreasing(&h));
    }
}
