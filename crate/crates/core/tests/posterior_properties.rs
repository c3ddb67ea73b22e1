use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uabayes::posterior::{
    best_scale, brute_force_posterior, fuse_discrete, fuse_gaussian, scaling_gain_condition, weights_to_temper,
    OracleSettings, DEFAULT_ALPHA_MAX,
};
use uabayes::{DiscreteDistribution, FusionWeights, GaussianBelief, ScalableDistribution, TemperPair};

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn population(seed: u64, count: usize, atoms: usize) -> Vec<DiscreteDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| DiscreteDistribution::new(random_simplex(&mut rng, atoms)).unwrap()).collect()
}

fn alpha_grid() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 10.0).collect()
}

/// Direct Shannon entropy of `h^α / Σ h^α`, computed from scratch.
fn scaled_entropy(h: &[f64], alpha: f64) -> f64 {
    let powered: Vec<f64> = h.iter().map(|v| v.powf(alpha)).collect();
    let z: f64 = powered.iter().sum();
    -powered.iter().map(|v| v / z).filter(|v| *v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

#[test]
fn entropy_strictly_decreases_in_alpha() {
    for h in population(20, 200, 50) {
        let ents: Vec<f64> = alpha_grid().iter().map(|a| h.alpha_scale(*a).unwrap().entropy()).collect();
        for w in ents.windows(2) {
            assert!(w[1] - w[0] < -1e-12);
        }
        for (a, e) in alpha_grid().iter().zip(&ents) {
            assert!((e - scaled_entropy(h.weights(), *a)).abs() < 1e-10);
        }
    }
}

#[test]
fn entropy_difference_sign_pattern() {
    for h in population(21, 200, 50) {
        let base = h.entropy();
        for a in alpha_grid() {
            let e = h.alpha_scale(a).unwrap().entropy() - base;
            if a < 1.0 {
                assert!(e > 0.0);
            } else if a > 1.0 {
                assert!(e < 0.0);
            } else {
                assert_eq!(e, 0.0);
            }
        }
    }
}

#[test]
fn self_divergence_is_convex_with_minimum_at_one() {
    for h in population(22, 200, 50) {
        let grid = alpha_grid();
        let kl: Vec<f64> = grid.iter().map(|a| h.kl_divergence(&h.alpha_scale(*a).unwrap()).unwrap()).collect();
        for i in 1..grid.len() {
            if grid[i] <= 1.0 + 1e-12 {
                assert!(kl[i] < kl[i - 1]);
            } else if grid[i - 1] >= 1.0 - 1e-12 {
                assert!(kl[i] > kl[i - 1]);
            }
        }
        for i in 1..grid.len() - 1 {
            assert!(kl[i] <= 0.5 * (kl[i - 1] + kl[i + 1]) + 1e-10);
        }
    }
}

#[test]
fn oracle_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let p = DiscreteDistribution::new(random_simplex(&mut rng, 3)).unwrap();
        let l = DiscreteDistribution::new(random_simplex(&mut rng, 3)).unwrap();
        let a1 = rng.random_range(0.05..3.0);
        let a2 = rng.random_range(0.05..3.0);
        let a3 = rng.random_range(-2.0..0.9) * (a1 + a2);
        let w = FusionWeights::new(a1, a2, a3).unwrap();
        let closed = fuse_discrete(&p, &l, weights_to_temper(&w).unwrap()).unwrap();
        let oracle = brute_force_posterior(&p, &l, &w, OracleSettings::default()).unwrap();
        assert!(closed.total_variation(&oracle).unwrap() <= 1e-3);
    }
}

#[test]
fn scaling_improves_whenever_the_gain_condition_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(2..8);
        let h0 = DiscreteDistribution::new(random_simplex(&mut rng, n)).unwrap();
        let h = DiscreteDistribution::new(random_simplex(&mut rng, n)).unwrap();
        if scaling_gain_condition(&h0, &h).unwrap().abs() <= 0.01 || h.is_uniform() {
            continue;
        }
        let s = best_scale(&h0, &h, DEFAULT_ALPHA_MAX).unwrap();
        assert!(s.kl_star < s.kl_unscaled - 1e-9, "{s:?}");
        checked += 1;
    }
}

/// Trapezoid integral of `f` on `[-20, 20]`.
fn trapezoid(f: impl Fn(f64) -> f64) -> f64 {
    let n = 40_000;
    let dx = 40.0 / n as f64;
    (0..=n)
        .map(|i| {
            let x = -20.0 + i as f64 * dx;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * f(x)
        })
        .sum::<f64>()
        * dx
}

#[test]
fn gaussian_fusion_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..20 {
        let (m1, v1) = (rng.random_range(-3.0..3.0), rng.random_range(0.3..3.0));
        let (m2, v2) = (rng.random_range(-3.0..3.0), rng.random_range(0.3..3.0));
        let t = TemperPair::new(rng.random_range(0.1..3.0), rng.random_range(0.1..3.0)).unwrap();
        let pdf = |x: f64, m: f64, v: f64| (-(x - m).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
        let unnorm = |x: f64| pdf(x, m1, v1).powf(t.beta) * pdf(x, m2, v2).powf(t.alpha);
        let z = trapezoid(unnorm);
        let mean = trapezoid(|x| x * unnorm(x)) / z;
        let var = trapezoid(|x| (x - mean).powi(2) * unnorm(x)) / z;
        let fused = fuse_gaussian(&GaussianBelief::scalar(m1, v1).unwrap(), &GaussianBelief::scalar(m2, v2).unwrap(), t).unwrap();
        assert!((fused.mean()[0] - mean).abs() < 1e-6);
        assert!((fused.covariance()[(0, 0)] - var).abs() < 1e-6);
        let density = |x: f64| pdf(x, fused.mean()[0], fused.covariance()[(0, 0)]);
        for x in [-2.0, -0.5, 0.0, 0.7, 2.5] {
            assert!((density(x) - unnorm(x) / z).abs() < 1e-6);
        }
    }
}

#[test]
fn gaussian_self_divergence_closed_form() {
    let h = GaussianBelief::scalar(0.0, 1.0).unwrap();
    for a in alpha_grid() {
        let kl = h.kl_divergence(&h.alpha_scale(a).unwrap()).unwrap();
        assert!((kl - (-0.5 * a.ln() + a / 2.0 - 0.5)).abs() < 1e-12);
    }
}

#[test]
fn conventional_fusion_is_bayes_rule() {
    for pair in population(26, 100, 6).chunks(2) {
        let (p, l) = (&pair[0], &pair[1]);
        let prod: Vec<f64> = p.weights().iter().zip(l.weights()).map(|(a, b)| a * b).collect();
        let z: f64 = prod.iter().sum();
        let post = fuse_discrete(p, l, TemperPair::conventional()).unwrap();
        for (a, b) in post.weights().iter().zip(&prod) {
            assert!((a - b / z).abs() < 1e-14);
        }
    }
}

#[test]
fn multivariate_gaussian_fusion_in_information_form() {
    let p = GaussianBelief::new(DVector::from_vec(vec![1.0, -1.0]), DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
    let l = GaussianBelief::new(DVector::from_vec(vec![0.0, 2.0]), DMatrix::from_row_slice(2, 2, &[1.0, -0.2, -0.2, 0.5])).unwrap();
    let t = TemperPair::new(0.7, 1.6).unwrap();
    let ip = p.covariance().clone().try_inverse().unwrap();
    let il = l.covariance().clone().try_inverse().unwrap();
    let cov = (&ip * t.beta + &il * t.alpha).try_inverse().unwrap();
    let mean = &cov * (&ip * p.mean() * t.beta + &il * l.mean() * t.alpha);
    let fused = fuse_gaussian(&p, &l, t).unwrap();
    assert!((fused.mean() - mean).amax() < 1e-12);
    assert!((fused.covariance() - cov).amax() < 1e-12);
}

fn simplex_strategy(n: usize) -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec(1e-4f64..1.0, n).prop_map(|raw| DiscreteDistribution::from_unnormalized(raw).unwrap())
}

proptest! {
    #[test]
    fn unit_scaling_is_bit_exact(h in simplex_strategy(7)) {
        prop_assert_eq!(h.alpha_scale(1.0).unwrap(), h);
    }

    #[test]
    fn scaled_distributions_stay_normalized(h in simplex_strategy(9), a in 0.0f64..8.0) {
        let s = h.alpha_scale(a).unwrap();
        prop_assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(s.weights().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn kl_is_non_negative_and_zero_on_self(a in simplex_strategy(5), b in simplex_strategy(5)) {
        prop_assert!(a.kl_divergence(&b).unwrap() >= 0.0);
        prop_assert!(a.kl_divergence(&a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fusion_depends_on_exponents_only_through_the_product(
        p in simplex_strategy(4), l in simplex_strategy(4), a in 0.0f64..4.0, b in 0.0f64..4.0,
    ) {
        prop_assume!(a + b > 0.0);
        let t = TemperPair::new(a, b).unwrap();
        let fused = fuse_discrete(&p, &l, t).unwrap();
        let prod: Vec<f64> = p.weights().iter().zip(l.weights()).map(|(x, y)| x.powf(b) * y.powf(a)).collect();
        let z: f64 = prod.iter().sum();
        for (f, v) in fused.weights().iter().zip(&prod) {
            prop_assert!((f - v / z).abs() < 1e-10);
        }
    }

    #[test]
    fn weights_map_matches_ratio_formula(a1 in 0.0f64..5.0, a2 in 0.0f64..5.0, frac in -3.0f64..0.99) {
        prop_assume!(a1 + a2 > 1e-6);
        let w = FusionWeights::new(a1, a2, frac * (a1 + a2)).unwrap();
        let t = weights_to_temper(&w).unwrap();
        let c = a1 + a2 - frac * (a1 + a2);
        prop_assert!((t.beta - a1 / c).abs() < 1e-12 * (1.0 + t.beta));
        prop_assert!((t.alpha - a2 / c).abs() < 1e-12 * (1.0 + t.alpha));
    }
}
