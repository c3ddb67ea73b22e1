use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FilterError, Result};
use crate::posterior::{DiscreteDistribution, TemperPair};

type TransitionFn = dyn Fn(f64, usize) -> f64 + Send + Sync;
type MeasurementFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Scalar nonlinear model `x_k = f(x_{k-1}, k) + w`, `y_k = g(x_k) + v`
/// with Gaussian `w` and `v`.
#[derive(Clone)]
pub struct NonlinearSSM {
    transition: Arc<TransitionFn>,
    measurement: Arc<MeasurementFn>,
    process_var: f64,
    measurement_var: f64,
}

impl fmt::Debug for NonlinearSSM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearSSM")
            .field("process_var", &self.process_var)
            .field("measurement_var", &self.measurement_var)
            .finish_non_exhaustive()
    }
}

impl NonlinearSSM {
    pub fn new(
        transition: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
        measurement: impl Fn(f64) -> f64 + Send + Sync + 'static,
        process_var: f64,
        measurement_var: f64,
    ) -> Result<Self> {
        if !(process_var >= 0.0 && process_var.is_finite()) {
            return Err(FilterError::InvalidModel(format!("process variance {process_var}")));
        }
        if !(measurement_var > 0.0 && measurement_var.is_finite()) {
            return Err(FilterError::InvalidModel(format!("measurement variance {measurement_var}")));
        }
        Ok(Self {
            transition: Arc::new(transition),
            measurement: Arc::new(measurement),
            process_var,
            measurement_var,
        })
    }

    pub fn transition(&self, x: f64, k: usize) -> f64 {
        (self.transition)(x, k)
    }

    pub fn measurement(&self, x: f64) -> f64 {
        (self.measurement)(x)
    }

    pub fn process_var(&self) -> f64 {
        self.process_var
    }

    pub fn measurement_var(&self) -> f64 {
        self.measurement_var
    }

    /// `ln p(y | x)` up to the constant `−½ ln(2π r)`, which is shared by
    /// every particle.
    fn log_likelihood(&self, y: f64, x: f64) -> f64 {
        let e = y - self.measurement(x);
        -0.5 * e * e / self.measurement_var
    }
}

/// Weighted particles with the effective-sample-size threshold below which
/// they are resampled.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    states: Vec<f64>,
    weights: DiscreteDistribution,
    ess_threshold: f64,
}

impl ParticleSet {
    pub fn new(states: Vec<f64>, weights: DiscreteDistribution, ess_threshold: f64) -> Result<Self> {
        if states.len() != weights.len() {
            return Err(FilterError::Shape(format!(
                "{} states but {} weights",
                states.len(),
                weights.len()
            )));
        }
        let n = states.len() as f64;
        if !(ess_threshold > 0.0 && ess_threshold <= n) {
            return Err(FilterError::InvalidModel(format!("ESS threshold {ess_threshold} outside (0, {n}]")));
        }
        Ok(Self { states, weights, ess_threshold })
    }

    /// Equally weighted particles with the threshold at half the count.
    pub fn uniform(states: Vec<f64>) -> Result<Self> {
        let n = states.len();
        let weights = DiscreteDistribution::uniform(n)?;
        Self::new(states, weights, n as f64 / 2.0)
    }

    /// Draws `n` particles from `N(mean, var)`.
    pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, mean: f64, var: f64, rng: &mut R) -> Result<Self> {
        let sd = var.sqrt();
        let states = (0..n).map(|_| mean + sd * Distribution::<f64>::sample(&StandardNormal, rng)).collect::<Vec<f64>>();
        Self::uniform(states)
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn weights(&self) -> &DiscreteDistribution {
        &self.weights
    }

    pub fn ess_threshold(&self) -> f64 {
        self.ess_threshold
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Weighted-mean (MMSE) estimate.
    pub fn mean(&self) -> f64 {
        self.states.iter().zip(self.weights.weights()).map(|(x, w)| x * w).sum()
    }
}

/// `1 / Σ w_i²`.
pub fn effective_sample_size(weights: &DiscreteDistribution) -> f64 {
    1.0 / weights.weights().iter().map(|w| w * w).sum::<f64>()
}

/// Systematic resampling with the single offset `u ∈ [0, 1)`: offspring are
/// picked at positions `(u + i)/N` on the cumulative weights.
pub fn systematic_resample(particles: &ParticleSet, u: f64) -> ParticleSet {
    let n = particles.len();
    let w = particles.weights.weights();
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for wi in w {
        acc += wi;
        cumulative.push(acc);
    }
    cumulative[n - 1] = 1.0;

    let mut states = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let pos = (u + i as f64) / n as f64;
        while cumulative[j] <= pos && j < n - 1 {
            j += 1;
        }
        states.push(particles.states[j]);
    }
    ParticleSet {
        states,
        weights: DiscreteDistribution::uniform(n).expect("n > 0"),
        ess_threshold: particles.ess_threshold,
    }
}

/// Result of one particle-filter cycle.
#[derive(Debug, Clone)]
pub struct PfStep {
    pub particles: ParticleSet,
    /// Weighted mean after reweighting, before any resampling.
    pub estimate: f64,
    pub ess: f64,
    pub resampled: bool,
}

/// One uncertainty-aware particle-filter cycle at time `k`.
///
/// Randomness is consumed in a fixed order: one standard normal per particle
/// for propagation, then one uniform if resampling triggers. Weights are
/// updated as `w_i ∝ w_i^β · p(y | x_i)^α` in the log domain.
pub fn ua_pf_step<R: Rng + ?Sized>(
    particles: &ParticleSet,
    model: &NonlinearSSM,
    y: f64,
    k: usize,
    t: TemperPair,
    rng: &mut R,
) -> Result<PfStep> {
    if particles.len() < 2 {
        return Err(FilterError::InvalidModel("need at least two particles".into()));
    }
    let sd = model.process_var.sqrt();
    let states: Vec<f64> = particles
        .states
        .iter()
        .map(|x| {
            let noise: f64 = StandardNormal.sample(rng);
            model.transition(*x, k) + sd * noise
        })
        .collect();

    let log_liks: Vec<f64> = states.iter().map(|x| model.log_likelihood(y, *x)).collect();
    if log_liks.iter().all(|l| !l.is_finite()) {
        return Err(FilterError::ParticleDepletion);
    }
    let log_weights: Vec<f64> = particles
        .weights
        .weights()
        .iter()
        .zip(&log_liks)
        .map(|(w, ll)| {
            let prior = if t.beta == 0.0 {
                0.0
            } else if *w > 0.0 {
                t.beta * w.ln()
            } else {
                f64::NEG_INFINITY
            };
            let data = if t.alpha == 0.0 {
                0.0
            } else if ll.is_nan() {
                f64::NEG_INFINITY
            } else {
                t.alpha * ll
            };
            prior + data
        })
        .collect();
    let weights = DiscreteDistribution::from_log_weights(&log_weights).map_err(|_| FilterError::ParticleDepletion)?;
    let reweighted = ParticleSet { states, weights, ess_threshold: particles.ess_threshold };
    let estimate = reweighted.mean();
    let ess = effective_sample_size(&reweighted.weights);
    if ess < reweighted.ess_threshold {
        let u: f64 = rng.random();
        Ok(PfStep { particles: systematic_resample(&reweighted, u), estimate, ess, resampled: true })
    } else {
        Ok(PfStep { particles: reweighted, estimate, ess, resampled: false })
    }
}

/// Filters a measurement sequence `y_1..y_K` starting from `initial`
/// (particles at time 0) and returns the estimates for `k = 1..K`.
pub fn run_particle_filter<R: Rng + ?Sized>(
    initial: ParticleSet,
    model: &NonlinearSSM,
    measurements: &[f64],
    t: TemperPair,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut particles = initial;
    let mut estimates = Vec::with_capacity(measurements.len());
    for (i, y) in measurements.iter().enumerate() {
        let step = ua_pf_step(&particles, model, *y, i + 1, t, rng)?;
        estimates.push(step.estimate);
        particles = step.particles;
    }
    Ok(estimates)
}
