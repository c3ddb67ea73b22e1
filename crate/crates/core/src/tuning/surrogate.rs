use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sanitize, Evaluation, Result, SearchDomain, TuningError, TuningResult};

/// Knobs of [`rbf_surrogate_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SurrogateOptions {
    /// Uniform random candidates per iteration.
    pub uniform_candidates: usize,
    /// Gaussian perturbations of the incumbent per iteration.
    pub local_candidates: usize,
    /// Perturbation standard deviation as a fraction of each axis width.
    pub local_sigma: f64,
    /// Surrogate weight `w` of the candidate score, cycled per iteration.
    pub weights: Vec<f64>,
}

impl Default for SurrogateOptions {
    fn default() -> Self {
        Self { uniform_candidates: 500, local_candidates: 100, local_sigma: 0.05, weights: vec![0.3, 0.5, 0.8, 0.95] }
    }
}

const RIDGE: f64 = 1e-10;

/// Cubic RBF interpolant `s(x) = Σ λ_i ‖x − x_i‖³ + c₀ + cᵀx` on
/// coordinates scaled to the unit box.
struct Interpolant {
    centers: Vec<Vec<f64>>,
    lambda: DVector<f64>,
    tail: DVector<f64>,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

impl Interpolant {
    fn fit(centers: &[Vec<f64>], values: &[f64]) -> Self {
        let n = centers.len();
        let d = centers[0].len();
        let size = n + d + 1;
        let mut a = DMatrix::zeros(size, size);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = distance(&centers[i], &centers[j]).powi(3);
            }
            a[(i, n)] = 1.0;
            a[(n, i)] = 1.0;
            for k in 0..d {
                a[(i, n + 1 + k)] = centers[i][k];
                a[(n + 1 + k, i)] = centers[i][k];
            }
        }
        let mut rhs = DVector::zeros(size);
        rhs.rows_mut(0, n).copy_from_slice(values);
        let solve = |m: DMatrix<f64>| m.lu().solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite()));
        let sol = solve(a.clone()).unwrap_or_else(|| {
            let mut reg = a;
            for i in 0..n {
                reg[(i, i)] += RIDGE;
            }
            solve(reg).unwrap_or_else(|| {
                // Degenerate design: fall back to the constant mean.
                let mut s = DVector::zeros(size);
                s[n] = values.iter().sum::<f64>() / n as f64;
                s
            })
        });
        Self { centers: centers.to_vec(), lambda: sol.rows(0, n).into(), tail: sol.rows(n, d + 1).into() }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let rbf: f64 = self.centers.iter().zip(self.lambda.iter()).map(|(c, l)| l * distance(c, x).powi(3)).sum();
        rbf + self.tail[0] + x.iter().enumerate().map(|(k, v)| self.tail[k + 1] * v).sum::<f64>()
    }
}

/// Minimizes `loss` over `domain` with at most `budget` evaluations, using
/// a cubic radial-basis surrogate with a linear tail.
///
/// `start` is evaluated first. A seeded uniform design fills the next
/// `2(d + 1) − 1` evaluations; afterwards each iteration fits the
/// surrogate to every evaluation so far, draws uniform and incumbent-local
/// candidates, and evaluates the candidate minimizing
/// `w · scaled surrogate + (1 − w) · scaled closeness to evaluated points`.
pub fn rbf_surrogate_optimize<F>(
    loss: F,
    domain: &SearchDomain,
    budget: usize,
    seed: u64,
    start: &[f64],
    opts: &SurrogateOptions,
) -> Result<TuningResult>
where
    F: Fn(&[f64]) -> f64,
{
    if budget == 0 {
        return Err(TuningError::ZeroBudget);
    }
    domain.check(start)?;
    if opts.weights.is_empty() || opts.uniform_candidates + opts.local_candidates == 0 {
        return Err(TuningError::InvalidDomain("surrogate options need weights and candidates".into()));
    }
    let d = domain.dim();
    let to_unit = |p: &[f64]| -> Vec<f64> { (0..d).map(|i| (p[i] - domain.lower()[i]) / domain.width(i)).collect() };
    let from_unit = |u: &[f64]| -> Vec<f64> {
        (0..d).map(|i| (domain.lower()[i] + u[i] * domain.width(i)).clamp(domain.lower()[i], domain.upper()[i])).collect()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = vec![Evaluation { point: start.to_vec(), value: sanitize(loss(start)) }];
    let mut unit_points = vec![to_unit(start)];

    let initial = (2 * (d + 1)).min(budget);
    while evaluations.len() < initial {
        let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let p = from_unit(&u);
        evaluations.push(Evaluation { value: sanitize(loss(&p)), point: p });
        unit_points.push(u);
    }

    let mut iteration = 0;
    while evaluations.len() < budget {
        // Infinite values would wreck the fit; cap them at the worst finite one.
        let finite_max = evaluations.iter().map(|e| e.value).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        let cap = if finite_max.is_finite() { finite_max } else { 0.0 };
        let values: Vec<f64> = evaluations.iter().map(|e| e.value.min(cap)).collect();
        let surrogate = Interpolant::fit(&unit_points, &values);

        let best = super::best_index(&evaluations);
        let incumbent = unit_points[best].clone();
        let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(opts.uniform_candidates + opts.local_candidates);
        for _ in 0..opts.uniform_candidates {
            candidates.push((0..d).map(|_| rng.random::<f64>()).collect());
        }
        for _ in 0..opts.local_candidates {
            candidates.push(
                incumbent
                    .iter()
                    .map(|c| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        (c + opts.local_sigma * z).clamp(0.0, 1.0)
                    })
                    .collect(),
            );
        }

        let scored: Vec<(f64, f64)> = candidates
            .par_iter()
            .map(|c| {
                let dist = unit_points.iter().map(|p| distance(p, c)).fold(f64::INFINITY, f64::min);
                (surrogate.eval(c), dist)
            })
            .collect();
        let w = opts.weights[iteration % opts.weights.len()];
        let choice = select(&scored, w);
        let u = candidates[choice].clone();
        let p = from_unit(&u);
        evaluations.push(Evaluation { value: sanitize(loss(&p)), point: p });
        unit_points.push(u);
        iteration += 1;
    }
    Ok(TuningResult::from_evaluations(evaluations, seed))
}

/// Index minimizing the weighted score; candidates duplicating an evaluated
/// point are skipped unless nothing else is left.
fn select(scored: &[(f64, f64)], w: f64) -> usize {
    let fresh = |d: f64| d > 1e-12;
    let pool: Vec<usize> = {
        let f: Vec<usize> = (0..scored.len()).filter(|i| fresh(scored[*i].1)).collect();
        if f.is_empty() {
            (0..scored.len()).collect()
        } else {
            f
        }
    };
    let (smin, smax) = pool.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(scored[*i].0), hi.max(scored[*i].0))
    });
    let (dmin, dmax) = pool.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(scored[*i].1), hi.max(scored[*i].1))
    });
    let scale = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let mut best = pool[0];
    let mut best_score = f64::INFINITY;
    for &i in &pool {
        let (s, d) = scored[i];
        let score = w * scale(s, smin, smax) + (1.0 - w) * (1.0 - scale(d, dmin, dmax));
        if score < best_score {
            best = i;
            best_score = score;
        }
    }
    best
}
