//! Independent reference implementations used as test oracles. They follow
//! the textbook formulas directly and share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Covariance-form Kalman filter with an explicit inverse of the innovation
/// covariance and the short-form update `P = (I − K H) P`.
pub fn textbook_kf(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    h: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    ys: &[DVector<f64>],
) -> Vec<(DVector<f64>, DMatrix<f64>)> {
    let mut x = mean.clone();
    let mut p = cov.clone();
    let n = x.len();
    let mut out = Vec::new();
    for y in ys {
        let xp = f * &x;
        let pp = f * &p * f.transpose() + g * q * g.transpose();
        let s = h * &pp * h.transpose() + r;
        let k = &pp * h.transpose() * s.try_inverse().expect("invertible innovation covariance");
        x = &xp + &k * (y - h * &xp);
        p = (DMatrix::identity(n, n) - &k * h) * &pp;
        out.push((x.clone(), p.clone()));
    }
    out
}

/// Gaussian density.
pub fn normal_pdf(x: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let d = x - mean;
    let inv = cov.clone().try_inverse().expect("invertible covariance");
    let k = x.len() as f64;
    (-(0.5) * (d.transpose() * inv * &d)[(0, 0)]).exp() / ((2.0 * std::f64::consts::PI).powf(k) * cov.determinant()).sqrt()
}

pub struct ImmReference {
    pub means: Vec<DVector<f64>>,
    pub covs: Vec<DMatrix<f64>>,
    pub probs: Vec<f64>,
}

/// Standard IMM (Blom and Bar-Shalom) in probability space: interaction,
/// mode-matched Kalman filters with known inputs `G a_j`, and the Bayes
/// update `μ_j ∝ Λ_j c_j`. Returns the combined estimates and final state.
pub fn standard_imm(
    start: ImmReference,
    tpm: &DMatrix<f64>,
    accel: &[f64],
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    h: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    ys: &[DVector<f64>],
) -> (Vec<DVector<f64>>, Vec<Vec<f64>>) {
    let m = accel.len();
    let n = start.means[0].len();
    let mut st = start;
    let mut estimates = Vec::new();
    let mut probs = Vec::new();
    for y in ys {
        let c: Vec<f64> = (0..m).map(|j| (0..m).map(|i| tpm[(i, j)] * st.probs[i]).sum()).collect();
        let mut mixed_means = Vec::new();
        let mut mixed_covs = Vec::new();
        for j in 0..m {
            let mu: Vec<f64> = (0..m).map(|i| tpm[(i, j)] * st.probs[i] / c[j]).collect();
            let mut x0 = DVector::zeros(n);
            for i in 0..m {
                x0 += &st.means[i] * mu[i];
            }
            let mut p0 = DMatrix::zeros(n, n);
            for i in 0..m {
                let d = &st.means[i] - &x0;
                p0 += (&st.covs[i] + &d * d.transpose()) * mu[i];
            }
            mixed_means.push(x0);
            mixed_covs.push(p0);
        }
        let mut lik = Vec::new();
        let mut means = Vec::new();
        let mut covs = Vec::new();
        for j in 0..m {
            let xp = f * &mixed_means[j] + g * accel[j];
            let pp = f * &mixed_covs[j] * f.transpose() + g * q * g.transpose();
            let s = h * &pp * h.transpose() + r;
            let k = &pp * h.transpose() * s.clone().try_inverse().unwrap();
            let yp = h * &xp;
            lik.push(normal_pdf(y, &yp, &s));
            means.push(&xp + &k * (y - &yp));
            covs.push((DMatrix::identity(n, n) - &k * h) * &pp);
        }
        let z: f64 = (0..m).map(|j| lik[j] * c[j]).sum();
        let p: Vec<f64> = (0..m).map(|j| lik[j] * c[j] / z).collect();
        let mut est = DVector::zeros(n);
        for j in 0..m {
            est += &means[j] * p[j];
        }
        estimates.push(est);
        probs.push(p.clone());
        st = ImmReference { means, covs, probs: p };
    }
    (estimates, probs)
}

/// Bootstrap particle filter (weights `w · p(y | x)`, systematic resampling
/// when the effective sample size drops below N/2), consuming randomness in
/// the same order as the library so paired runs see identical draws.
pub fn bootstrap_pf<R: Rng>(
    initial: &[f64],
    transition: impl Fn(f64, usize) -> f64,
    measurement: impl Fn(f64) -> f64,
    process_var: f64,
    measurement_var: f64,
    ys: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let n = initial.len();
    let mut x = initial.to_vec();
    let mut w = vec![1.0 / n as f64; n];
    let mut out = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let k = i + 1;
        for xi in x.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *xi = transition(*xi, k) + process_var.sqrt() * z;
        }
        for (wi, xi) in w.iter_mut().zip(&x) {
            let e = y - measurement(*xi);
            *wi *= (-0.5 * e * e / measurement_var).exp();
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        out.push(x.iter().zip(&w).map(|(a, b)| a * b).sum());
        let ess = 1.0 / w.iter().map(|v| v * v).sum::<f64>();
        if ess < n as f64 / 2.0 {
            let u: f64 = rng.random();
            let mut cum = 0.0;
            let mut j = 0;
            let mut next = Vec::with_capacity(n);
            cum += w[0];
            for i in 0..n {
                let pos = (u + i as f64) / n as f64;
                while pos >= cum && j < n - 1 {
                    j += 1;
                    cum += w[j];
                }
                next.push(x[j]);
            }
            x = next;
            w = vec![1.0 / n as f64; n];
        }
    }
    out
}
