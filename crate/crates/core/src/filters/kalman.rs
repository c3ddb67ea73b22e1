use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{FilterError, Result};
use crate::posterior::{GaussianBelief, TemperPair};

/// `x_k = F x_{k-1} + G (u + w_{k-1})`, `y_k = H x_k + v_k` with
/// `w ~ N(0, Q)` and `v ~ N(0, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSSM {
    pub f: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

impl LinearSSM {
    pub fn new(
        f: DMatrix<f64>,
        g: DMatrix<f64>,
        h: DMatrix<f64>,
        q: DMatrix<f64>,
        r: DMatrix<f64>,
    ) -> Result<Self> {
        let n = f.nrows();
        if f.ncols() != n || g.nrows() != n || h.ncols() != n {
            return Err(FilterError::Shape("F, G and H must share the state dimension".into()));
        }
        if q.shape() != (g.ncols(), g.ncols()) {
            return Err(FilterError::Shape("Q must match the columns of G".into()));
        }
        if r.shape() != (h.nrows(), h.nrows()) {
            return Err(FilterError::Shape("R must match the rows of H".into()));
        }
        if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0)
            || q.clone().symmetric_eigenvalues().iter().any(|e| *e < -1e-12)
        {
            return Err(FilterError::InvalidModel("Q must be symmetric positive semi-definite".into()));
        }
        if (&r - r.transpose()).amax() > 1e-12 * r.amax().max(1.0) || Cholesky::new(r.clone()).is_none() {
            return Err(FilterError::InvalidModel("R must be symmetric positive definite".into()));
        }
        Ok(Self { f, g, h, q, r })
    }

    pub fn state_dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn measurement_dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn noise_dim(&self) -> usize {
        self.g.ncols()
    }
}

pub(crate) struct Update {
    pub belief: GaussianBelief,
    pub log_likelihood: f64,
}

pub(crate) fn predict(
    belief: &GaussianBelief,
    model: &LinearSSM,
    input: Option<&DVector<f64>>,
) -> (DVector<f64>, DMatrix<f64>) {
    let mut mean = &model.f * belief.mean();
    if let Some(u) = input {
        mean += &model.g * u;
    }
    let cov = &model.f * belief.covariance() * model.f.transpose() + &model.g * &model.q * model.g.transpose();
    (mean, cov)
}

/// Kalman update of a predicted moment pair against measurement `y` with
/// noise covariance `r`, Joseph form.
pub(crate) fn update(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    h: &DMatrix<f64>,
    r: &DMatrix<f64>,
    y: &DVector<f64>,
) -> Result<Update> {
    if y.len() != h.nrows() {
        return Err(FilterError::Shape(format!("measurement has length {}, expected {}", y.len(), h.nrows())));
    }
    let innovation = y - h * mean;
    let s = h * cov * h.transpose() + r;
    let s = (&s + s.transpose()) * 0.5;
    let chol = Cholesky::new(s).ok_or(FilterError::NumericalSingularity)?;
    let gain = chol.solve(&(h * cov)).transpose();
    let n = mean.len();
    let i_kh = DMatrix::identity(n, n) - &gain * h;
    let post_mean = mean + &gain * &innovation;
    let post_cov = &i_kh * cov * i_kh.transpose() + &gain * r * gain.transpose();
    let post_cov = (&post_cov + post_cov.transpose()) * 0.5;

    let maha = innovation.dot(&chol.solve(&innovation));
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let log_likelihood = -0.5 * (maha + log_det + y.len() as f64 * (2.0 * PI).ln());
    if !log_likelihood.is_finite() || post_mean.iter().any(|v| !v.is_finite()) {
        return Err(FilterError::NumericalSingularity);
    }
    Ok(Update { belief: GaussianBelief::from_parts(post_mean, post_cov), log_likelihood })
}

fn check_kalman_temper(t: TemperPair) -> Result<()> {
    if !(t.alpha > 0.0 && t.beta > 0.0) {
        return Err(FilterError::InvalidTemper(format!(
            "the Kalman filter needs alpha, beta > 0, got ({}, {})",
            t.alpha, t.beta
        )));
    }
    Ok(())
}

/// One uncertainty-aware Kalman cycle: predict, set `P ← P/β` and `R ← R/α`,
/// then update.
pub fn ua_kalman_step(
    belief: &GaussianBelief,
    model: &LinearSSM,
    y: &DVector<f64>,
    t: TemperPair,
) -> Result<GaussianBelief> {
    ua_kalman_step_with_input(belief, model, y, None, t)
}

/// [`ua_kalman_step`] with a known input `u` entering as `G u`.
pub fn ua_kalman_step_with_input(
    belief: &GaussianBelief,
    model: &LinearSSM,
    y: &DVector<f64>,
    input: Option<&DVector<f64>>,
    t: TemperPair,
) -> Result<GaussianBelief> {
    check_kalman_temper(t)?;
    Ok(tempered_cycle(belief, model, y, input, t)?.belief)
}

pub(crate) fn tempered_cycle(
    belief: &GaussianBelief,
    model: &LinearSSM,
    y: &DVector<f64>,
    input: Option<&DVector<f64>>,
    t: TemperPair,
) -> Result<Update> {
    if belief.dim() != model.state_dim() {
        return Err(FilterError::Shape(format!(
            "belief has dimension {}, model {}",
            belief.dim(),
            model.state_dim()
        )));
    }
    let (mean, mut cov) = predict(belief, model, input);
    if t.beta != 1.0 {
        cov /= t.beta;
    }
    if t.alpha != 1.0 {
        update(&mean, &cov, &model.h, &(&model.r / t.alpha), y)
    } else {
        update(&mean, &cov, &model.h, &model.r, y)
    }
}

/// Runs [`ua_kalman_step`] over a measurement sequence and returns the
/// posterior beliefs.
pub fn kalman_filter(
    initial: &GaussianBelief,
    model: &LinearSSM,
    measurements: &[DVector<f64>],
    t: TemperPair,
) -> Result<Vec<GaussianBelief>> {
    check_kalman_temper(t)?;
    let mut belief = initial.clone();
    let mut out = Vec::with_capacity(measurements.len());
    for y in measurements {
        belief = tempered_cycle(&belief, model, y, None, t)?.belief;
        out.push(belief.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar_model(q: f64) -> LinearSSM {
        let one = DMatrix::from_element(1, 1, 1.0);
        LinearSSM::new(one.clone(), one.clone(), one.clone(), DMatrix::from_element(1, 1, q), one).unwrap()
    }

    fn y(v: f64) -> DVector<f64> {
        DVector::from_element(1, v)
    }

    #[test]
    fn scalar_conventional_step() {
        let prior = GaussianBelief::scalar(0.0, 1.0).unwrap();
        let post = ua_kalman_step(&prior, &scalar_model(0.0), &y(2.0), TemperPair::conventional()).unwrap();
        assert_relative_eq!(post.mean()[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(post.covariance()[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn scalar_tempered_prior() {
        let prior = GaussianBelief::scalar(0.0, 1.0).unwrap();
        let post = ua_kalman_step(&prior, &scalar_model(0.0), &y(2.0), TemperPair::new(1.0, 0.5).unwrap()).unwrap();
        assert_relative_eq!(post.mean()[0], 4.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(post.covariance()[(0, 0)], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_zero_exponents_and_bad_shapes() {
        let prior = GaussianBelief::scalar(0.0, 1.0).unwrap();
        let m = scalar_model(0.1);
        assert!(ua_kalman_step(&prior, &m, &y(1.0), TemperPair::new(0.0, 1.0).unwrap()).is_err());
        assert!(ua_kalman_step(&prior, &m, &DVector::zeros(2), TemperPair::conventional()).is_err());
        let one = DMatrix::from_element(1, 1, 1.0);
        assert!(LinearSSM::new(one.clone(), one.clone(), one.clone(), one.clone(), DMatrix::zeros(1, 1)).is_err());
        assert!(LinearSSM::new(one.clone(), one.clone(), one.clone(), -one.clone(), one).is_err());
    }

    #[test]
    fn smaller_beta_inflates_posterior_variance() {
        let prior = GaussianBelief::scalar(0.3, 0.8).unwrap();
        let m = scalar_model(0.2);
        let mut last = 0.0;
        for beta in [2.0, 1.5, 1.0, 0.5, 0.25, 0.1] {
            let post = ua_kalman_step(&prior, &m, &y(1.0), TemperPair::new(1.0, beta).unwrap()).unwrap();
            let var = post.covariance()[(0, 0)];
            assert!(var > last);
            last = var;
        }
    }
}
