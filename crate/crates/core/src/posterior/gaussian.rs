use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{PosteriorError, Result, ScalableDistribution};

const SYMMETRY_TOL: f64 = 1e-10;

/// Mean vector and symmetric positive-definite covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianRepr", into = "GaussianRepr")]
pub struct GaussianBelief {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

impl TryFrom<GaussianRepr> for GaussianBelief {
    type Error = PosteriorError;

    fn try_from(repr: GaussianRepr) -> Result<Self> {
        let d = repr.mean.len();
        if repr.covariance.len() != d || repr.covariance.iter().any(|row| row.len() != d) {
            return Err(PosteriorError::DimensionMismatch { expected: d, found: repr.covariance.len() });
        }
        let cov = DMatrix::from_fn(d, d, |i, j| repr.covariance[i][j]);
        Self::new(DVector::from_vec(repr.mean), cov)
    }
}

impl From<GaussianBelief> for GaussianRepr {
    fn from(g: GaussianBelief) -> Self {
        let d = g.dim();
        GaussianRepr {
            mean: g.mean.iter().copied().collect(),
            covariance: (0..d).map(|i| (0..d).map(|j| g.covariance[(i, j)]).collect()).collect(),
        }
    }
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(PosteriorError::InvalidDistribution("empty mean".into()));
        }
        if covariance.shape() != (d, d) {
            return Err(PosteriorError::DimensionMismatch { expected: d, found: covariance.nrows() });
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(PosteriorError::InvalidDistribution("non-finite entries".into()));
        }
        let scale = covariance.amax().max(f64::MIN_POSITIVE);
        if (&covariance - covariance.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(PosteriorError::NotPositiveDefinite);
        }
        if Cholesky::new(covariance.clone()).is_none() {
            return Err(PosteriorError::NotPositiveDefinite);
        }
        Ok(Self { mean, covariance })
    }

    /// One-dimensional `N(mean, variance)`.
    pub fn scalar(mean: f64, variance: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, variance))
    }

    /// Skips validation; callers guarantee symmetry and definiteness.
    pub(crate) fn from_parts(mean: DVector<f64>, covariance: DMatrix<f64>) -> Self {
        Self { mean, covariance }
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.mean, self.covariance)
    }

    pub(crate) fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.covariance.clone()).ok_or(PosteriorError::NotPositiveDefinite)
    }

    /// Inverse covariance.
    pub fn precision(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky()?.inverse())
    }

    fn log_det(&self) -> Result<f64> {
        let l = self.cholesky()?;
        Ok(2.0 * l.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
    }

    /// Log-density at `x`.
    pub fn log_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        let chol = self.cholesky()?;
        let diff = x - &self.mean;
        let maha = diff.dot(&chol.solve(&diff));
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        Ok(-0.5 * (maha + log_det + self.dim() as f64 * (2.0 * PI).ln()))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(PosteriorError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl ScalableDistribution for GaussianBelief {
    fn entropy(&self) -> f64 {
        let d = self.dim() as f64;
        // Covariance is validated at construction, so the Cholesky exists.
        let log_det = self.log_det().unwrap_or(f64::NAN);
        0.5 * (d * (2.0 * PI).ln() + log_det) + 0.5 * d
    }

    fn kl_divergence(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let chol_b = other.cholesky()?;
        let d = self.dim() as f64;
        let trace = chol_b.solve(&self.covariance).trace();
        let diff = &other.mean - &self.mean;
        let maha = diff.dot(&chol_b.solve(&diff));
        let kl = 0.5 * (trace + maha - d + other.log_det()? - self.log_det()?);
        Ok(kl.max(0.0))
    }

    fn alpha_scale(&self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(PosteriorError::InvalidExponent { name: "alpha", value: alpha });
        }
        if alpha == 0.0 {
            return Err(PosteriorError::DegenerateScale);
        }
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        Ok(Self { mean: self.mean.clone(), covariance: &self.covariance / alpha })
    }

    fn is_uniform(&self) -> bool {
        false
    }
}
