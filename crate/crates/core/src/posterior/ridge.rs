use nalgebra::{Cholesky, DMatrix, DVector};

use super::{PosteriorError, Result, TemperPair};

/// MAP estimate of a linear model under a standard normal prior and unit
/// noise, tempered by `t`. Only `λ = β/α` survives, giving ridge regression
/// `(XᵀX + λI) w = Xᵀy`.
pub fn map_ridge(design: &DMatrix<f64>, targets: &DVector<f64>, t: TemperPair) -> Result<DVector<f64>> {
    if t.alpha <= 0.0 {
        return Err(PosteriorError::InvalidExponent { name: "alpha", value: t.alpha });
    }
    if design.nrows() != targets.len() {
        return Err(PosteriorError::DimensionMismatch { expected: design.nrows(), found: targets.len() });
    }
    let lambda = t.beta / t.alpha;
    let d = design.ncols();
    let normal = design.transpose() * design + DMatrix::identity(d, d) * lambda;
    let rhs = design.transpose() * targets;
    let scale = normal.diagonal().amax().max(f64::MIN_POSITIVE);
    let chol = Cholesky::new(normal).ok_or(PosteriorError::SingularSystem)?;
    // Rank deficiency shows up as a vanishing pivot rather than a failure.
    let min_pivot = chol.l_dirty().diagonal().iter().map(|v| v * v).fold(f64::INFINITY, f64::min);
    if min_pivot <= 1e-12 * scale {
        return Err(PosteriorError::SingularSystem);
    }
    let w = chol.solve(&rhs);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(PosteriorError::SingularSystem);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_design() {
        let w = map_ridge(&DMatrix::identity(2, 2), &DVector::from_vec(vec![2.0, 4.0]), TemperPair::conventional())
            .unwrap();
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_beta_is_least_squares() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let w = map_ridge(&x, &y, TemperPair::new(0.7, 0.0).unwrap()).unwrap();
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(w[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn only_ratio_matters() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, -1.0, 1.0, 0.3, 2.0]);
        let y = DVector::from_vec(vec![1.0, -3.0, 0.5]);
        let a = map_ridge(&x, &y, TemperPair::new(1.0, 1.0).unwrap()).unwrap();
        let b = map_ridge(&x, &y, TemperPair::new(2.0, 2.0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singular_without_regularization() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(map_ridge(&x, &y, TemperPair::new(1.0, 0.0).unwrap()), Err(PosteriorError::SingularSystem));
        assert!(map_ridge(&x, &y, TemperPair::new(1.0, 1.0).unwrap()).is_ok());
        assert!(map_ridge(&x, &y, TemperPair::new(0.0, 1.0).unwrap()).is_err());
    }
}
