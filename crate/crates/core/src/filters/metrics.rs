use nalgebra::DVector;

use super::{FilterError, Result};

/// Rooted time-averaged mean-squared error,
/// `sqrt((1/K) Σ_k ‖x_k − x̂_k‖²)`, pooling all state components.
pub fn rtamse(estimates: &[DVector<f64>], truth: &[DVector<f64>]) -> Result<f64> {
    if estimates.len() != truth.len() || estimates.is_empty() {
        return Err(FilterError::Shape(format!(
            "{} estimates for {} truth states",
            estimates.len(),
            truth.len()
        )));
    }
    let mut total = 0.0;
    for (e, x) in estimates.iter().zip(truth) {
        if e.len() != x.len() {
            return Err(FilterError::Shape(format!("state dimension {} vs {}", e.len(), x.len())));
        }
        total += (e - x).norm_squared();
    }
    Ok((total / truth.len() as f64).sqrt())
}

/// [`rtamse`] for scalar states.
pub fn rtamse_scalar(estimates: &[f64], truth: &[f64]) -> Result<f64> {
    if estimates.len() != truth.len() || estimates.is_empty() {
        return Err(FilterError::Shape(format!(
            "{} estimates for {} truth states",
            estimates.len(),
            truth.len()
        )));
    }
    let total: f64 = estimates.iter().zip(truth).map(|(e, x)| (e - x).powi(2)).sum();
    Ok((total / truth.len() as f64).sqrt())
}
