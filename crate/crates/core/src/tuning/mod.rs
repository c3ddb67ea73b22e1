//! Hyper-parameter search over a box: exhaustive grids and a cubic
//! radial-basis surrogate.
//!
//! Losses are minimized. Non-finite loss values are recorded as `+∞` so a
//! diverging configuration never wins. Both searches always evaluate their
//! anchors, so the result is never worse than the conventional setting.

mod grid;
mod loss;
mod surrogate;

pub use grid::{grid_nodes, grid_search};
pub use loss::empirical_estimation_loss;
pub use surrogate::{rbf_surrogate_optimize, SurrogateOptions};

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TuningError {
    #[error("invalid search domain: {0}")]
    InvalidDomain(String),
    #[error("grid step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("grid would have {0} nodes")]
    TooManyNodes(f64),
    #[error("point {0:?} lies outside the search domain")]
    OutsideDomain(Vec<f64>),
    #[error("evaluation budget must be at least 1")]
    ZeroBudget,
    #[error("no episodes to evaluate")]
    EmptyDataset,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = TuningError> = std::result::Result<T, E>;

/// Axis-aligned box `[lower, upper]` in one or two dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || !(1..=2).contains(&lower.len()) {
            return Err(TuningError::InvalidDomain(format!(
                "bounds of length {} and {}, need 1 or 2",
                lower.len(),
                upper.len()
            )));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(TuningError::InvalidDomain(format!("[{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[0, 1]` for the λ-classifier.
    pub fn unit_interval() -> Self {
        Self { lower: vec![0.0], upper: vec![1.0] }
    }

    /// `[0, τ]²` for `(α, β)`.
    pub fn square(tau: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0], vec![tau, tau])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && point.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    pub(crate) fn check(&self, point: &[f64]) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(TuningError::OutsideDomain(point.to_vec()))
        }
    }

    /// The conventional setting: `λ = 0.5` in one dimension, `(α, β) = (1, 1)`
    /// in two. Returns nothing when it falls outside the box.
    pub fn default_anchors(&self) -> Vec<Vec<f64>> {
        let anchor = if self.dim() == 1 { vec![0.5] } else { vec![1.0, 1.0] };
        if self.contains(&anchor) {
            vec![anchor]
        } else {
            Vec::new()
        }
    }
}

/// One loss evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Outcome of a search: every evaluation in order, and the first one
/// attaining the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: Vec<Evaluation>,
    pub seed: u64,
}

impl TuningResult {
    pub(crate) fn from_evaluations(evaluations: Vec<Evaluation>, seed: u64) -> Self {
        let best = best_index(&evaluations);
        Self {
            best_point: evaluations[best].point.clone(),
            best_value: evaluations[best].value,
            evaluations,
            seed,
        }
    }

    /// Writes the evaluation trace as CSV with header `index,x0[,x1],value`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let dim = self.best_point.len();
        let mut header = vec!["index".to_string()];
        header.extend((0..dim).map(|i| format!("x{i}")));
        header.push("value".into());
        writer.write_record(&header)?;
        for (i, e) in self.evaluations.iter().enumerate() {
            let mut record = vec![i.to_string()];
            record.extend(e.point.iter().map(f64::to_string));
            record.push(e.value.to_string());
            writer.write_record(&record)?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn best_index(evaluations: &[Evaluation]) -> usize {
    let mut best = 0;
    for (i, e) in evaluations.iter().enumerate() {
        if e.value < evaluations[best].value {
            best = i;
        }
    }
    best
}

pub(crate) fn sanitize(value: f64) -> f64 {
    if value.is_nan() || value == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_validation_and_anchors() {
        assert!(SearchDomain::new(vec![0.0], vec![0.0]).is_err());
        assert!(SearchDomain::new(vec![0.0; 3], vec![1.0; 3]).is_err());
        assert!(SearchDomain::new(vec![0.0], vec![f64::INFINITY]).is_err());
        assert_eq!(SearchDomain::square(3.0).unwrap().default_anchors(), vec![vec![1.0, 1.0]]);
        assert_eq!(SearchDomain::unit_interval().default_anchors(), vec![vec![0.5]]);
        assert!(SearchDomain::square(0.5).unwrap().default_anchors().is_empty());
    }

    #[test]
    fn trace_csv() {
        let r = TuningResult::from_evaluations(
            vec![
                Evaluation { point: vec![0.5], value: 2.0 },
                Evaluation { point: vec![0.25], value: 1.0 },
                Evaluation { point: vec![0.75], value: 1.0 },
            ],
            9,
        );
        assert_eq!(r.best_point, vec![0.25]);
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,x0,value\n0,0.5,2\n1,0.25,1\n2,0.75,1\n");
    }
}
