use rayon::prelude::*;

use super::{sanitize, Evaluation, Result, SearchDomain, TuningError, TuningResult};

/// Refuses grids larger than this.
const MAX_NODES: f64 = 5e7;

fn axis_nodes(lower: f64, upper: f64, step: f64) -> Vec<f64> {
    let width = upper - lower;
    let n = (width / step + 1e-9).floor() as usize;
    let mut nodes: Vec<f64> = (0..=n).map(|i| lower + i as f64 * step).collect();
    // Snap the last node onto the bound when the step divides the width
    // up to rounding, and never step past it.
    if let Some(last) = nodes.last_mut() {
        if (upper - *last).abs() <= 1e-9 * width.max(1.0) {
            *last = upper;
        }
    }
    nodes
}

/// Grid nodes `lower + i·step` on each axis, in scan order (the first axis
/// varies slowest).
pub fn grid_nodes(domain: &SearchDomain, step: f64) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(TuningError::InvalidStep(step));
    }
    let axes: Vec<Vec<f64>> = (0..domain.dim()).map(|i| axis_nodes(domain.lower()[i], domain.upper()[i], step)).collect();
    let count: f64 = axes.iter().map(|a| a.len() as f64).product();
    if count > MAX_NODES {
        return Err(TuningError::TooManyNodes(count));
    }
    Ok(match axes.as_slice() {
        [a] => a.iter().map(|x| vec![*x]).collect(),
        [a, b] => a.iter().flat_map(|x| b.iter().map(move |y| vec![*x, *y])).collect(),
        _ => unreachable!("domains are one- or two-dimensional"),
    })
}

/// Evaluates `loss` at every grid node and every anchor and returns the
/// minimum. Anchors that coincide with a node (up to rounding) replace that
/// node, others are appended after the grid. Ties go to the earliest
/// evaluation. Evaluations run in parallel.
pub fn grid_search<F>(loss: F, domain: &SearchDomain, step: f64, anchors: &[Vec<f64>]) -> Result<TuningResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    for a in anchors {
        domain.check(a)?;
    }
    let mut points = grid_nodes(domain, step)?;
    let tol: Vec<f64> = (0..domain.dim()).map(|i| 1e-9 * domain.width(i)).collect();
    for a in anchors {
        let same = |p: &Vec<f64>| p.iter().zip(a).zip(&tol).all(|((x, y), t)| (x - y).abs() <= *t);
        match points.iter().position(same) {
            Some(i) => points[i] = a.clone(),
            None => points.push(a.clone()),
        }
    }
    let values: Vec<f64> = points.par_iter().map(|p| sanitize(loss(p))).collect();
    let evaluations = points.into_iter().zip(values).map(|(point, value)| Evaluation { point, value }).collect();
    Ok(TuningResult::from_evaluations(evaluations, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_is_the_optimum() {
        let d = SearchDomain::square(3.0).unwrap();
        let r = grid_search(|w| (w[0] - 1.0).powi(2) + (w[1] - 1.0).powi(2), &d, 0.5, &d.default_anchors()).unwrap();
        assert_eq!(r.best_point, vec![1.0, 1.0]);
        assert_eq!(r.best_value, 0.0);
        assert_eq!(r.evaluations.len(), 49);
    }

    #[test]
    fn grid_contains_the_optimum() {
        let d = SearchDomain::unit_interval();
        let r = grid_search(|l| (l[0] - 0.25).abs(), &d, 0.25, &[]).unwrap();
        assert_eq!(r.best_point, vec![0.25]);
        assert_eq!(r.evaluations.len(), 5);
    }

    #[test]
    fn constant_loss_picks_first_node() {
        let d = SearchDomain::square(1.0).unwrap();
        let r = grid_search(|_| 3.5, &d, 0.5, &d.default_anchors()).unwrap();
        assert_eq!(r.best_value, 3.5);
        assert_eq!(r.best_point, vec![0.0, 0.0]);
    }

    #[test]
    fn off_grid_anchor_is_appended_and_nan_is_infinite() {
        let d = SearchDomain::unit_interval();
        let r = grid_search(|l| if l[0] == 0.0 { f64::NAN } else { l[0] }, &d, 0.3, &[vec![0.05]]).unwrap();
        let pts: Vec<f64> = r.evaluations.iter().map(|e| e.point[0]).collect();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[4], 0.05);
        assert_eq!(r.evaluations[0].value, f64::INFINITY);
        assert_eq!(r.best_point, vec![0.05]);
        assert!(grid_search(|l| l[0], &d, 0.3, &[vec![2.0]]).is_err());
        assert!(grid_search(|l| l[0], &d, 0.0, &[]).is_err());
    }

    #[test]
    fn fine_step_reaches_the_upper_bound() {
        let d = SearchDomain::square(3.0).unwrap();
        let nodes = grid_nodes(&d, 0.01).unwrap();
        assert_eq!(nodes.len(), 301 * 301);
        assert_eq!(nodes.last().unwrap(), &vec![3.0, 3.0]);
        assert!(nodes.iter().any(|p| (p[0] - 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12));
    }
}
