use proptest::prelude::*;
use uabayes::tuning::{grid_search, rbf_surrogate_optimize, SearchDomain, SurrogateOptions};

fn smooth(w: &[f64]) -> f64 {
    (w[0] - 0.3).powi(2) + (w[1] - 2.0).powi(2)
}

#[test]
fn surrogate_matches_fine_grid() {
    let d = SearchDomain::square(3.0).unwrap();
    let grid = grid_search(smooth, &d, 0.01, &d.default_anchors()).unwrap();
    let sur = rbf_surrogate_optimize(smooth, &d, 60, 7, &[1.0, 1.0], &SurrogateOptions::default()).unwrap();
    assert!((sur.best_value - grid.best_value).abs() <= 0.05, "{} vs {}", sur.best_value, grid.best_value);
    assert_eq!(sur, rbf_surrogate_optimize(smooth, &d, 60, 7, &[1.0, 1.0], &SurrogateOptions::default()).unwrap());
    assert_eq!(grid, grid_search(smooth, &d, 0.01, &d.default_anchors()).unwrap());
}

#[test]
fn surrogate_on_a_grid_loss_is_bounded_by_the_grid_optimum() {
    // A loss defined only at grid nodes (nearest-node lookup).
    let d = SearchDomain::square(1.0).unwrap();
    let step = 0.25;
    let node_loss = |w: &[f64]| {
        let i = (w[0] / step).round();
        let j = (w[1] / step).round();
        ((i - 1.0).powi(2) + (j - 3.0).powi(2)).sin().abs() + 0.1 * i
    };
    let grid = grid_search(node_loss, &d, step, &[]).unwrap();
    let sur = rbf_surrogate_optimize(node_loss, &d, 40, 1, &[0.5, 0.5], &SurrogateOptions::default()).unwrap();
    assert!(sur.best_value >= grid.best_value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn anchors_are_never_beaten_by_the_result(cx in 0.0f64..3.0, cy in 0.0f64..3.0, seed in 0u64..1000) {
        let d = SearchDomain::square(3.0).unwrap();
        let loss = move |w: &[f64]| ((w[0] - cx).powi(2) + (w[1] - cy).powi(2)).sqrt() + (5.0 * w[0]).sin() * 0.1;
        let grid = grid_search(loss, &d, 0.25, &d.default_anchors()).unwrap();
        prop_assert!(grid.best_value <= loss(&[1.0, 1.0]));
        prop_assert!(grid.evaluations.iter().any(|e| e.point == grid.best_point && e.value == grid.best_value));
        prop_assert!(grid.evaluations.iter().all(|e| e.value >= grid.best_value));
        let sur = rbf_surrogate_optimize(loss, &d, 12, seed, &[1.0, 1.0], &SurrogateOptions::default()).unwrap();
        prop_assert!(sur.best_value <= loss(&[1.0, 1.0]));
        prop_assert!(sur.evaluations.iter().all(|e| d.contains(&e.point)));
        prop_assert_eq!(&sur.evaluations[0].point, &vec![1.0, 1.0]);
    }
}
