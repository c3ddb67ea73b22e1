use nalgebra::{DMatrix, DVector};
use uabayes::filters::LinearSSM;
use uabayes::simulate::{simulate_jump_linear, simulate_linear_ssm, JumpLinearParams, ScenarioConfig};

/// Upper 1% point of the chi-square distribution with `df` degrees of
/// freedom (Wilson–Hilferty approximation).
fn chi_square_99(df: f64) -> f64 {
    let z = 2.326_347_874;
    df * (1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt()).powi(3)
}

#[test]
fn mode_transitions_follow_the_tpm() {
    for incomplete in [false, true] {
        let params = JumpLinearParams { incomplete_model_set: incomplete, ..Default::default() };
        let cfg = ScenarioConfig::new(41, 100_000, 1).unwrap();
        let ep = &simulate_jump_linear(&cfg, &params).unwrap()[0];
        let tpm = params.truth_tpm();
        let m = tpm.nrows();
        let mut counts = DMatrix::<f64>::zeros(m, m);
        let mut prev = params.initial_mode;
        for &j in &ep.modes {
            counts[(prev, j)] += 1.0;
            prev = j;
        }
        let mut stat = 0.0;
        for i in 0..m {
            let n: f64 = counts.row(i).sum();
            for j in 0..m {
                let e = n * tpm[(i, j)];
                stat += (counts[(i, j)] - e).powi(2) / e;
            }
        }
        let df = (m * (m - 1)) as f64;
        assert!(stat < chi_square_99(df), "chi-square {stat} with {df} dof");

        // Symmetric tpm: the stationary distribution is uniform.
        for j in 0..m {
            let freq = ep.modes.iter().filter(|x| **x == j).count() as f64 / ep.modes.len() as f64;
            assert!((freq - 1.0 / m as f64).abs() < 0.02, "mode {j}: {freq}");
        }
    }
}

#[test]
fn process_noise_covariance_is_reproduced() {
    let q = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
    let model = LinearSSM::new(
        DMatrix::zeros(2, 2),
        DMatrix::identity(2, 2),
        DMatrix::identity(2, 2),
        q.clone(),
        DMatrix::identity(2, 2),
    )
    .unwrap();
    // With F = 0 each state is one draw of w.
    let cfg = ScenarioConfig::new(42, 100_000, 1).unwrap();
    let ep = &simulate_linear_ssm(&cfg, &model, &DVector::zeros(2)).unwrap()[0];
    let n = ep.truth.len() as f64;
    let mean = ep.truth.iter().fold(DVector::zeros(2), |acc, x| acc + x) / n;
    let cov = ep.truth.iter().fold(DMatrix::zeros(2, 2), |acc, x| {
        let d = x - &mean;
        acc + &d * d.transpose()
    }) / n;
    for (a, b) in cov.iter().zip(q.iter()) {
        assert!((a - b).abs() < 0.05 * q.amax(), "{cov} vs {q}");
    }
}

#[test]
fn generators_are_deterministic() {
    let params = JumpLinearParams::default();
    let cfg = ScenarioConfig::new(43, 50, 8).unwrap();
    let a = simulate_jump_linear(&cfg, &params).unwrap();
    let b = simulate_jump_linear(&cfg, &params).unwrap();
    assert_eq!(a, b);
    // Episode i depends only on (seed, i).
    let single = simulate_jump_linear(&ScenarioConfig::new(43, 50, 3).unwrap(), &params).unwrap();
    assert_eq!(single[..], a[..3]);
}
