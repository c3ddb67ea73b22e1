use super::{DiscreteDistribution, PosteriorError, Result, ScalableDistribution};

pub const DEFAULT_ALPHA_MAX: f64 = 10.0;
const GOLDEN_TOL: f64 = 1e-8;

/// `Σ (h0_i − h_i) ln h_i`. A non-zero value, with `h` non-uniform,
/// certifies that some α-scaling of `h` is strictly closer to `h0`.
pub fn scaling_gain_condition(h0: &DiscreteDistribution, h: &DiscreteDistribution) -> Result<f64> {
    h0.check_len(h)?;
    let mut total = 0.0;
    for (a, b) in h0.weights().iter().zip(h.weights()) {
        if *b == 0.0 {
            if *a > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        total += (a - b) * b.ln();
    }
    Ok(total)
}

/// Outcome of [`best_scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSearch {
    pub alpha_star: f64,
    pub kl_star: f64,
    /// `KL(h0 ‖ h)`, the unscaled baseline.
    pub kl_unscaled: f64,
}

/// Golden-section search for the α minimizing `KL(h0 ‖ h^(α))` on
/// `[0, alpha_max]`. The map is convex in α, so the search is exact up to
/// the bracket tolerance.
pub fn best_scale<D: ScalableDistribution>(h0: &D, h: &D, alpha_max: f64) -> Result<ScaleSearch> {
    if !(alpha_max > 1.0 && alpha_max.is_finite()) {
        return Err(PosteriorError::InvalidExponent { name: "alpha_max", value: alpha_max });
    }
    if h.is_uniform() {
        return Err(PosteriorError::NoGain);
    }
    let kl_unscaled = h0.kl_divergence(h)?;
    let kl_at = |alpha: f64| -> f64 {
        h.alpha_scale(alpha).and_then(|s| h0.kl_divergence(&s)).unwrap_or(f64::INFINITY)
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, alpha_max);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = kl_at(x1);
    let mut f2 = kl_at(x2);
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = kl_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = kl_at(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    // Compare against α = 1 and the bracket ends so the result never loses
    // to the unscaled baseline.
    let mut best = (1.0, kl_unscaled);
    for alpha in [mid, x1, x2, 0.0, alpha_max] {
        let v = kl_at(alpha);
        if v < best.1 {
            best = (alpha, v);
        }
    }
    Ok(ScaleSearch { alpha_star: best.0, kl_star: best.1, kl_unscaled })
}

/// Bretagnolle–Huber bound `2M·sqrt(1 − exp(−KL))` on the gap between
/// expected costs bounded by `M` under two distributions.
pub fn bh_bound(m: f64, kl: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    2.0 * m * (1.0 - (-kl).exp()).max(0.0).sqrt()
}
