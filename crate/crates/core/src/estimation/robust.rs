//! Robust-estimation primitives: MAD residual scale, Huber weights, and the
//! Huber objective.

/// Median with the even-length convention of averaging the middle two.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Scaled median absolute deviation, floored from below:
/// `max(mad_factor * median(|r - median(r)|), scale_floor)`.
pub fn mad_scale(residuals: &[f64], mad_factor: f64, scale_floor: f64) -> f64 {
    assert!(!residuals.is_empty(), "scale needs at least one residual");
    let mut values = residuals.to_vec();
    let med = median(&mut values);
    let mut deviations: Vec<f64> = residuals.iter().map(|r| (r - med).abs()).collect();
    let mad = median(&mut deviations);
    (mad_factor * mad).max(scale_floor)
}

/// IRLS weight of one standardized residual: 1 inside the quadratic zone,
/// `kappa / ratio` beyond it.
pub fn huber_weight(residual_ratio: f64, kappa: f64) -> f64 {
    debug_assert!(residual_ratio >= 0.0);
    if residual_ratio <= kappa {
        1.0
    } else {
        kappa / residual_ratio
    }
}

/// Huber loss summed over the standardized residuals.
pub fn huber_objective(residuals: &[f64], scale: f64, kappa: f64) -> f64 {
    assert!(scale > 0.0, "scale must be positive");
    residuals
        .iter()
        .map(|r| {
            let z = (r / scale).abs();
            if z <= kappa {
                0.5 * z * z
            } else {
                kappa * z - 0.5 * kappa * kappa
            }
        })
        .sum()
}
