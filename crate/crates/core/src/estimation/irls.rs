//! Iteratively reweighted least squares for the Huber M-estimator.
//!
//! The iteration initializes from the least squares estimate, then
//! alternates Huber weight updates (using the previous iterate's residual
//! scale), one constrained WLS solve, and a residual/scale refresh, until
//! the residual vector stops moving or the iteration cap is hit.

use super::robust::{huber_objective, huber_weight, mad_scale};
use super::wls::{solve_constrained_wls, solve_pinned};
use super::{EstimationError, EstimatorConfig, FitResult, Loss, RegressionProblem};
use nalgebra::DVector;

fn effective_scale_floor(config: &EstimatorConfig, target: &DVector<f64>) -> f64 {
    config.scale_floor.unwrap_or_else(|| {
        let rms = (target.dot(target) / target.len() as f64).sqrt();
        1e-8 * rms.max(1.0)
    })
}

fn solve_step(
    problem: &RegressionProblem,
    weights: &[f64],
    config: &EstimatorConfig,
) -> Result<DVector<f64>, EstimationError> {
    if !config.nonnegative {
        return solve_constrained_wls(problem, weights);
    }
    // Non-negativity by iterated pinning: clamp the most negative
    // coefficient to zero and re-solve until none are left.
    let p = problem.cols();
    let mut constraints: Vec<(DVector<f64>, f64)> = Vec::new();
    if let Some(c) = &problem.normalization_vector {
        constraints.push((c.clone(), 1.0));
    }
    let mut pinned = vec![false; p];
    loop {
        let theta = solve_pinned(problem, weights, &constraints)?;
        let worst = (0..p)
            .filter(|&j| !pinned[j] && theta[j] < -1e-12)
            .min_by(|&a, &b| theta[a].partial_cmp(&theta[b]).expect("finite"));
        match worst {
            None => return Ok(theta),
            Some(j) => {
                pinned[j] = true;
                let mut row = DVector::zeros(p);
                row[j] = 1.0;
                constraints.push((row, 0.0));
            }
        }
    }
}

pub fn irls_fit(
    problem: &RegressionProblem,
    config: &EstimatorConfig,
) -> Result<FitResult, EstimationError> {
    let rows = problem.rows();
    let unit = vec![1.0f64; rows];
    let floor = effective_scale_floor(config, &problem.target);

    let theta = solve_step(problem, &unit, config)?;
    let residuals = problem.residuals(&theta);

    if config.loss == Loss::Lse {
        let res: Vec<f64> = residuals.iter().copied().collect();
        let scale = mad_scale(&res, config.mad_factor, floor);
        let objective = 0.5 * residuals.dot(&residuals);
        return Ok(FitResult {
            theta: theta.iter().copied().collect(),
            residuals: res,
            scale,
            objective,
            iterations: 1,
            converged: true,
            weights: unit,
        });
    }

    let mut theta = theta;
    let mut residuals = residuals;
    let mut scale = mad_scale(residuals.as_slice(), config.mad_factor, floor);
    let mut weights = unit;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < config.max_iter {
        iterations += 1;
        for (w, r) in weights.iter_mut().zip(residuals.iter()) {
            *w = huber_weight((r / scale).abs(), config.kappa);
        }
        let next_theta = solve_step(problem, &weights, config)?;
        let next_residuals = problem.residuals(&next_theta);
        let delta = (&next_residuals - &residuals).norm();
        theta = next_theta;
        residuals = next_residuals;
        scale = mad_scale(residuals.as_slice(), config.mad_factor, floor);
        if delta <= config.tol {
            converged = true;
            break;
        }
    }

    let res: Vec<f64> = residuals.iter().copied().collect();
    let objective = huber_objective(&res, scale, config.kappa);
    let fit = FitResult {
        theta: theta.iter().copied().collect(),
        residuals: res,
        scale,
        objective,
        iterations,
        converged,
        weights,
    };
    if converged {
        Ok(fit)
    } else {
        Err(EstimationError::NotConverged(Box::new(fit)))
    }
}
