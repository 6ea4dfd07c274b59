//! Equality-constrained weighted least squares.
//!
//! The normalized problem min sum w_t (y_t - x_t'theta)^2 s.t. c'theta = 1
//! is solved through its stationarity system
//!
//! ```text
//! [ 2 X'WX   c ] [theta ]   [ 2 X'W y ]
//! [   c'     0 ] [ mu   ] = [    1    ]
//! ```
//!
//! A singular system gets one retry with a ridge of
//! 1e-10 * mean(diag(X'WX)); rank deficiency that survives the ridge is a
//! [`EstimationError::DegenerateProblem`].

use super::{EstimationError, RegressionProblem};
use nalgebra::{DMatrix, DVector};

const RIDGE_SCALE: f64 = 1e-10;
const CONSTRAINT_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;

pub fn solve_constrained_wls(
    problem: &RegressionProblem,
    weights: &[f64],
) -> Result<DVector<f64>, EstimationError> {
    let rows = problem.rows();
    if weights.len() != rows {
        return Err(EstimationError::WeightCount {
            expected: rows,
            got: weights.len(),
        });
    }
    let mut constraints: Vec<(DVector<f64>, f64)> = Vec::new();
    if let Some(c) = &problem.normalization_vector {
        constraints.push((c.clone(), 1.0));
    }
    solve_pinned(problem, weights, &constraints)
}

/// Same solve with additional equality rows (used for the non-negativity
/// option, which pins offending coefficients to zero and re-solves).
pub(crate) fn solve_pinned(
    problem: &RegressionProblem,
    weights: &[f64],
    constraints: &[(DVector<f64>, f64)],
) -> Result<DVector<f64>, EstimationError> {
    let p = problem.cols();

    // 2 X'WX and 2 X'W y assembled row by row.
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs_top = DVector::<f64>::zeros(p);
    for (t, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let x = problem.design.row(t);
        let y = problem.target[t];
        for i in 0..p {
            let wxi = 2.0 * w * x[i];
            rhs_top[i] += wxi * y;
            for j in i..p {
                gram[(i, j)] += wxi * x[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
    }

    let ridge = RIDGE_SCALE * gram.diagonal().sum() / (2.0 * p as f64);
    match try_solve(&gram, &rhs_top, constraints, 0.0) {
        Some(theta) => Ok(theta),
        None => try_solve(&gram, &rhs_top, constraints, ridge)
            .ok_or(EstimationError::DegenerateProblem),
    }
}

fn try_solve(
    gram: &DMatrix<f64>,
    rhs_top: &DVector<f64>,
    constraints: &[(DVector<f64>, f64)],
    ridge: f64,
) -> Option<DVector<f64>> {
    let p = gram.nrows();
    let m = constraints.len();
    let dim = p + m;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    kkt.view_mut((0, 0), (p, p)).copy_from(gram);
    for i in 0..p {
        kkt[(i, i)] += ridge;
        rhs[i] = rhs_top[i];
    }
    for (k, (c, target)) in constraints.iter().enumerate() {
        for i in 0..p {
            kkt[(i, p + k)] = c[i];
            kkt[(p + k, i)] = c[i];
        }
        rhs[p + k] = *target;
    }

    let lu = kkt.clone().full_piv_lu();
    let solution = lu.solve(&rhs)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return None;
    }

    // Accept only solutions that actually satisfy the linear system and the
    // constraints to tight tolerance.
    let residual = &kkt * &solution - &rhs;
    let scale = kkt.abs().max() * solution.abs().max() + rhs.abs().max();
    if residual.abs().max() > RESIDUAL_TOL * scale.max(1.0) {
        return None;
    }
    let theta = solution.rows(0, p).into_owned();
    for (c, target) in constraints {
        if (c.dot(&theta) - target).abs() > CONSTRAINT_TOL {
            return None;
        }
    }
    Some(theta)
}
