//! Dense convex QP solver for the dispatch problems:
//!
//! ```text
//! min  1/2 x' diag(q_diag) x + q_lin' x
//! s.t. A x = b,   lb <= x <= ub
//! ```
//!
//! Operator-splitting (ADMM over the stacked constraint [A; I]) with Ruiz
//! equilibration and a terminal active-set polish: once the splitting
//! iteration has identified the active bounds, one KKT solve on the reduced
//! equality system sharpens the iterate to solver precision. Everything is
//! deterministic: fixed iteration schedule, no randomized pivoting.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Infinity norm that tolerates empty vectors.
fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

#[derive(Debug, Clone)]
pub struct QpProblem {
    pub q_diag: DVector<f64>,
    pub q_lin: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lb: DVector<f64>,
    pub ub: DVector<f64>,
    pub objective_constant: f64,
}

impl QpProblem {
    pub fn num_vars(&self) -> usize {
        self.q_diag.len()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.component_mul(&self.q_diag).dot(x) + self.q_lin.dot(x) + self.objective_constant
    }

    /// Worst violation of equalities and bounds.
    pub fn feasibility_residual(&self, x: &DVector<f64>) -> f64 {
        let eq = inf_norm(&(&self.a * x - &self.b));
        let mut box_violation = 0.0f64;
        for j in 0..x.len() {
            box_violation = box_violation
                .max(self.lb[j] - x[j])
                .max(x[j] - self.ub[j]);
        }
        eq.max(box_violation).max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct QpSettings {
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub polish: bool,
}

impl Default for QpSettings {
    fn default() -> Self {
        Self {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            eps_abs: 1e-8,
            eps_rel: 1e-8,
            max_iter: 20_000,
            polish: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub polished: bool,
}

#[derive(Debug, Error)]
pub enum QpError {
    #[error("problem is infeasible: {0}")]
    Infeasible(String),
    #[error(
        "iteration cap reached with primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e}"
    )]
    MaxIterations {
        primal_residual: f64,
        dual_residual: f64,
    },
}

/// Diagonal scalings from Ruiz equilibration of the stacked problem data.
struct Scaling {
    d: DVector<f64>,     // variable scaling
    e_eq: DVector<f64>,  // equality row scaling
    e_box: DVector<f64>, // box row scaling
}

fn ruiz_equilibrate(problem: &QpProblem, iterations: usize) -> Scaling {
    let n = problem.num_vars();
    let m = problem.a.nrows();
    let mut d = DVector::from_element(n, 1.0);
    let mut e_eq = DVector::from_element(m, 1.0);
    let mut e_box = DVector::from_element(n, 1.0);

    for _ in 0..iterations {
        for j in 0..n {
            let mut norm = (d[j] * d[j] * problem.q_diag[j]).abs();
            for i in 0..m {
                norm = norm.max((e_eq[i] * problem.a[(i, j)] * d[j]).abs());
            }
            norm = norm.max(e_box[j] * d[j]);
            if norm > 0.0 {
                d[j] /= norm.sqrt();
            }
        }
        for i in 0..m {
            let mut norm = 0.0f64;
            for j in 0..n {
                norm = norm.max((e_eq[i] * problem.a[(i, j)] * d[j]).abs());
            }
            if norm > 0.0 {
                e_eq[i] /= norm.sqrt();
            }
        }
        for j in 0..n {
            let norm = e_box[j] * d[j];
            if norm > 0.0 {
                e_box[j] /= norm.sqrt();
            }
        }
    }
    Scaling { d, e_eq, e_box }
}

struct Workspace {
    a_scaled: DMatrix<f64>,
    at_scaled: DMatrix<f64>,
    q_diag_scaled: DVector<f64>,
    q_lin_scaled: DVector<f64>,
    b_scaled: DVector<f64>,
    lb_scaled: DVector<f64>,
    ub_scaled: DVector<f64>,
    g_box: DVector<f64>, // box block of the scaled constraint matrix
}

impl Workspace {
    fn new(problem: &QpProblem, scaling: &Scaling) -> Self {
        let n = problem.num_vars();
        let m = problem.a.nrows();
        let mut a_scaled = problem.a.clone();
        for i in 0..m {
            for j in 0..n {
                a_scaled[(i, j)] *= scaling.e_eq[i] * scaling.d[j];
            }
        }
        let q_diag_scaled = DVector::from_fn(n, |j, _| {
            problem.q_diag[j] * scaling.d[j] * scaling.d[j]
        });
        let q_lin_scaled = DVector::from_fn(n, |j, _| problem.q_lin[j] * scaling.d[j]);
        let b_scaled = DVector::from_fn(m, |i, _| problem.b[i] * scaling.e_eq[i]);
        let lb_scaled = DVector::from_fn(n, |j, _| problem.lb[j] * scaling.e_box[j]);
        let ub_scaled = DVector::from_fn(n, |j, _| problem.ub[j] * scaling.e_box[j]);
        let g_box = DVector::from_fn(n, |j, _| scaling.e_box[j] * scaling.d[j]);
        let at_scaled = a_scaled.transpose();
        Self {
            a_scaled,
            at_scaled,
            q_diag_scaled,
            q_lin_scaled,
            b_scaled,
            lb_scaled,
            ub_scaled,
            g_box,
        }
    }

    /// K = Q + sigma I + rho_eq A'A + rho_box diag(g^2), factored once per
    /// rho change.
    fn factor(
        &self,
        sigma: f64,
        rho_eq: f64,
        rho_box: f64,
    ) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        let n = self.q_diag_scaled.len();
        let mut k = &self.at_scaled * &self.a_scaled * rho_eq;
        for j in 0..n {
            k[(j, j)] +=
                self.q_diag_scaled[j] + sigma + rho_box * self.g_box[j] * self.g_box[j];
        }
        k.cholesky()
    }
}

pub fn solve_qp(problem: &QpProblem, settings: &QpSettings) -> Result<QpSolution, QpError> {
    let n = problem.num_vars();
    let m = problem.a.nrows();
    assert_eq!(problem.q_lin.len(), n);
    assert_eq!(problem.lb.len(), n);
    assert_eq!(problem.ub.len(), n);
    assert_eq!(problem.b.len(), m);

    for j in 0..n {
        if problem.lb[j] > problem.ub[j] {
            return Err(QpError::Infeasible(format!(
                "bound {j}: lower {} exceeds upper {}",
                problem.lb[j], problem.ub[j]
            )));
        }
    }

    if std::env::var_os("DHN_QP_TRACE").is_some() {
        eprintln!("solve_qp: n = {n}, m = {m}");
    }
    let scaling = ruiz_equilibrate(problem, 10);
    let ws = Workspace::new(problem, &scaling);
    let a_t = problem.a.transpose();

    let mut rho_box = settings.rho;
    let mut rho_eq = settings.rho * 1e3;
    let mut chol = ws
        .factor(settings.sigma, rho_eq, rho_box)
        .ok_or_else(|| QpError::Infeasible("KKT matrix is not positive definite".into()))?;

    // Scaled iterates: x, slack z = [z_eq; z_box], dual y likewise.
    let mut x = DVector::<f64>::zeros(n);
    let mut z_eq = ws.b_scaled.clone();
    let mut z_box = DVector::from_fn(n, |j, _| 0.0f64.clamp(ws.lb_scaled[j], ws.ub_scaled[j]));
    let mut y_eq = DVector::<f64>::zeros(m);
    let mut y_box = DVector::<f64>::zeros(n);

    let mut iterations = 0;
    let mut primal_residual = f64::INFINITY;
    let mut dual_residual = f64::INFINITY;
    let mut converged = false;
    let mut next_polish_attempt = 0usize;
    let mut last_polish: Option<(Vec<i8>, f64)> = None;

    while iterations < settings.max_iter {
        iterations += 1;

        // x-update.
        let mut rhs = &x * settings.sigma - &ws.q_lin_scaled;
        rhs += &ws.at_scaled * (&z_eq * rho_eq - &y_eq);
        for j in 0..n {
            rhs[j] += ws.g_box[j] * (rho_box * z_box[j] - y_box[j]);
        }
        let x_tilde = chol.solve(&rhs);

        let zhat_eq = &ws.a_scaled * &x_tilde;
        let zhat_box = DVector::from_fn(n, |j, _| ws.g_box[j] * x_tilde[j]);

        // Relaxation and projection.
        x = &x_tilde * settings.alpha + &x * (1.0 - settings.alpha);
        let mix_eq = &zhat_eq * settings.alpha + &z_eq * (1.0 - settings.alpha);
        let mix_box = &zhat_box * settings.alpha + &z_box * (1.0 - settings.alpha);

        // Equality rows project onto {b}.
        let z_eq_next = ws.b_scaled.clone();
        let z_box_next = DVector::from_fn(n, |j, _| {
            (mix_box[j] + y_box[j] / rho_box).clamp(ws.lb_scaled[j], ws.ub_scaled[j])
        });
        y_eq += (&mix_eq - &z_eq_next) * rho_eq;
        for j in 0..n {
            y_box[j] += rho_box * (mix_box[j] - z_box_next[j]);
        }
        z_eq = z_eq_next;
        z_box = z_box_next;

        if iterations % 25 == 0 || iterations == settings.max_iter {
            let (rp, rd, prim_scale, dual_scale) =
                residuals(problem, &a_t, &scaling, &x, &z_box, &y_eq, &y_box);
            primal_residual = rp;
            dual_residual = rd;
            let eps_p = settings.eps_abs + settings.eps_rel * prim_scale;
            let eps_d = settings.eps_abs + settings.eps_rel * dual_scale;
            if std::env::var_os("DHN_QP_TRACE").is_some() && iterations % 500 == 0 {
                eprintln!(
                    "iter {iterations}: rp {rp:.3e} rd {rd:.3e} rho {rho_box:.2e}"
                );
            }
            if rp <= eps_p && rd <= eps_d {
                converged = true;
                break;
            }
            // Once the iterate is moderately accurate the active set is
            // usually final; a successful polish is exact, so take it.
            let polish_p = 1e-4 * (1.0 + prim_scale);
            let polish_d = 1e-4 * (1.0 + dual_scale);
            if settings.polish
                && rp <= polish_p
                && rd <= polish_d
                && iterations >= next_polish_attempt
            {
                let x_candidate = DVector::from_fn(n, |j, _| x[j] * scaling.d[j]);
                if let Some(outcome) = polish(problem, &scaling, &x_candidate, &y_box) {
                    // Accept a certificate outright; without one, accept
                    // once the active set and objective have stopped moving
                    // between attempts (degenerate optima never certify).
                    let stable = last_polish.as_ref().is_some_and(|(pins, obj)| {
                        *pins == outcome.pins
                            && (obj - outcome.objective).abs()
                                <= 1e-9 * (1.0 + obj.abs())
                    });
                    if outcome.certified || stable {
                        return Ok(QpSolution {
                            objective: outcome.objective,
                            primal_residual: problem.feasibility_residual(&outcome.x),
                            dual_residual: rd,
                            iterations,
                            polished: true,
                            x: outcome.x,
                        });
                    }
                    last_polish = Some((outcome.pins, outcome.objective));
                }
                next_polish_attempt = iterations + 500;
            }
            // Step-size adaptation on the scaled residual balance; the
            // schedule is fixed, so runs stay deterministic.
            if iterations % 100 == 0 {
                let ratio = ((rp / prim_scale.max(1e-12)) / (rd / dual_scale.max(1e-12)))
                    .sqrt()
                    .clamp(1e-4, 1e4);
                if !(0.2..=5.0).contains(&ratio) {
                    rho_box = (rho_box * ratio).clamp(1e-6, 1e6);
                    rho_eq = rho_box * 1e3;
                    chol = ws
                        .factor(settings.sigma, rho_eq, rho_box)
                        .ok_or_else(|| {
                            QpError::Infeasible("KKT matrix lost positive definiteness".into())
                        })?;
                }
            }
        }
    }

    let mut x_unscaled = DVector::from_fn(n, |j, _| x[j] * scaling.d[j]);
    let mut polished = false;
    if settings.polish {
        if let Some(outcome) = polish(problem, &scaling, &x_unscaled, &y_box) {
            // A certificate proves optimality; without one (degenerate
            // active sets) accept the exact refinement as long as it does
            // not lose ground against the splitting iterate.
            let admm_objective = problem.objective(&x_unscaled);
            let slack = 1e-6 * (1.0 + admm_objective.abs());
            if outcome.certified || outcome.objective <= admm_objective + slack {
                x_unscaled = outcome.x;
                polished = true;
            }
        }
    }

    if !converged && !polished {
        let scale = 1.0 + inf_norm(&problem.b);
        if primal_residual > 1e-3 * scale {
            return Err(QpError::Infeasible(format!(
                "splitting stalled with primal residual {primal_residual:.3e}"
            )));
        }
        return Err(QpError::MaxIterations {
            primal_residual,
            dual_residual,
        });
    }

    Ok(QpSolution {
        objective: problem.objective(&x_unscaled),
        primal_residual: problem.feasibility_residual(&x_unscaled),
        dual_residual,
        iterations,
        polished,
        x: x_unscaled,
    })
}

/// Unscaled residuals plus the scales their tolerances derive from.
fn residuals(
    problem: &QpProblem,
    a_t: &DMatrix<f64>,
    scaling: &Scaling,
    x_scaled: &DVector<f64>,
    z_box_scaled: &DVector<f64>,
    y_eq_scaled: &DVector<f64>,
    y_box_scaled: &DVector<f64>,
) -> (f64, f64, f64, f64) {
    let n = problem.num_vars();
    let x = DVector::from_fn(n, |j, _| x_scaled[j] * scaling.d[j]);
    let y_eq = DVector::from_fn(problem.a.nrows(), |i, _| y_eq_scaled[i] * scaling.e_eq[i]);
    let y_box = DVector::from_fn(n, |j, _| y_box_scaled[j] * scaling.e_box[j]);
    let z_box = DVector::from_fn(n, |j, _| z_box_scaled[j] / scaling.e_box[j]);

    let ax = &problem.a * &x;
    let mut r_prim = inf_norm(&(&ax - &problem.b));
    let mut prim_scale = inf_norm(&ax).max(inf_norm(&problem.b));
    for j in 0..n {
        r_prim = r_prim.max((x[j] - z_box[j]).abs());
        prim_scale = prim_scale.max(x[j].abs()).max(z_box[j].abs());
    }

    let qx = x.component_mul(&problem.q_diag);
    let aty = a_t * &y_eq;
    let grad = &qx + &problem.q_lin + &aty + &y_box;
    let r_dual = inf_norm(&grad);
    let dual_scale = inf_norm(&qx)
        .max(inf_norm(&problem.q_lin))
        .max(inf_norm(&aty))
        .max(inf_norm(&y_box));

    (r_prim, r_dual, prim_scale, dual_scale)
}

/// A polish candidate: the exact solution of the equality-constrained QP
/// with the detected active bounds eliminated. `certified` marks candidates
/// whose recovered bound multipliers carry the right signs, i.e. a full KKT
/// certificate; degenerate active sets may be optimal without one.
struct PolishOutcome {
    x: DVector<f64>,
    objective: f64,
    certified: bool,
    pins: Vec<i8>,
}

/// Pins the active bounds as fixed variables, solves the reduced equality
/// QP exactly, and verifies the result. Variable elimination avoids the
/// rank deficiency of stacking redundant pin rows; the remaining equality
/// block gets quasi-definite regularization for consistent redundancy.
fn polish(
    problem: &QpProblem,
    scaling: &Scaling,
    x: &DVector<f64>,
    y_box_scaled: &DVector<f64>,
) -> Option<PolishOutcome> {
    let n = problem.num_vars();
    let m = problem.a.nrows();
    let tol_active = 1e-7;

    // lower pin = -1, upper pin = +1, free = 0
    let mut pin = vec![0i8; n];
    for j in 0..n {
        let y = y_box_scaled[j] * scaling.e_box[j];
        if y < -tol_active && problem.lb[j].is_finite() {
            pin[j] = -1;
        } else if y > tol_active && problem.ub[j].is_finite() {
            pin[j] = 1;
        } else if problem.lb[j].is_finite() && (x[j] - problem.lb[j]).abs() < 1e-7 {
            pin[j] = -1;
        } else if problem.ub[j].is_finite() && (x[j] - problem.ub[j]).abs() < 1e-7 {
            pin[j] = 1;
        }
    }

    let free: Vec<usize> = (0..n).filter(|&j| pin[j] == 0).collect();
    let nf = free.len();
    let pin_value = |j: usize| -> f64 {
        if pin[j] < 0 {
            problem.lb[j]
        } else {
            problem.ub[j]
        }
    };

    let a_max = problem.a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let reg = 1e-11 * (1.0 + inf_norm(&problem.q_diag).max(a_max));

    let dim = nf + m;
    let mut kkt = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for (fi, &j) in free.iter().enumerate() {
        kkt[(fi, fi)] = problem.q_diag[j] + reg;
        rhs[fi] = -problem.q_lin[j];
    }
    for i in 0..m {
        kkt[(nf + i, nf + i)] = -reg;
        let mut b_i = problem.b[i];
        for j in 0..n {
            let coef = problem.a[(i, j)];
            if coef == 0.0 {
                continue;
            }
            if pin[j] == 0 {
                let fi = free.iter().position(|&f| f == j).expect("free index");
                kkt[(nf + i, fi)] = coef;
                kkt[(fi, nf + i)] = coef;
            } else {
                b_i -= coef * pin_value(j);
            }
        }
        rhs[nf + i] = b_i;
    }

    let solution = kkt.full_piv_lu().solve(&rhs)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut x_polished = DVector::<f64>::zeros(n);
    for j in 0..n {
        if pin[j] != 0 {
            x_polished[j] = pin_value(j);
        }
    }
    for (fi, &j) in free.iter().enumerate() {
        x_polished[j] = solution[fi];
    }

    let feas_tol = (1e-8 * (1.0 + inf_norm(&problem.b))).max(1e-8);
    if problem.feasibility_residual(&x_polished) > feas_tol {
        if std::env::var_os("DHN_QP_TRACE").is_some() {
            eprintln!(
                "polish: infeasible ({:.3e} > {:.3e})",
                problem.feasibility_residual(&x_polished),
                feas_tol
            );
        }
        return None;
    }

    // Bound multipliers from stationarity at the pinned coordinates:
    // mu_j = -(Qx + q + A'nu)_j; lower pins need mu <= 0, upper mu >= 0.
    let nu = solution.rows(nf, m).into_owned();
    let grad = x_polished.component_mul(&problem.q_diag)
        + &problem.q_lin
        + problem.a.transpose() * &nu;
    let sign_tol = tol_active * (1.0 + inf_norm(&grad));
    let mut certified = true;
    for j in 0..n {
        let mu = -grad[j];
        if (pin[j] < 0 && mu > sign_tol) || (pin[j] > 0 && mu < -sign_tol) {
            certified = false;
            break;
        }
    }

    Some(PolishOutcome {
        objective: problem.objective(&x_polished),
        x: x_polished,
        certified,
        pins: pin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn free_bounds(n: usize) -> (DVector<f64>, DVector<f64>) {
        (
            DVector::from_element(n, f64::NEG_INFINITY),
            DVector::from_element(n, f64::INFINITY),
        )
    }

    #[test]
    fn unconstrained_scalar_minimum() {
        // min (x - 3)^2 -> x = 3.
        let (lb, ub) = free_bounds(1);
        let problem = QpProblem {
            q_diag: DVector::from_element(1, 2.0),
            q_lin: DVector::from_element(1, -6.0),
            a: DMatrix::zeros(0, 1),
            b: DVector::zeros(0),
            lb,
            ub,
            objective_constant: 9.0,
        };
        let sol = solve_qp(&problem, &QpSettings::default()).unwrap();
        assert_abs_diff_eq!(sol.x[0], 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.objective, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn equality_only_matches_direct_kkt() {
        // min 1/2 x'Qx + q'x s.t. Ax = b with random-ish data, against the
        // explicit KKT linear system.
        let n = 6;
        let m = 2;
        let q_diag = DVector::from_iterator(n, (0..n).map(|i| 1.0 + i as f64));
        let q_lin = DVector::from_iterator(n, (0..n).map(|i| ((i * 7 % 5) as f64) - 2.0));
        let a = DMatrix::from_row_slice(
            m,
            n,
            &[1.0, 0.5, -1.0, 0.0, 2.0, 0.0, 0.0, 1.5, 0.5, -0.5, 0.0, 1.0],
        );
        let b = DVector::from_iterator(m, [1.0, -2.0]);
        let (lb, ub) = free_bounds(n);
        let problem = QpProblem {
            q_diag: q_diag.clone(),
            q_lin: q_lin.clone(),
            a: a.clone(),
            b: b.clone(),
            lb,
            ub,
            objective_constant: 0.0,
        };
        let sol = solve_qp(&problem, &QpSettings::default()).unwrap();

        let dim = n + m;
        let mut kkt = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for j in 0..n {
            kkt[(j, j)] = q_diag[j];
            rhs[j] = -q_lin[j];
        }
        for i in 0..m {
            for j in 0..n {
                kkt[(n + i, j)] = a[(i, j)];
                kkt[(j, n + i)] = a[(i, j)];
            }
            rhs[n + i] = b[i];
        }
        let direct = kkt.full_piv_lu().solve(&rhs).unwrap();
        for j in 0..n {
            assert_abs_diff_eq!(sol.x[j], direct[j], epsilon = 1e-9);
        }
    }

    #[test]
    fn active_bound_is_respected() {
        // min (x - 3)^2 s.t. x <= 1 -> x = 1.
        let problem = QpProblem {
            q_diag: DVector::from_element(1, 2.0),
            q_lin: DVector::from_element(1, -6.0),
            a: DMatrix::zeros(0, 1),
            b: DVector::zeros(0),
            lb: DVector::from_element(1, f64::NEG_INFINITY),
            ub: DVector::from_element(1, 1.0),
            objective_constant: 0.0,
        };
        let sol = solve_qp(&problem, &QpSettings::default()).unwrap();
        assert_abs_diff_eq!(sol.x[0], 1.0, epsilon = 1e-9);
        assert!(sol.polished);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let problem = QpProblem {
            q_diag: DVector::from_element(1, 2.0),
            q_lin: DVector::zeros(1),
            a: DMatrix::zeros(0, 1),
            b: DVector::zeros(0),
            lb: DVector::from_element(1, 2.0),
            ub: DVector::from_element(1, 1.0),
            objective_constant: 0.0,
        };
        assert!(matches!(
            solve_qp(&problem, &QpSettings::default()),
            Err(QpError::Infeasible(_))
        ));
    }

    #[test]
    fn mixed_problem_with_equality_and_boxes() {
        // min x1^2 + x2^2 s.t. x1 + x2 = 2, x1 <= 0.5 -> x = (0.5, 1.5).
        let problem = QpProblem {
            q_diag: DVector::from_element(2, 2.0),
            q_lin: DVector::zeros(2),
            a: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            b: DVector::from_element(1, 2.0),
            lb: DVector::from_element(2, f64::NEG_INFINITY),
            ub: DVector::from_iterator(2, [0.5, f64::INFINITY]),
            objective_constant: 0.0,
        };
        let sol = solve_qp(&problem, &QpSettings::default()).unwrap();
        assert_abs_diff_eq!(sol.x[0], 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.x[1], 1.5, epsilon = 1e-8);
        assert!(sol.primal_residual < 1e-6);
    }
}
