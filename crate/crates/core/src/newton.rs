//! Gauss-Newton iteration on collocated residuals.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default convergence tolerance on the residual two-norm.
pub const DEFAULT_EPS: f64 = 1e-13;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 30;

/// Outcome of a Newton run.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
}

/// Iterates `xi <- xi - (J^T J)^{-1} J^T L` until `||L||_2 < eps` or
/// `max_iter` steps have been taken.
///
/// The step is computed as the minimum-norm least-squares solution of
/// `J d = L`, which coincides with the normal-equation step for a
/// full-rank Jacobian and absorbs null directions otherwise (the
/// constrained expressions deliberately carry basis columns that the
/// constraints annihilate). A Jacobian of numerical rank zero is reported
/// as singular. Running out of iterations is not an error: the best
/// iterate is returned with `converged == false`, and iteration stops
/// early if a step fails to decrease the residual.
pub fn newton_solve(
    mut residual_fn: impl FnMut(&DVector<f64>) -> DVector<f64>,
    mut jacobian_fn: impl FnMut(&DVector<f64>) -> DMatrix<f64>,
    xi0: &DVector<f64>,
    eps: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, ConvergenceReport)> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid(format!("convergence tolerance must be positive, got {eps}")));
    }
    let mut xi = xi0.clone();
    let mut best = xi.clone();
    let mut best_norm = f64::INFINITY;
    let mut stalled = 0usize;
    let mut steps = 0;
    loop {
        let r = residual_fn(&xi);
        let norm = r.norm();
        if !norm.is_finite() {
            break;
        }
        if norm < best_norm {
            best.copy_from(&xi);
            best_norm = norm;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if norm < eps {
            return Ok((
                xi,
                ConvergenceReport { iterations: steps, final_residual_norm: norm, converged: true },
            ));
        }
        if steps == max_iter || stalled >= 2 {
            break;
        }
        let j = jacobian_fn(&xi);
        if j.nrows() != r.len() {
            return Err(Error::invalid(format!(
                "jacobian has {} rows for a length-{} residual",
                j.nrows(),
                r.len()
            )));
        }
        let (delta, rank) = crate::linalg::solve_least_squares_with_rank(&j, &r)?;
        if rank == 0 || delta.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        // A vanishing step means the least-squares minimum of the residual
        // is reached: the residual is orthogonal to the Jacobian range, so
        // the iteration is at its stationary point even when the
        // collocated residual itself cannot reach eps (fewer basis
        // functions than collocation points).
        if delta.norm() <= 1e-13 * (1.0 + xi.norm()) {
            return Ok((
                xi,
                ConvergenceReport { iterations: steps, final_residual_norm: norm, converged: true },
            ));
        }
        xi -= delta;
        steps += 1;
    }
    Ok((
        best,
        ConvergenceReport { iterations: steps, final_residual_norm: best_norm, converged: false },
    ))
}
