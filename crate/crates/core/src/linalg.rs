//! Dense linear-algebra kernels: minimum-norm least squares through the SVD
//! and full-pivot LU solves for the square KKT systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimizer of `||A x - b||_2` via the singular value decomposition.
///
/// Singular values below `max(p, q) * eps * sigma_max` are truncated, so a
/// rank-deficient system returns the minimum-norm minimizer. Normal
/// equations are avoided on purpose: the collocation matrices this crate
/// produces are too ill-conditioned for them.
pub fn solve_least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {}x{} matrix with length-{} rhs",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::invalid("empty system"));
    }
    if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite entries in least-squares system"));
    }
    let svd = a.clone().svd(true, true);
    let tol = rank_tolerance(a, &svd.singular_values);
    let mut x = svd.solve(b, tol).map_err(Error::numeric)?;
    // One step of iterative refinement through the same truncated SVD;
    // recovers accuracy lost to ill conditioning without touching the
    // null-space components.
    let residual = b - a * &x;
    if let Ok(corr) = svd.solve(&residual, tol) {
        let candidate = &x + &corr;
        if (a * &candidate - b).norm() < residual.norm() {
            x = candidate;
        }
    }
    Ok(x)
}

/// Same decomposition, but reports the numerical rank alongside the solution.
pub(crate) fn solve_least_squares_with_rank(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Result<(DVector<f64>, usize)> {
    let svd = a.clone().svd(true, true);
    let tol = rank_tolerance(a, &svd.singular_values);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let x = svd.solve(b, tol).map_err(Error::numeric)?;
    Ok((x, rank))
}

fn rank_tolerance(a: &DMatrix<f64>, singular_values: &DVector<f64>) -> f64 {
    let smax = singular_values.iter().cloned().fold(0.0_f64, f64::max);
    a.nrows().max(a.ncols()) as f64 * f64::EPSILON * smax
}

/// Solves a square dual (KKT) system through the SVD with minimal
/// truncation, plus one refinement step.
///
/// The kernel systems this crate assembles are regularized Gram matrices:
/// numerically singular at the benchmark regularization weights, yet with
/// a right-hand side whose components along the noise directions are
/// noise-level themselves, so keeping those directions is harmless while
/// truncating them leaves the collocation residual orders of magnitude
/// above its floor. Pivoted elimination loses four or more digits on the
/// same systems. `symmetric` callers get the matrix symmetrized first,
/// which preserves the Gram structure the assembly only approximates to
/// rounding.
pub fn solve_kkt(a: &DMatrix<f64>, b: &DVector<f64>, symmetric: bool) -> Result<DVector<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::invalid(format!(
            "square solve expects n x n and length-n rhs, got {}x{} and {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let m = if symmetric { 0.5 * (a + a.transpose()) } else { a.clone() };
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if !smax.is_finite() || smax <= 0.0 {
        return Err(Error::numeric("degenerate system matrix"));
    }
    let tol = 1e-4 * f64::EPSILON * smax;
    let mut x = svd.solve(b, tol).map_err(Error::numeric)?;
    let residual = b - &m * &x;
    if let Ok(corr) = svd.solve(&residual, tol) {
        let candidate = &x + &corr;
        if (&m * &candidate - b).norm() < residual.norm() {
            x = candidate;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite solution from KKT solve"));
    }
    Ok(x)
}

/// Solves a square system by full-pivot LU with one step of iterative
/// refinement. Returns `Err` on exact singularity or a non-finite solution.
pub fn solve_full_piv(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::invalid(format!(
            "square solve expects n x n and length-n rhs, got {}x{} and {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let lu = a.clone().full_piv_lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| Error::numeric("singular system in full-pivot LU"))?;
    let residual = b - a * &x;
    if let Some(corr) = lu.solve(&residual) {
        x += corr;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite solution from full-pivot LU"));
    }
    Ok(x)
}

/// Two-norm condition estimate `sigma_max / sigma_min`; infinite for a
/// numerically singular matrix.
pub fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Condition of the rank-truncated least-squares solve: largest over
/// smallest singular value that survives the rank tolerance.
pub fn effective_condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let tol = a.nrows().max(a.ncols()) as f64 * f64::EPSILON * smax;
    let smin_kept = sv.iter().cloned().filter(|s| *s > tol).fold(f64::INFINITY, f64::min);
    if smin_kept.is_finite() && smin_kept > 0.0 {
        smax / smin_kept
    } else {
        f64::INFINITY
    }
}
