//! Error metrics between a model and the reference solution.

use crate::error::{Error, Result};

/// Mean squared error and maximum absolute error over a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub mse: f64,
    pub max_abs_error: f64,
    pub n_points: usize,
}

/// `mse = (1/n) sum (y_i - yhat_i)^2`, `max_abs_error = max |y_i - yhat_i|`.
pub fn error_metrics(y_true: &[f64], y_hat: &[f64]) -> Result<ErrorMetrics> {
    if y_true.len() != y_hat.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            y_true.len(),
            y_hat.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::invalid("error metrics need at least one point"));
    }
    let mut sum_sq = 0.0;
    let mut max_abs = 0.0_f64;
    for (&y, &yh) in y_true.iter().zip(y_hat) {
        let d = y - yh;
        sum_sq += d * d;
        max_abs = max_abs.max(d.abs());
    }
    Ok(ErrorMetrics { mse: sum_sq / y_true.len() as f64, max_abs_error: max_abs, n_points: y_true.len() })
}
