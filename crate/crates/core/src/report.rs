//! Per-run error reports shared by every solver.

use crate::error::{Error, Result};
use crate::metrics::error_metrics;
use crate::problems::ProblemId;

/// Solution method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Tfc,
    Lssvm,
    Csvm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Tfc => "tfc",
            Method::Lssvm => "lssvm",
            Method::Csvm => "csvm",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tfc" => Ok(Method::Tfc),
            "lssvm" | "ls-svm" => Ok(Method::Lssvm),
            "csvm" => Ok(Method::Csvm),
            _ => Err(Error::invalid(format!("unknown method {s:?}"))),
        }
    }
}

/// Tuned or fixed hyperparameters attached to a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperparameters {
    /// Basis-function count of the functional-interpolation solver.
    BasisCount(usize),
    /// Kernel bandwidth and regularization weight of the dual solvers.
    Kernel { sigma: f64, gamma: f64 },
}

/// One benchmark row: method, problem, point count, timing, train/test
/// errors, hyperparameters, and the solve's condition estimate.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub problem_id: ProblemId,
    pub method: Method,
    pub n_train: usize,
    /// Wall-clock seconds of the training (solve) call only.
    pub train_time_s: f64,
    pub max_err_train: f64,
    pub mse_train: f64,
    pub max_err_test: f64,
    pub mse_test: f64,
    pub hyperparameters: Hyperparameters,
    pub converged: bool,
    pub condition_estimate: Option<f64>,
}

impl ErrorReport {
    /// Builds a report from raw train/test value pairs.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_values(
        problem_id: ProblemId,
        method: Method,
        n_train: usize,
        train_time_s: f64,
        train_true: &[f64],
        train_hat: &[f64],
        test_true: &[f64],
        test_hat: &[f64],
        hyperparameters: Hyperparameters,
        converged: bool,
        condition_estimate: Option<f64>,
    ) -> Result<Self> {
        let train = error_metrics(train_true, train_hat)?;
        let test = error_metrics(test_true, test_hat)?;
        Ok(ErrorReport {
            problem_id,
            method,
            n_train,
            train_time_s,
            max_err_train: train.max_abs_error,
            mse_train: train.mse,
            max_err_test: test.max_abs_error,
            mse_test: test.mse,
            hyperparameters,
            converged,
            condition_estimate,
        })
    }
}

/// Number of test points used by the 1-D solvers.
pub const DEFAULT_TEST_POINTS_1D: usize = 1000;
/// Test grid side used by the 2-D solvers (33 x 33 points).
pub const DEFAULT_TEST_SIDE_2D: usize = 33;
