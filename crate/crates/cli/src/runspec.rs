//! Benchmark run specifications: the JSON schema consumed by `bench` and
//! its validated in-memory form.

use serde::{Deserialize, Serialize};

use desolve::problems::{problem_by_id, BenchmarkProblem, ProblemKind};
use desolve::report::Method;

use crate::CliError;

/// Hyperparameter selection strategy.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuning {
    /// The per-method search protocol: basis-count grid scored by equation
    /// residual, or a bandwidth/regularization grid scored by validation
    /// error (the nonlinear problem tunes bandwidth by simplex instead).
    #[default]
    Grid,
    /// Downhill-simplex over the bandwidth with the regularization weight
    /// fixed at 1e10 (kernel methods only).
    Simplex,
    /// Fixed values, used unchanged.
    Fixed(FixedHp),
}

/// Fixed hyperparameters; which fields must be present depends on the
/// method.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedHp {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

/// One benchmark sweep: a problem/method pair over a list of training
/// point counts. Unknown JSON keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub problem_id: String,
    pub method: String,
    /// Defaults to {8,16,32,50,100} for the ODE problems and
    /// {9,16,36,64,100} interior points for the PDE.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_counts: Option<Vec<usize>>,
    #[serde(default)]
    pub tuning: Tuning,
    /// Reserved for stochastic extensions; the sweep itself is
    /// deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Test-set size: point count in 1-D, total grid size in 2-D
    /// (rounded to a square). Defaults to 1000 and 33x33.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_points: Option<usize>,
}

/// A parsed and checked run spec.
#[derive(Debug, Clone)]
pub struct ValidatedSpec {
    pub problem: BenchmarkProblem,
    pub method: Method,
    pub point_counts: Vec<usize>,
    pub tuning: Tuning,
    pub seed: u64,
    pub test_points: Option<usize>,
}

impl RunSpec {
    pub fn validate(&self) -> Result<ValidatedSpec, CliError> {
        let problem_id = self
            .problem_id
            .parse()
            .map_err(|e: desolve::Error| CliError::Invalid(e.to_string()))?;
        let method: Method =
            self.method.parse().map_err(|e: desolve::Error| CliError::Invalid(e.to_string()))?;
        let problem = problem_by_id(problem_id);
        let is_pde = matches!(problem.kind, ProblemKind::LinearPoisson2d { .. });
        let point_counts = match &self.point_counts {
            Some(counts) if counts.is_empty() => {
                return Err(CliError::Invalid("point_counts must be nonempty".into()))
            }
            Some(counts) => {
                if counts.contains(&0) {
                    return Err(CliError::Invalid("point counts must be positive".into()));
                }
                counts.clone()
            }
            None if is_pde => vec![9, 16, 36, 64, 100],
            None => vec![8, 16, 32, 50, 100],
        };
        match (&self.tuning, method) {
            (Tuning::Simplex, Method::Tfc) => {
                return Err(CliError::Invalid(
                    "simplex tuning applies to the kernel methods only".into(),
                ))
            }
            (Tuning::Fixed(hp), Method::Tfc)
                if hp.m.is_none() || hp.sigma.is_some() || hp.gamma.is_some() =>
            {
                return Err(CliError::Invalid("fixed hyperparameters for tfc take m only".into()))
            }
            (Tuning::Fixed(hp), Method::Lssvm | Method::Csvm)
                if hp.sigma.is_none() || hp.gamma.is_none() || hp.m.is_some() =>
            {
                return Err(CliError::Invalid(
                    "fixed hyperparameters for the kernel methods take sigma and gamma".into(),
                ))
            }
            _ => {}
        }
        if let Some(tp) = self.test_points {
            if tp < 2 {
                return Err(CliError::Invalid("test_points must be at least 2".into()));
            }
        }
        Ok(ValidatedSpec {
            problem,
            method,
            point_counts,
            tuning: self.tuning.clone(),
            seed: self.seed,
            test_points: self.test_points,
        })
    }

    /// Parses a spec from JSON, rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<RunSpec, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("bad spec json: {e}")))
    }
}
