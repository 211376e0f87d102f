//! Hyperparameter selection: grid search scored on a held-out midpoint
//! validation set (kernel methods) or on the collocated equation residual
//! (basis-count selection), with a simplex search over the bandwidth for
//! the nonlinear problem.

use desolve::csvm::{solve_linear_ode_csvm, solve_nonlinear_ode_csvm, solve_pde_csvm};
use desolve::grid::{linspace, midpoints, uniform_points};
use desolve::kernel::KernelConfig;
use desolve::problems::{BenchmarkProblem, Domain, Point, ProblemKind};
use desolve::report::Method;
use desolve::simplex::nelder_mead_minimize;
use desolve::svm::{solve_linear_ode_lssvm, solve_linear_pde_lssvm, solve_nonlinear_ode_lssvm};
use desolve::tfc::{pde_grid_side, solve_linear_ode_tfc, solve_linear_pde_tfc, solve_nonlinear_ode_tfc};

use crate::runspec::{Tuning, ValidatedSpec};
use crate::CliError;

/// Basis-count grid bounds for the functional-interpolation method.
const TFC_M_RANGE: (usize, usize) = (5, 40);
/// Bandwidth grid: 13 log-spaced points in [1e-2, 1e1].
const SIGMA_GRID_POINTS: usize = 13;
/// Regularization grid: 16 log-spaced points in [1e5, 1e20].
const GAMMA_GRID_POINTS: usize = 16;
/// Fixed regularization weight of the simplex protocol.
const SIMPLEX_GAMMA: f64 = 1e10;
/// Simplex starting bandwidth.
const SIMPLEX_SIGMA_START: f64 = 0.4;

/// Selected hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TunedHp {
    BasisCount(usize),
    Kernel { sigma: f64, gamma: f64 },
}

pub fn sigma_grid() -> Vec<f64> {
    (0..SIGMA_GRID_POINTS)
        .map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / (SIGMA_GRID_POINTS - 1) as f64))
        .collect()
}

pub fn gamma_grid() -> Vec<f64> {
    (0..GAMMA_GRID_POINTS)
        .map(|i| 10f64.powf(5.0 + 15.0 * i as f64 / (GAMMA_GRID_POINTS - 1) as f64))
        .collect()
}

/// Selects hyperparameters for one (problem, method, point count) cell
/// according to the run spec's tuning mode. Fixed values are returned
/// unchanged; the kernel grid breaks ties toward smaller bandwidth, then
/// smaller regularization; the basis grid toward fewer functions.
pub fn tune_hyperparameters(
    problem: &BenchmarkProblem,
    method: Method,
    n: usize,
    spec: &ValidatedSpec,
) -> Result<TunedHp, CliError> {
    match (&spec.tuning, method) {
        (Tuning::Fixed(hp), Method::Tfc) => Ok(TunedHp::BasisCount(hp.m.expect("validated"))),
        (Tuning::Fixed(hp), _) => Ok(TunedHp::Kernel {
            sigma: hp.sigma.expect("validated"),
            gamma: hp.gamma.expect("validated"),
        }),
        (_, Method::Tfc) => tune_tfc(problem, n),
        (Tuning::Simplex, m) => tune_simplex(problem, m, n),
        (Tuning::Grid, m) => {
            if matches!(problem.kind, ProblemKind::NonlinearFirstOrder { .. }) {
                // The nonlinear problem is tuned by simplex; a raw grid
                // does a poor job there.
                tune_simplex(problem, m, n)
            } else {
                tune_kernel_grid(problem, m, n)
            }
        }
    }
}

/// Basis-count grid scored by the collocated equation residual norm.
fn tune_tfc(problem: &BenchmarkProblem, n: usize) -> Result<TunedHp, CliError> {
    let is_pde = matches!(problem.kind, ProblemKind::LinearPoisson2d { .. });
    let m_hi = if is_pde { TFC_M_RANGE.1 } else { TFC_M_RANGE.1.min(n + 1) };
    let mut best: Option<(usize, f64)> = None;
    for m in TFC_M_RANGE.0..=m_hi {
        let solved = match problem.kind {
            ProblemKind::LinearFirstOrder { .. } | ProblemKind::LinearSecondOrder { .. } => {
                solve_linear_ode_tfc(problem, n, m)
            }
            ProblemKind::NonlinearFirstOrder { .. } => solve_nonlinear_ode_tfc(problem, n, m),
            ProblemKind::LinearPoisson2d { .. } => solve_linear_pde_tfc(problem, n, m),
        };
        let Ok((solution, _)) = solved else { continue };
        let score = solution.residual_norm;
        if !score.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((m, score));
        }
    }
    best.map(|(m, _)| TunedHp::BasisCount(m))
        .ok_or_else(|| CliError::Numeric("every basis-count candidate failed".into()))
}

/// Validation points: midpoints of the training grid, staying inside the
/// domain by construction.
fn validation_points_1d(problem: &BenchmarkProblem, n: usize) -> Vec<f64> {
    let (t0, tf) = problem.interval().expect("1-D problem");
    midpoints(&uniform_points(n, t0, tf).expect("valid grid"))
}

fn validation_points_2d(problem: &BenchmarkProblem, n_domain: usize) -> Vec<(f64, f64)> {
    let Domain::Rectangle { x0, x1, y0, y1 } = problem.domain else {
        unreachable!("2-D problem")
    };
    let side = pde_grid_side(n_domain);
    let xs = midpoints(&linspace(x0, x1, side));
    let ys = midpoints(&linspace(y0, y1, side));
    let mut pts = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            pts.push((x, y));
        }
    }
    pts
}

/// Mean squared validation error of one kernel solve; `None` when the
/// solve fails or the error is not finite.
fn validation_mse(
    problem: &BenchmarkProblem,
    method: Method,
    n: usize,
    cfg: KernelConfig,
) -> Option<f64> {
    let mse = match problem.kind {
        ProblemKind::LinearFirstOrder { .. } | ProblemKind::LinearSecondOrder { .. } => {
            let sol = match method {
                Method::Lssvm => solve_linear_ode_lssvm(problem, n, cfg).ok()?.0.into_eval_1d(),
                Method::Csvm => solve_linear_ode_csvm(problem, n, cfg).ok()?.0.into_eval_1d(),
                Method::Tfc => unreachable!(),
            };
            let analytic = |t: f64| problem.analytic_1d(t).expect("in-domain");
            let pts = validation_points_1d(problem, n);
            pts.iter()
                .map(|&t| {
                    let d = sol(t) - analytic(t);
                    d * d
                })
                .sum::<f64>()
                / pts.len() as f64
        }
        ProblemKind::NonlinearFirstOrder { .. } => {
            let sol = match method {
                Method::Lssvm => solve_nonlinear_ode_lssvm(problem, n, cfg).ok()?.0.into_eval_1d(),
                Method::Csvm => solve_nonlinear_ode_csvm(problem, n, cfg).ok()?.0.into_eval_1d(),
                Method::Tfc => unreachable!(),
            };
            let analytic = |t: f64| problem.analytic_1d(t).expect("in-domain");
            let pts = validation_points_1d(problem, n);
            pts.iter()
                .map(|&t| {
                    let d = sol(t) - analytic(t);
                    d * d
                })
                .sum::<f64>()
                / pts.len() as f64
        }
        ProblemKind::LinearPoisson2d { .. } => {
            let sol = match method {
                Method::Lssvm => solve_linear_pde_lssvm(problem, n, cfg).ok()?.0.into_eval_2d(),
                Method::Csvm => solve_pde_csvm(problem, n, cfg).ok()?.0.into_eval_2d(),
                Method::Tfc => unreachable!(),
            };
            let analytic = |x: f64, y: f64| problem.analytic_2d(x, y).expect("in-domain");
            let pts = validation_points_2d(problem, n);
            pts.iter()
                .map(|&(x, y)| {
                    let d = sol(x, y) - analytic(x, y);
                    d * d
                })
                .sum::<f64>()
                / pts.len() as f64
        }
    };
    mse.is_finite().then_some(mse)
}

fn tune_kernel_grid(
    problem: &BenchmarkProblem,
    method: Method,
    n: usize,
) -> Result<TunedHp, CliError> {
    let mut best: Option<(f64, f64, f64)> = None;
    for &sigma in &sigma_grid() {
        for &gamma in &gamma_grid() {
            let Ok(cfg) = KernelConfig::new(sigma, gamma) else { continue };
            let Some(mse) = validation_mse(problem, method, n, cfg) else { continue };
            if best.is_none_or(|(_, _, s)| mse < s) {
                best = Some((sigma, gamma, mse));
            }
        }
    }
    best.map(|(sigma, gamma, _)| TunedHp::Kernel { sigma, gamma })
        .ok_or_else(|| CliError::Numeric("every kernel grid candidate failed".into()))
}

fn tune_simplex(problem: &BenchmarkProblem, method: Method, n: usize) -> Result<TunedHp, CliError> {
    let objective = |v: &[f64]| -> f64 {
        let sigma = v[0];
        if sigma.is_nan() || sigma <= 0.0 {
            return f64::INFINITY;
        }
        let Ok(cfg) = KernelConfig::new(sigma, SIMPLEX_GAMMA) else {
            return f64::INFINITY;
        };
        validation_mse(problem, method, n, cfg).unwrap_or(f64::INFINITY)
    };
    let (best, value) = nelder_mead_minimize(
        objective,
        &[SIMPLEX_SIGMA_START],
        desolve::simplex::DEFAULT_TOL,
        desolve::simplex::DEFAULT_MAX_EVALS,
    )
    .map_err(CliError::from)?;
    if !value.is_finite() {
        return Err(CliError::Numeric("simplex found no finite validation error".into()));
    }
    Ok(TunedHp::Kernel { sigma: best[0], gamma: SIMPLEX_GAMMA })
}

// Small adapters so the validation loop can hold one closure type.
trait IntoEval1d {
    fn into_eval_1d(self) -> Box<dyn Fn(f64) -> f64>;
}
trait IntoEval2d {
    fn into_eval_2d(self) -> Box<dyn Fn(f64, f64) -> f64>;
}

impl IntoEval1d for desolve::svm::DualSolution {
    fn into_eval_1d(self) -> Box<dyn Fn(f64) -> f64> {
        Box::new(move |t| self.evaluate(Point::OneD(t)).expect("1-D solution"))
    }
}
impl IntoEval1d for desolve::csvm::CsvmDualSolution {
    fn into_eval_1d(self) -> Box<dyn Fn(f64) -> f64> {
        Box::new(move |t| self.evaluate(Point::OneD(t)).expect("1-D solution"))
    }
}
impl IntoEval2d for desolve::svm::DualSolution {
    fn into_eval_2d(self) -> Box<dyn Fn(f64, f64) -> f64> {
        Box::new(move |x, y| self.evaluate(Point::TwoD(x, y)).expect("2-D solution"))
    }
}
impl IntoEval2d for desolve::csvm::CsvmDualSolution {
    fn into_eval_2d(self) -> Box<dyn Fn(f64, f64) -> f64> {
        Box::new(move |x, y| self.evaluate(Point::TwoD(x, y)).expect("2-D solution"))
    }
}
