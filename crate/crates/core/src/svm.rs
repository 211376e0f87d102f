//! Least-squares support-vector collocation solvers.
//!
//! The model `y(t) = w^T phi(t) + b` collocates the differential equation
//! as equality constraints on regularized residuals `e_i` and enforces the
//! initial (or boundary) data exactly, each with its own Lagrange
//! multiplier. Eliminating `w` and `e` from the stationarity conditions of
//!
//! ```text
//! L = (w^T w + gamma e^T e) / 2 - sum_i alpha_i [constraint_i] - beta [data]
//! ```
//!
//! leaves a square KKT system in the multipliers, expressed entirely
//! through the RBF kernel and its derivatives; the model is evaluated in
//! the same dual form. Nonlinear dynamics add node values `y_i` and
//! multipliers `eta_i`, giving the 3N+2 square system solved by Newton
//! iteration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{linspace, uniform_points};
use crate::heun::heun_trajectory;
use crate::kernel::{
    feature_inner, feature_inner_2d, FeatureTerm, FeatureTerm2d, Kernel1d, Kernel2d, KernelConfig,
    RbfKernel, RbfKernel2d,
};
use crate::linalg::{condition_estimate, solve_full_piv, solve_kkt};
use crate::newton::ConvergenceReport;
use crate::problems::{BenchmarkProblem, BoundaryCurve, Domain, Point, ProblemKind};
use crate::report::{
    ErrorReport, Hyperparameters, Method, DEFAULT_TEST_POINTS_1D, DEFAULT_TEST_SIDE_2D,
};
use crate::tfc::pde_grid_side;

/// Maximum Newton iterations for the nonlinear KKT system.
pub const NONLINEAR_MAX_ITER: usize = 50;
/// Step-norm tolerance for the nonlinear KKT Newton iteration.
pub const NONLINEAR_STEP_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Solution type

#[derive(Debug, Clone)]
enum DualVariant {
    LinearFirstOrder {
        points: Vec<f64>,
        p_vals: Vec<f64>,
        alpha: DVector<f64>,
        beta: f64,
        bias: f64,
    },
    LinearSecondOrder {
        points: Vec<f64>,
        a1_vals: Vec<f64>,
        a0_vals: Vec<f64>,
        alpha: DVector<f64>,
        beta1: f64,
        beta2: f64,
        bias: f64,
    },
    Nonlinear {
        points: Vec<f64>,
        alpha: DVector<f64>,
        eta: DVector<f64>,
        y_nodes: DVector<f64>,
        beta: f64,
        bias: f64,
    },
    Poisson {
        interior: Vec<(f64, f64)>,
        boundary: Vec<(f64, f64)>,
        alpha: DVector<f64>,
        beta: DVector<f64>,
        bias: f64,
    },
}

/// Dual variables of a solved LS-SVM system together with the kernel
/// configuration and training points; evaluable anywhere.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub kernel: KernelConfig,
    pub condition_estimate: f64,
    /// Newton report for the nonlinear variant.
    pub newton: Option<ConvergenceReport>,
    variant: DualVariant,
}

impl DualSolution {
    /// Residual multipliers, one per collocated equation.
    pub fn alpha(&self) -> &DVector<f64> {
        match &self.variant {
            DualVariant::LinearFirstOrder { alpha, .. }
            | DualVariant::LinearSecondOrder { alpha, .. }
            | DualVariant::Nonlinear { alpha, .. }
            | DualVariant::Poisson { alpha, .. } => alpha,
        }
    }

    /// Training points of a 1-D solve (the full grid including `t0`).
    pub fn train_points(&self) -> Option<&[f64]> {
        match &self.variant {
            DualVariant::LinearFirstOrder { points, .. }
            | DualVariant::LinearSecondOrder { points, .. }
            | DualVariant::Nonlinear { points, .. } => Some(points),
            DualVariant::Poisson { .. } => None,
        }
    }

    /// Node values carried by the nonlinear variant.
    pub fn y_nodes(&self) -> Option<&DVector<f64>> {
        match &self.variant {
            DualVariant::Nonlinear { y_nodes, .. } => Some(y_nodes),
            _ => None,
        }
    }

    /// Multipliers of the node-value equations (nonlinear variant).
    pub fn eta(&self) -> Option<&DVector<f64>> {
        match &self.variant {
            DualVariant::Nonlinear { eta, .. } => Some(eta),
            _ => None,
        }
    }

    /// Multipliers of the exact data equations, in system order.
    pub fn data_multipliers(&self) -> Vec<f64> {
        match &self.variant {
            DualVariant::LinearFirstOrder { beta, .. } => vec![*beta],
            DualVariant::LinearSecondOrder { beta1, beta2, .. } => vec![*beta1, *beta2],
            DualVariant::Nonlinear { beta, .. } => vec![*beta],
            DualVariant::Poisson { beta, .. } => beta.iter().cloned().collect(),
        }
    }

    /// Model bias term.
    pub fn bias(&self) -> f64 {
        match &self.variant {
            DualVariant::LinearFirstOrder { bias, .. }
            | DualVariant::LinearSecondOrder { bias, .. }
            | DualVariant::Nonlinear { bias, .. }
            | DualVariant::Poisson { bias, .. } => *bias,
        }
    }

    /// Kernel-expansion model value at a point, using the dual form that
    /// matches the solver variant which produced this solution.
    pub fn evaluate(&self, point: Point) -> Result<f64> {
        let kern = RbfKernel { sigma: self.kernel.sigma };
        match (&self.variant, point) {
            (DualVariant::LinearFirstOrder { .. }, Point::OneD(t)) => Ok(self.value_1d(t, &kern, 0)),
            (DualVariant::LinearSecondOrder { .. }, Point::OneD(t)) => Ok(self.value_1d(t, &kern, 0)),
            (DualVariant::Nonlinear { .. }, Point::OneD(t)) => Ok(self.value_1d(t, &kern, 0)),
            (DualVariant::Poisson { .. }, Point::TwoD(x, y)) => Ok(self.value_2d((x, y))),
            _ => Err(Error::VariantMismatch(
                "point dimensionality does not match the solver variant".into(),
            )),
        }
    }

    /// t-derivative of a 1-D dual model, `order <= 2`.
    pub fn derivative(&self, t: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::UnsupportedOrder { order, max: 2 });
        }
        let kern = RbfKernel { sigma: self.kernel.sigma };
        match &self.variant {
            DualVariant::Poisson { .. } => Err(Error::VariantMismatch(
                "1-D derivative requested from the 2-D variant".into(),
            )),
            _ => Ok(self.value_1d(t, &kern, order)),
        }
    }

    /// Shared dual evaluation: `order`-th derivative of the model at `t`.
    fn value_1d(&self, t: f64, kern: &RbfKernel, order: usize) -> f64 {
        let bias_active = order == 0;
        match &self.variant {
            DualVariant::LinearFirstOrder { points, p_vals, alpha, beta, bias } => {
                let t0 = points[0];
                let mut acc = if bias_active { *bias } else { 0.0 };
                acc += beta * kern.eval(t0, 0, t, order);
                for (j, &tj) in points[1..].iter().enumerate() {
                    acc += alpha[j]
                        * (kern.eval(tj, 1, t, order) - p_vals[j] * kern.eval(tj, 0, t, order));
                }
                acc
            }
            DualVariant::LinearSecondOrder { points, a1_vals, a0_vals, alpha, beta1, beta2, bias } => {
                let t0 = points[0];
                let mut acc = if bias_active { *bias } else { 0.0 };
                acc += beta1 * kern.eval(t0, 0, t, order) + beta2 * kern.eval(t0, 1, t, order);
                for (j, &tj) in points[1..].iter().enumerate() {
                    acc += alpha[j]
                        * (kern.eval(tj, 2, t, order)
                            + a1_vals[j] * kern.eval(tj, 1, t, order)
                            + a0_vals[j] * kern.eval(tj, 0, t, order));
                }
                acc
            }
            DualVariant::Nonlinear { points, alpha, eta, beta, bias, .. } => {
                let t0 = points[0];
                let mut acc = if bias_active { *bias } else { 0.0 };
                acc += beta * kern.eval(t0, 0, t, order);
                for (j, &tj) in points[1..].iter().enumerate() {
                    acc += alpha[j] * kern.eval(tj, 1, t, order)
                        + eta[j] * kern.eval(tj, 0, t, order);
                }
                acc
            }
            DualVariant::Poisson { .. } => unreachable!("1-D evaluation of the 2-D variant"),
        }
    }

    fn value_2d(&self, p: (f64, f64)) -> f64 {
        let DualVariant::Poisson { interior, boundary, alpha, beta, bias } = &self.variant else {
            unreachable!("2-D evaluation of a 1-D variant");
        };
        let kern = RbfKernel2d { sigma: self.kernel.sigma };
        let phi_p = [FeatureTerm2d::new(p, (0, 0), 1.0)];
        let mut acc = *bias;
        for (i, &q) in interior.iter().enumerate() {
            acc += alpha[i] * feature_inner_2d(&laplacian_features(q), &phi_p, &kern);
        }
        for (k, &q) in boundary.iter().enumerate() {
            acc += beta[k] * kern.eval(q, (0, 0), p, (0, 0));
        }
        acc
    }

    /// Analytic Laplacian of the 2-D dual model.
    pub fn laplacian(&self, x: f64, y: f64) -> Result<f64> {
        let DualVariant::Poisson { interior, boundary, alpha, beta, .. } = &self.variant else {
            return Err(Error::VariantMismatch("laplacian needs the 2-D variant".into()));
        };
        let kern = RbfKernel2d { sigma: self.kernel.sigma };
        let probe = laplacian_features((x, y));
        let mut acc = 0.0;
        for (i, &q) in interior.iter().enumerate() {
            acc += alpha[i] * feature_inner_2d(&laplacian_features(q), &probe, &kern);
        }
        for (k, &q) in boundary.iter().enumerate() {
            acc += beta[k]
                * feature_inner_2d(&[FeatureTerm2d::new(q, (0, 0), 1.0)], &probe, &kern);
        }
        Ok(acc)
    }
}

/// Free-function form of [`DualSolution::evaluate`].
pub fn evaluate_dual(sol: &DualSolution, point: Point) -> Result<f64> {
    sol.evaluate(point)
}

// ---------------------------------------------------------------------------
// Generic KKT assembly (kernel-pluggable, used directly by the oracle tests)

/// Assembles the first-order linear KKT system over unknowns
/// `[alpha_1..alpha_N, beta, b]`. `p_vals`/`r_vals` hold the equation
/// coefficients at `points[1..]`.
pub fn assemble_lssvm_first_order(
    points: &[f64],
    p_vals: &[f64],
    r_vals: &[f64],
    y0: f64,
    gamma: f64,
    kernel: &impl Kernel1d,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = points.len() - 1;
    let t0 = points[0];
    let dim = n + 2;
    let atoms: Vec<[FeatureTerm; 2]> = (0..n)
        .map(|i| {
            let t = points[i + 1];
            [FeatureTerm::new(t, 1, 1.0), FeatureTerm::new(t, 0, -p_vals[i])]
        })
        .collect();
    let phi0 = [FeatureTerm::new(t0, 0, 1.0)];
    let mut a = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = feature_inner(&atoms[i], &atoms[j], kernel);
        }
        a[(i, i)] += 1.0 / gamma;
        a[(i, n)] = feature_inner(&atoms[i], &phi0, kernel);
        a[(i, n + 1)] = -p_vals[i];
        rhs[i] = r_vals[i];
    }
    for j in 0..n {
        a[(n, j)] = feature_inner(&phi0, &atoms[j], kernel);
        a[(n + 1, j)] = p_vals[j];
    }
    a[(n, n)] = feature_inner(&phi0, &phi0, kernel);
    a[(n, n + 1)] = 1.0;
    rhs[n] = y0;
    a[(n + 1, n)] = -1.0;
    (a, rhs)
}

/// Assembles the second-order linear KKT system over unknowns
/// `[alpha_1..alpha_N, beta1, beta2, b]`: residual rows collocate
/// `y'' + a1 y' + a0 y = r`, and the two exact rows pin `y(t0)` and
/// `y'(t0)`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_lssvm_second_order(
    points: &[f64],
    a1_vals: &[f64],
    a0_vals: &[f64],
    r_vals: &[f64],
    y0: f64,
    ydot0: f64,
    gamma: f64,
    kernel: &impl Kernel1d,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = points.len() - 1;
    let t0 = points[0];
    let dim = n + 3;
    let atoms: Vec<[FeatureTerm; 3]> = (0..n)
        .map(|i| {
            let t = points[i + 1];
            [
                FeatureTerm::new(t, 2, 1.0),
                FeatureTerm::new(t, 1, a1_vals[i]),
                FeatureTerm::new(t, 0, a0_vals[i]),
            ]
        })
        .collect();
    let phi0 = [FeatureTerm::new(t0, 0, 1.0)];
    let dphi0 = [FeatureTerm::new(t0, 1, 1.0)];
    let mut a = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = feature_inner(&atoms[i], &atoms[j], kernel);
        }
        a[(i, i)] += 1.0 / gamma;
        a[(i, n)] = feature_inner(&atoms[i], &phi0, kernel);
        a[(i, n + 1)] = feature_inner(&atoms[i], &dphi0, kernel);
        a[(i, n + 2)] = a0_vals[i];
        rhs[i] = r_vals[i];
    }
    for j in 0..n {
        a[(n, j)] = feature_inner(&phi0, &atoms[j], kernel);
        a[(n + 1, j)] = feature_inner(&dphi0, &atoms[j], kernel);
        a[(n + 2, j)] = a0_vals[j];
    }
    a[(n, n)] = feature_inner(&phi0, &phi0, kernel);
    a[(n, n + 1)] = feature_inner(&phi0, &dphi0, kernel);
    a[(n, n + 2)] = 1.0;
    rhs[n] = y0;
    a[(n + 1, n)] = feature_inner(&dphi0, &phi0, kernel);
    a[(n + 1, n + 1)] = feature_inner(&dphi0, &dphi0, kernel);
    rhs[n + 1] = ydot0;
    a[(n + 2, n)] = 1.0;
    (a, rhs)
}

/// Laplacian feature combination `(phi_xx + phi_yy)(p)`.
fn laplacian_features(p: (f64, f64)) -> [FeatureTerm2d; 2] {
    [FeatureTerm2d::new(p, (2, 0), 1.0), FeatureTerm2d::new(p, (0, 2), 1.0)]
}

/// Assembles the Poisson KKT system over `[alpha (interior), beta
/// (boundary), b]`: Laplacian rows carry regularized residuals, boundary
/// rows are exact.
pub fn assemble_lssvm_poisson(
    interior: &[(f64, f64)],
    boundary: &[(f64, f64)],
    f_vals: &[f64],
    c_vals: &[f64],
    gamma: f64,
    kernel: &impl Kernel2d,
) -> (DMatrix<f64>, DVector<f64>) {
    let ni = interior.len();
    let nb = boundary.len();
    let dim = ni + nb + 1;
    let mut a = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    let lap: Vec<[FeatureTerm2d; 2]> = interior.iter().map(|&p| laplacian_features(p)).collect();
    let phi: Vec<[FeatureTerm2d; 1]> =
        boundary.iter().map(|&q| [FeatureTerm2d::new(q, (0, 0), 1.0)]).collect();
    for i in 0..ni {
        for j in 0..ni {
            a[(i, j)] = feature_inner_2d(&lap[i], &lap[j], kernel);
        }
        a[(i, i)] += 1.0 / gamma;
        for k in 0..nb {
            a[(i, ni + k)] = feature_inner_2d(&lap[i], &phi[k], kernel);
        }
        rhs[i] = f_vals[i];
    }
    for k in 0..nb {
        for j in 0..ni {
            a[(ni + k, j)] = feature_inner_2d(&phi[k], &lap[j], kernel);
        }
        for l in 0..nb {
            a[(ni + k, ni + l)] = feature_inner_2d(&phi[k], &phi[l], kernel);
        }
        a[(ni + k, ni + nb)] = 1.0;
        rhs[ni + k] = c_vals[k];
        a[(ni + nb, ni + k)] = 1.0;
    }
    (a, rhs)
}

// ---------------------------------------------------------------------------
// Linear ODE solver

/// Solves a linear first- or second-order initial value problem in dual
/// form on a uniform grid of `n` sub-intervals.
pub fn solve_linear_ode_lssvm(
    problem: &BenchmarkProblem,
    n: usize,
    cfg: KernelConfig,
) -> Result<(DualSolution, ErrorReport)> {
    let (t0, tf) = problem.interval()?;
    let kern = RbfKernel { sigma: cfg.sigma };
    let started = Instant::now();
    let points = uniform_points(n, t0, tf)?;
    let residual_pts = &points[1..];
    let (variant, a) = match problem.kind {
        ProblemKind::LinearFirstOrder { p, r, y0 } => {
            let p_vals: Vec<f64> = residual_pts.iter().map(|&t| p(t)).collect();
            let r_vals: Vec<f64> = residual_pts.iter().map(|&t| r(t)).collect();
            let (a, rhs) = assemble_lssvm_first_order(&points, &p_vals, &r_vals, y0, cfg.gamma, &kern);
            let z = solve_kkt(&a, &rhs, false).map_err(|e| attach_condition(e, &a))?;
            let alpha = z.rows(0, n).clone_owned();
            let variant = DualVariant::LinearFirstOrder {
                points: points.clone(),
                p_vals,
                alpha,
                beta: z[n],
                bias: z[n + 1],
            };
            (variant, a)
        }
        ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 } => {
            let a1_vals: Vec<f64> = residual_pts.iter().map(|&t| damping(t)).collect();
            let a0_vals: Vec<f64> = residual_pts.iter().map(|&t| stiffness(t)).collect();
            let r_vals: Vec<f64> = residual_pts.iter().map(|&t| r(t)).collect();
            let (a, rhs) = assemble_lssvm_second_order(
                &points, &a1_vals, &a0_vals, &r_vals, y0, ydot0, cfg.gamma, &kern,
            );
            let z = solve_kkt(&a, &rhs, true).map_err(|e| attach_condition(e, &a))?;
            let alpha = z.rows(0, n).clone_owned();
            let variant = DualVariant::LinearSecondOrder {
                points: points.clone(),
                a1_vals,
                a0_vals,
                alpha,
                beta1: z[n],
                beta2: z[n + 1],
                bias: z[n + 2],
            };
            (variant, a)
        }
        _ => return Err(Error::invalid("solve_linear_ode_lssvm expects a linear ODE problem")),
    };
    let train_time = started.elapsed().as_secs_f64();
    let solution = DualSolution {
        kernel: cfg,
        condition_estimate: condition_estimate(&a),
        newton: None,
        variant,
    };
    let report = ode_report(problem, &solution, n, cfg, train_time, true)?;
    Ok((solution, report))
}

// ---------------------------------------------------------------------------
// Nonlinear ODE solver

/// Solves `y' = f(t, y)` through the 3N+2 stationarity system in
/// `(alpha, eta, y_nodes, beta, b)`, all kernel blocks precomputed, with a
/// multivariate Newton iteration stopped on the step norm.
pub fn solve_nonlinear_ode_lssvm(
    problem: &BenchmarkProblem,
    n: usize,
    cfg: KernelConfig,
) -> Result<(DualSolution, ErrorReport)> {
    let ProblemKind::NonlinearFirstOrder { f, f_y, y0 } = problem.kind else {
        return Err(Error::invalid(
            "solve_nonlinear_ode_lssvm expects a nonlinear first-order problem",
        ));
    };
    let (t0, tf) = problem.interval()?;
    let kern = RbfKernel { sigma: cfg.sigma };
    let started = Instant::now();
    let points = uniform_points(n, t0, tf)?;
    let ts = &points[1..];
    let gamma = cfg.gamma;

    // Constant kernel blocks over the residual points.
    let k = DMatrix::from_fn(n, n, |i, j| kern.eval(ts[i], 0, ts[j], 0));
    let k11 = DMatrix::from_fn(n, n, |i, j| kern.eval(ts[i], 1, ts[j], 1));
    // k1[(i, j)] = phi'(t_j)^T phi(t_i)
    let k1 = DMatrix::from_fn(n, n, |i, j| kern.eval(ts[j], 1, ts[i], 0));
    let k0_col: DVector<f64> = DVector::from_fn(n, |i, _| kern.eval(ts[i], 0, t0, 0));
    // phi'(t_i)^T phi(t_0) and phi(t_0)' cross terms
    let k1_t0: DVector<f64> = DVector::from_fn(n, |i, _| kern.eval(ts[i], 1, t0, 0));

    // Unknowns z = [alpha, eta, y, beta, b].
    let dim = 3 * n + 2;
    let idx_beta = 3 * n;
    let idx_b = 3 * n + 1;
    let residual = |z: &DVector<f64>| -> DVector<f64> {
        let alpha = z.rows(0, n);
        let eta = z.rows(n, n);
        let y = z.rows(2 * n, n);
        let (beta, b) = (z[idx_beta], z[idx_b]);
        let mut out = DVector::zeros(dim);
        for i in 0..n {
            let mut r1 = alpha[i] / gamma - f(ts[i], y[i]);
            let mut r2 = b - y[i];
            for j in 0..n {
                r1 += k11[(i, j)] * alpha[j] + kern.eval(ts[i], 1, ts[j], 0) * eta[j];
                r2 += k1[(i, j)] * alpha[j] + k[(i, j)] * eta[j];
            }
            r1 += kern.eval(ts[i], 1, t0, 0) * beta;
            r2 += k0_col[i] * beta;
            out[i] = r1;
            out[n + i] = r2;
            out[2 * n + i] = alpha[i] * f_y(ts[i], y[i]) + eta[i];
        }
        let mut r4 = kern.eval(t0, 0, t0, 0) * beta + b - y0;
        let mut r5 = beta;
        for j in 0..n {
            r4 += k1_t0[j] * alpha[j] + k0_col[j] * eta[j];
            r5 += eta[j];
        }
        out[idx_beta] = r4;
        out[idx_b] = r5;
        out
    };

    // Jacobian base: everything except the f-dependent entries.
    let mut jac_base = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            jac_base[(i, j)] = k11[(i, j)];
            jac_base[(i, n + j)] = kern.eval(ts[i], 1, ts[j], 0);
            jac_base[(n + i, j)] = k1[(i, j)];
            jac_base[(n + i, n + j)] = k[(i, j)];
        }
        jac_base[(i, i)] += 1.0 / gamma;
        jac_base[(i, idx_beta)] = kern.eval(ts[i], 1, t0, 0);
        jac_base[(n + i, idx_beta)] = k0_col[i];
        jac_base[(n + i, 2 * n + i)] = -1.0;
        jac_base[(n + i, idx_b)] = 1.0;
        jac_base[(2 * n + i, n + i)] = 1.0;
        jac_base[(idx_beta, i)] = k1_t0[i];
        jac_base[(idx_beta, n + i)] = k0_col[i];
        jac_base[(idx_b, n + i)] = 1.0;
    }
    jac_base[(idx_beta, idx_beta)] = kern.eval(t0, 0, t0, 0);
    jac_base[(idx_beta, idx_b)] = 1.0;
    jac_base[(idx_b, idx_beta)] = 1.0;

    // Initial iterate: improved-Euler node values, everything else zero
    // except b = y0.
    let mut z = DVector::zeros(dim);
    let trajectory = heun_trajectory(f, &points, y0);
    for i in 0..n {
        z[2 * n + i] = trajectory[i + 1];
    }
    z[idx_b] = y0;

    // Newton on the square system, keeping the iterate with the smallest
    // stationarity residual. The step-norm rule is the primary stop; runs
    // that bottom out at the conditioning floor still count as converged
    // when the stationarity residual meets the solved-system bound.
    let mut newton = ConvergenceReport { iterations: 0, final_residual_norm: 0.0, converged: false };
    let mut last_jac = jac_base.clone();
    let mut best = z.clone();
    let mut best_norm = f64::INFINITY;
    let mut stalled = 0;
    for iter in 1..=NONLINEAR_MAX_ITER {
        let res = residual(&z);
        let res_norm = res.norm();
        if res_norm.is_finite() && res_norm < best_norm {
            best.copy_from(&z);
            best_norm = res_norm;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 3 || !res_norm.is_finite() {
                break;
            }
        }
        let mut jac = jac_base.clone();
        for i in 0..n {
            let y = z[2 * n + i];
            let fy = f_y(ts[i], y);
            jac[(i, 2 * n + i)] = -fy;
            jac[(2 * n + i, i)] = fy;
            let h = 1e-6 * (1.0 + y.abs());
            let fyy = (f_y(ts[i], y + h) - f_y(ts[i], y - h)) / (2.0 * h);
            jac[(2 * n + i, 2 * n + i)] = z[i] * fyy;
        }
        let step = solve_full_piv(&jac, &res).map_err(|e| attach_condition(e, &jac))?;
        z -= &step;
        newton.iterations = iter;
        last_jac = jac;
        if !step.norm().is_finite() {
            break;
        }
        if step.norm() < NONLINEAR_STEP_TOL {
            newton.converged = true;
            break;
        }
    }
    let final_res = residual(&z).norm();
    if final_res.is_finite() && final_res < best_norm {
        best.copy_from(&z);
        best_norm = final_res;
    }
    let z = best;
    newton.final_residual_norm = best_norm;
    if !newton.converged {
        let rhs_scale = 1.0 + (0..n).map(|i| f(ts[i], z[2 * n + i]).abs()).fold(y0.abs(), f64::max);
        newton.converged = best_norm <= 1e-9 * rhs_scale;
    }
    let train_time = started.elapsed().as_secs_f64();

    let variant = DualVariant::Nonlinear {
        points: points.clone(),
        alpha: z.rows(0, n).clone_owned(),
        eta: z.rows(n, n).clone_owned(),
        y_nodes: z.rows(2 * n, n).clone_owned(),
        beta: z[idx_beta],
        bias: z[idx_b],
    };
    let solution = DualSolution {
        kernel: cfg,
        condition_estimate: condition_estimate(&last_jac),
        newton: Some(newton),
        variant,
    };
    let report = ode_report(problem, &solution, n, cfg, train_time, newton.converged)?;
    Ok((solution, report))
}

// ---------------------------------------------------------------------------
// Linear PDE solver

/// Interior and edge point sets of the Poisson training grid.
pub(crate) type GridSplit = (Vec<(f64, f64)>, Vec<(f64, f64)>);

/// Uniform tensor grid split into interior and edge points; the grid side
/// follows the same `ceil(sqrt(n)) + 2` rule as the other solvers.
pub(crate) fn poisson_grids(domain: &Domain, n_domain: usize) -> Result<GridSplit> {
    let Domain::Rectangle { x0, x1, y0, y1 } = *domain else {
        return Err(Error::invalid("Poisson solver expects a rectangle domain"));
    };
    let side = pde_grid_side(n_domain);
    let xs = linspace(x0, x1, side);
    let ys = linspace(y0, y1, side);
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if i == 0 || i == side - 1 || j == 0 || j == side - 1 {
                boundary.push((x, y));
            } else {
                interior.push((x, y));
            }
        }
    }
    Ok((interior, boundary))
}

/// Dirichlet data at an edge point, read from the matching boundary curve.
pub(crate) fn boundary_value(curves: &[BoundaryCurve; 4], (x, y): (f64, f64)) -> f64 {
    if y == 0.0 {
        (curves[0].value)(x)
    } else if x == 0.0 {
        (curves[1].value)(y)
    } else if y == 1.0 {
        (curves[2].value)(x)
    } else {
        (curves[3].value)(y)
    }
}

/// Solves the Poisson problem in dual form: regularized Laplacian
/// residuals at the interior points, exact model values at the edge
/// points.
pub fn solve_linear_pde_lssvm(
    problem: &BenchmarkProblem,
    n_domain: usize,
    cfg: KernelConfig,
) -> Result<(DualSolution, ErrorReport)> {
    let ProblemKind::LinearPoisson2d { f, boundaries } = problem.kind else {
        return Err(Error::invalid("solve_linear_pde_lssvm expects a 2-D Poisson problem"));
    };
    let started = Instant::now();
    let (interior, boundary) = poisson_grids(&problem.domain, n_domain)?;
    let f_vals: Vec<f64> = interior.iter().map(|&(x, y)| f(x, y)).collect();
    let c_vals: Vec<f64> = boundary.iter().map(|&q| boundary_value(&boundaries, q)).collect();
    let kern = RbfKernel2d { sigma: cfg.sigma };
    let (a, rhs) = assemble_lssvm_poisson(&interior, &boundary, &f_vals, &c_vals, cfg.gamma, &kern);
    let z = solve_kkt(&a, &rhs, true).map_err(|e| attach_condition(e, &a))?;
    let ni = interior.len();
    let nb = boundary.len();
    let variant = DualVariant::Poisson {
        interior: interior.clone(),
        boundary,
        alpha: z.rows(0, ni).clone_owned(),
        beta: z.rows(ni, nb).clone_owned(),
        bias: z[ni + nb],
    };
    let train_time = started.elapsed().as_secs_f64();
    let solution = DualSolution {
        kernel: cfg,
        condition_estimate: condition_estimate(&a),
        newton: None,
        variant,
    };
    let report = pde_report(problem, &solution, &interior, n_domain, cfg, train_time)?;
    Ok((solution, report))
}

// ---------------------------------------------------------------------------
// Reports

fn attach_condition(err: Error, a: &DMatrix<f64>) -> Error {
    match err {
        Error::Numeric { msg, .. } => Error::numeric_cond(msg, condition_estimate(a)),
        other => other,
    }
}

fn ode_report(
    problem: &BenchmarkProblem,
    solution: &DualSolution,
    n: usize,
    cfg: KernelConfig,
    train_time: f64,
    converged: bool,
) -> Result<ErrorReport> {
    let (t0, tf) = problem.interval()?;
    let analytic = problem.analytic_1d_unchecked();
    let train_pts = solution.train_points().expect("1-D solution");
    let train_true: Vec<f64> = train_pts.iter().map(|&t| analytic(t)).collect();
    let train_hat: Vec<f64> =
        train_pts.iter().map(|&t| solution.evaluate(Point::OneD(t)).unwrap()).collect();
    let test_pts = linspace(t0, tf, DEFAULT_TEST_POINTS_1D);
    let test_true: Vec<f64> = test_pts.iter().map(|&t| analytic(t)).collect();
    let test_hat: Vec<f64> =
        test_pts.iter().map(|&t| solution.evaluate(Point::OneD(t)).unwrap()).collect();
    ErrorReport::from_values(
        problem.id,
        Method::Lssvm,
        n,
        train_time,
        &train_true,
        &train_hat,
        &test_true,
        &test_hat,
        Hyperparameters::Kernel { sigma: cfg.sigma, gamma: cfg.gamma },
        converged,
        Some(solution.condition_estimate),
    )
}

fn pde_report(
    problem: &BenchmarkProblem,
    solution: &DualSolution,
    interior: &[(f64, f64)],
    n_domain: usize,
    cfg: KernelConfig,
    train_time: f64,
) -> Result<ErrorReport> {
    let Domain::Rectangle { x0, x1, y0, y1 } = problem.domain else {
        return Err(Error::invalid("expected rectangle domain"));
    };
    let analytic = problem.analytic_2d_unchecked();
    let train_true: Vec<f64> = interior.iter().map(|&(x, y)| analytic(x, y)).collect();
    let train_hat: Vec<f64> =
        interior.iter().map(|&(x, y)| solution.evaluate(Point::TwoD(x, y)).unwrap()).collect();
    let xs = linspace(x0, x1, DEFAULT_TEST_SIDE_2D);
    let ys = linspace(y0, y1, DEFAULT_TEST_SIDE_2D);
    let mut test_true = Vec::with_capacity(xs.len() * ys.len());
    let mut test_hat = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            test_true.push(analytic(x, y));
            test_hat.push(solution.evaluate(Point::TwoD(x, y)).unwrap());
        }
    }
    ErrorReport::from_values(
        problem.id,
        Method::Lssvm,
        n_domain,
        train_time,
        &train_true,
        &train_hat,
        &test_true,
        &test_hat,
        Hyperparameters::Kernel { sigma: cfg.sigma, gamma: cfg.gamma },
        true,
        Some(solution.condition_estimate),
    )
}
