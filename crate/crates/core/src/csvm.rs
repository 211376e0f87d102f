//! Constrained kernel-collocation solvers: the support-vector model used
//! as the free function of a constrained expression.
//!
//! Embedding the kernel model in the constrained expression removes the
//! data equations from the optimization entirely; only regularized
//! residual constraints remain, so the dual systems are square in the
//! residual multipliers `alpha` alone and every initial or boundary value
//! holds as an algebraic identity, independent of bandwidth,
//! regularization, or convergence state.
//!
//! For the first-order problem, eliminating `(w, e)` from
//!
//! ```text
//! min (w^T w + gamma e^T e)/2
//! s.t. w^T phi'(t_i) - p_i (w^T [phi(t_i) - phi(t_0)] + y0) - r_i - e_i = 0
//! ```
//!
//! gives the linear system `sum_j M_ij alpha_j = r_i + p_i y0` with
//!
//! ```text
//! M_ij  = K11(t_i,t_j) - p_j [K1(t_i,t_j) - K1(t_i,t_0)] - p_i Ky(i,j)
//!         + delta_ij / gamma
//! K4(t_i,t_j) = K(t_i,t_j) - K(t_j,t_0) - K(t_i,t_0) + 1
//! Ky(t_i,t_j) = K1(t_j,t_i) - K1(t_j,t_0) - p_j K4(t_i,t_j)
//! ```
//!
//! and the model `y(t) = sum_j alpha_j Ky(t, t_j) + y0` anywhere in the
//! domain. Higher-order and 2-D variants assemble the same elimination
//! through formal feature combinations; the nonlinear variant solves the
//! 3N system in `(alpha, eta, y_nodes)` by Newton iteration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{linspace, uniform_points};
use crate::heun::heun_trajectory;
use crate::kernel::{
    feature_inner, feature_inner_2d, FeatureTerm, FeatureTerm2d, Kernel1d, Kernel2d,
    KernelConfig,
    RbfKernel, RbfKernel2d,
};
use crate::linalg::{condition_estimate, solve_full_piv, solve_kkt};
use crate::newton::ConvergenceReport;
use crate::problems::{BenchmarkProblem, Domain, Point, ProblemKind};
use crate::report::{
    ErrorReport, Hyperparameters, Method, DEFAULT_TEST_POINTS_1D, DEFAULT_TEST_SIDE_2D,
};
use crate::svm::{NONLINEAR_MAX_ITER, NONLINEAR_STEP_TOL};
use crate::tfc::{build_dirichlet_expression, DirichletExpression};

// ---------------------------------------------------------------------------
// Linear first-order system

/// Assembled first-order system with its cached helper kernels.
#[derive(Debug, Clone)]
pub struct CsvmLinearSystem {
    pub m: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub k4: DMatrix<f64>,
    pub ky: DMatrix<f64>,
}

/// Builds the first-order coefficient matrix from the kernel blocks.
/// `points` includes `t0`; `p_vals`/`r_vals` are taken at `points[1..]`.
pub fn assemble_csvm_first_order(
    points: &[f64],
    p_vals: &[f64],
    r_vals: &[f64],
    y0: f64,
    gamma: f64,
    kernel: &impl Kernel1d,
) -> CsvmLinearSystem {
    let n = points.len() - 1;
    let t0 = points[0];
    let ts = &points[1..];
    // K(t0, t0) is exactly 1 for the RBF kernel; kept general so a feature
    // map substituted in tests eliminates to the same structure.
    let k00 = kernel.eval(t0, 0, t0, 0);
    let k4 = DMatrix::from_fn(n, n, |i, j| {
        kernel.eval(ts[i], 0, ts[j], 0)
            - kernel.eval(ts[j], 0, t0, 0)
            - kernel.eval(ts[i], 0, t0, 0)
            + k00
    });
    let ky = DMatrix::from_fn(n, n, |i, j| {
        kernel.eval(ts[j], 1, ts[i], 0) - kernel.eval(ts[j], 1, t0, 0) - p_vals[j] * k4[(i, j)]
    });
    let mut m = DMatrix::from_fn(n, n, |i, j| {
        kernel.eval(ts[i], 1, ts[j], 1)
            - p_vals[j] * (kernel.eval(ts[i], 1, ts[j], 0) - kernel.eval(ts[i], 1, t0, 0))
            - p_vals[i] * ky[(i, j)]
    });
    for i in 0..n {
        m[(i, i)] += 1.0 / gamma;
    }
    let rhs = DVector::from_fn(n, |i, _| r_vals[i] + p_vals[i] * y0);
    CsvmLinearSystem { m, rhs, k4, ky }
}

/// Second-order system: Gram matrix of the constrained-expression
/// residual combinations plus the regularization diagonal.
#[allow(clippy::too_many_arguments)]
pub fn assemble_csvm_second_order(
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
    let ts = &points[1..];
    let zetas: Vec<[FeatureTerm; 5]> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| second_order_features(t, t0, a1_vals[i], a0_vals[i]))
        .collect();
    let mut m = DMatrix::from_fn(n, n, |i, j| feature_inner(&zetas[i], &zetas[j], kernel));
    for i in 0..n {
        m[(i, i)] += 1.0 / gamma;
    }
    let rhs = DVector::from_fn(n, |i, _| {
        let tau = ts[i] - t0;
        r_vals[i] - a1_vals[i] * ydot0 - a0_vals[i] * (y0 + tau * ydot0)
    });
    (m, rhs)
}

/// Poisson system over the interior residual multipliers alone:
/// `rhs_i = f_i - interp_lap_i`, where `interp_lap` carries the boundary
/// interpolant's Laplacian at each interior point.
pub fn assemble_csvm_poisson(
    interior: &[(f64, f64)],
    f_vals: &[f64],
    interp_lap: &[f64],
    gamma: f64,
    kernel: &impl Kernel2d,
) -> (DMatrix<f64>, DVector<f64>) {
    let ni = interior.len();
    let lap: Vec<[FeatureTerm2d; 6]> =
        interior.iter().map(|&q| corrected_laplacian_features(q)).collect();
    let mut a = DMatrix::from_fn(ni, ni, |i, j| feature_inner_2d(&lap[i], &lap[j], kernel));
    for i in 0..ni {
        a[(i, i)] += 1.0 / gamma;
    }
    let rhs = DVector::from_fn(ni, |i, _| f_vals[i] - interp_lap[i]);
    (a, rhs)
}

// ---------------------------------------------------------------------------
// Solution type

#[derive(Debug, Clone)]
enum CsvmVariant {
    LinearFirstOrder {
        points: Vec<f64>,
        p_vals: Vec<f64>,
        alpha: DVector<f64>,
        y0: f64,
    },
    LinearSecondOrder {
        points: Vec<f64>,
        a1_vals: Vec<f64>,
        a0_vals: Vec<f64>,
        alpha: DVector<f64>,
        y0: f64,
        ydot0: f64,
    },
    Nonlinear {
        points: Vec<f64>,
        alpha: DVector<f64>,
        eta: DVector<f64>,
        y_nodes: DVector<f64>,
        y0: f64,
    },
    Poisson {
        interior: Vec<(f64, f64)>,
        expr: DirichletExpression,
        alpha: DVector<f64>,
    },
}

/// Dual variables of a solved constrained system. Evaluation uses the dual
/// form matching the solver variant; constraints hold identically.
#[derive(Debug, Clone)]
pub struct CsvmDualSolution {
    pub kernel: KernelConfig,
    pub condition_estimate: f64,
    /// Newton report for the nonlinear variant.
    pub newton: Option<ConvergenceReport>,
    variant: CsvmVariant,
}

impl CsvmDualSolution {
    pub fn alpha(&self) -> &DVector<f64> {
        match &self.variant {
            CsvmVariant::LinearFirstOrder { alpha, .. }
            | CsvmVariant::LinearSecondOrder { alpha, .. }
            | CsvmVariant::Nonlinear { alpha, .. }
            | CsvmVariant::Poisson { alpha, .. } => alpha,
        }
    }

    pub fn eta(&self) -> Option<&DVector<f64>> {
        match &self.variant {
            CsvmVariant::Nonlinear { eta, .. } => Some(eta),
            _ => None,
        }
    }

    pub fn y_nodes(&self) -> Option<&DVector<f64>> {
        match &self.variant {
            CsvmVariant::Nonlinear { y_nodes, .. } => Some(y_nodes),
            _ => None,
        }
    }

    /// Training points of a 1-D solve (full grid including `t0`).
    pub fn train_points(&self) -> Option<&[f64]> {
        match &self.variant {
            CsvmVariant::LinearFirstOrder { points, .. }
            | CsvmVariant::LinearSecondOrder { points, .. }
            | CsvmVariant::Nonlinear { points, .. } => Some(points),
            CsvmVariant::Poisson { .. } => None,
        }
    }

    /// Dual-form model value at a point.
    pub fn evaluate(&self, point: Point) -> Result<f64> {
        match (&self.variant, point) {
            (CsvmVariant::Poisson { .. }, Point::TwoD(x, y)) => Ok(self.value_2d((x, y))),
            (CsvmVariant::Poisson { .. }, Point::OneD(_)) => Err(Error::VariantMismatch(
                "1-D point passed to the 2-D variant".into(),
            )),
            (_, Point::OneD(t)) => Ok(self.value_1d(t, 0)),
            (_, Point::TwoD(..)) => Err(Error::VariantMismatch(
                "2-D point passed to a 1-D variant".into(),
            )),
        }
    }

    /// t-derivative of a 1-D dual model, `order <= 2`.
    pub fn derivative(&self, t: f64, order: usize) -> Result<f64> {
        if order > 2 {
            return Err(Error::UnsupportedOrder { order, max: 2 });
        }
        match &self.variant {
            CsvmVariant::Poisson { .. } => Err(Error::VariantMismatch(
                "1-D derivative requested from the 2-D variant".into(),
            )),
            _ => Ok(self.value_1d(t, order)),
        }
    }

    fn value_1d(&self, t: f64, order: usize) -> f64 {
        let kern = RbfKernel { sigma: self.kernel.sigma };
        match &self.variant {
            CsvmVariant::LinearFirstOrder { points, p_vals, alpha, y0 } => {
                let t0 = points[0];
                let mut acc = 0.0;
                for (j, &tj) in points[1..].iter().enumerate() {
                    // Ky(t, t_j) and its t-derivatives; the subtracted
                    // anchor terms vanish identically at t0.
                    let k4 = kern.eval(t, order, tj, 0)
                        - if order == 0 { kern.eval(tj, 0, t0, 0) } else { 0.0 }
                        - kern.eval(t, order, t0, 0)
                        + if order == 0 { 1.0 } else { 0.0 };
                    let ky = kern.eval(tj, 1, t, order)
                        - if order == 0 { kern.eval(tj, 1, t0, 0) } else { 0.0 }
                        - p_vals[j] * k4;
                    acc += alpha[j] * ky;
                }
                acc + if order == 0 { *y0 } else { 0.0 }
            }
            CsvmVariant::LinearSecondOrder { points, a1_vals, a0_vals, alpha, y0, ydot0 } => {
                let t0 = points[0];
                let probe = probe_features(t, t0, order);
                let mut acc = 0.0;
                for (j, &tj) in points[1..].iter().enumerate() {
                    let zeta = second_order_features(tj, t0, a1_vals[j], a0_vals[j]);
                    acc += alpha[j] * feature_inner(&zeta, &probe, &kern);
                }
                acc + match order {
                    0 => y0 + (t - t0) * ydot0,
                    1 => *ydot0,
                    _ => 0.0,
                }
            }
            CsvmVariant::Nonlinear { points, alpha, eta, y0, .. } => {
                let t0 = points[0];
                let mut acc = 0.0;
                for (j, &tj) in points[1..].iter().enumerate() {
                    let k4 = kern.eval(t, order, tj, 0)
                        - if order == 0 { kern.eval(tj, 0, t0, 0) } else { 0.0 }
                        - kern.eval(t, order, t0, 0)
                        + if order == 0 { 1.0 } else { 0.0 };
                    acc += alpha[j] * (kern.eval(tj, 1, t, order) - if order == 0 { kern.eval(tj, 1, t0, 0) } else { 0.0 })
                        + eta[j] * k4;
                }
                acc + if order == 0 { *y0 } else { 0.0 }
            }
            CsvmVariant::Poisson { .. } => unreachable!("1-D evaluation of the 2-D variant"),
        }
    }

    fn value_2d(&self, p: (f64, f64)) -> f64 {
        let CsvmVariant::Poisson { interior, expr, alpha } = &self.variant else {
            unreachable!("2-D evaluation of a 1-D variant");
        };
        let kern = RbfKernel2d { sigma: self.kernel.sigma };
        let probe = corrected_phi_features(p);
        let mut acc = expr.interpolant(p.0, p.1);
        for (i, &q) in interior.iter().enumerate() {
            acc += alpha[i] * feature_inner_2d(&corrected_laplacian_features(q), &probe, &kern);
        }
        acc
    }

    /// Analytic Laplacian of the 2-D dual model.
    pub fn laplacian(&self, x: f64, y: f64) -> Result<f64> {
        let CsvmVariant::Poisson { interior, expr, alpha } = &self.variant else {
            return Err(Error::VariantMismatch("laplacian needs the 2-D variant".into()));
        };
        let kern = RbfKernel2d { sigma: self.kernel.sigma };
        let probe = corrected_laplacian_features((x, y));
        let mut acc = expr.interpolant_xx(x, y) + expr.interpolant_yy(x, y);
        for (i, &q) in interior.iter().enumerate() {
            acc += alpha[i] * feature_inner_2d(&corrected_laplacian_features(q), &probe, &kern);
        }
        Ok(acc)
    }
}

/// Free-function form of [`CsvmDualSolution::evaluate`].
pub fn evaluate_csvm(sol: &CsvmDualSolution, point: Point) -> Result<f64> {
    sol.evaluate(point)
}

// ---------------------------------------------------------------------------
// Feature combinations

/// `zeta_i`: the constrained expression of the second-order equation
/// applied to the feature map,
/// `phi''(t_i) + a1 [phi'(t_i) - phi'(t0)] + a0 chi(t_i)` with
/// `chi(t) = phi(t) - phi(t0) - (t - t0) phi'(t0)`.
fn second_order_features(t: f64, t0: f64, a1: f64, a0: f64) -> [FeatureTerm; 5] {
    [
        FeatureTerm::new(t, 2, 1.0),
        FeatureTerm::new(t, 1, a1),
        FeatureTerm::new(t, 0, a0),
        FeatureTerm::new(t0, 0, -a0),
        FeatureTerm::new(t0, 1, -(a1 + a0 * (t - t0))),
    ]
}

/// `order`-th derivative of `chi(t)` as a feature combination. The
/// `t0`-anchored terms cancel exactly at `t = t0` because they are
/// evaluated through the same kernel calls.
fn probe_features(t: f64, t0: f64, order: usize) -> Vec<FeatureTerm> {
    match order {
        0 => vec![
            FeatureTerm::new(t, 0, 1.0),
            FeatureTerm::new(t0, 0, -1.0),
            FeatureTerm::new(t0, 1, -(t - t0)),
        ],
        1 => vec![FeatureTerm::new(t, 1, 1.0), FeatureTerm::new(t0, 1, -1.0)],
        _ => vec![FeatureTerm::new(t, 2, 1.0)],
    }
}

/// Laplacian of the boundary-corrected feature map at a point: the free
/// function's own boundary interpolant is subtracted, so only four anchor
/// curves contribute to the second derivatives.
fn corrected_laplacian_features((x, y): (f64, f64)) -> [FeatureTerm2d; 6] {
    [
        FeatureTerm2d::new((x, y), (2, 0), 1.0),
        FeatureTerm2d::new((x, y), (0, 2), 1.0),
        FeatureTerm2d::new((x, 0.0), (2, 0), -(1.0 - y)),
        FeatureTerm2d::new((x, 1.0), (2, 0), -y),
        FeatureTerm2d::new((0.0, y), (0, 2), -(1.0 - x)),
        FeatureTerm2d::new((1.0, y), (0, 2), -x),
    ]
}

/// Boundary-corrected feature map `phi(p) - sum_k w_k phi(anchor_k)`.
/// Coincident anchors are merged by summed coefficient so that on a
/// boundary point every term cancels exactly and the expression value
/// reduces to the boundary interpolant alone.
fn corrected_phi_features(p: (f64, f64)) -> Vec<FeatureTerm2d> {
    let mut terms = vec![FeatureTerm2d::new(p, (0, 0), 1.0)];
    for ((ax, ay), w) in DirichletExpression::correction_weights(p.0, p.1) {
        terms.push(FeatureTerm2d::new((ax, ay), (0, 0), -w));
    }
    merge_feature_terms(terms)
}

fn merge_feature_terms(terms: Vec<FeatureTerm2d>) -> Vec<FeatureTerm2d> {
    let mut merged: Vec<FeatureTerm2d> = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(existing) = merged.iter_mut().find(|m| {
            m.deriv == t.deriv
                && m.point.0.to_bits() == t.point.0.to_bits()
                && m.point.1.to_bits() == t.point.1.to_bits()
        }) {
            existing.coeff += t.coeff;
        } else {
            merged.push(t);
        }
    }
    merged.retain(|t| t.coeff != 0.0);
    merged
}

// ---------------------------------------------------------------------------
// Linear ODE solver

/// Solves a linear first- or second-order initial value problem with the
/// constrained kernel model on a uniform grid of `n` sub-intervals.
pub fn solve_linear_ode_csvm(
    problem: &BenchmarkProblem,
    n: usize,
    cfg: KernelConfig,
) -> Result<(CsvmDualSolution, ErrorReport)> {
    let (t0, tf) = problem.interval()?;
    let kern = RbfKernel { sigma: cfg.sigma };
    let started = Instant::now();
    let points = uniform_points(n, t0, tf)?;
    let ts = &points[1..];
    let (variant, matrix) = match problem.kind {
        ProblemKind::LinearFirstOrder { p, r, y0 } => {
            let p_vals: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
            let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
            let system = assemble_csvm_first_order(&points, &p_vals, &r_vals, y0, cfg.gamma, &kern);
            let alpha = solve_kkt(&system.m, &system.rhs, true)
                .map_err(|e| attach_condition(e, &system.m))?;
            (
                CsvmVariant::LinearFirstOrder { points: points.clone(), p_vals, alpha, y0 },
                system.m,
            )
        }
        ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 } => {
            let a1_vals: Vec<f64> = ts.iter().map(|&t| damping(t)).collect();
            let a0_vals: Vec<f64> = ts.iter().map(|&t| stiffness(t)).collect();
            let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
            let (m, rhs) = assemble_csvm_second_order(
                &points, &a1_vals, &a0_vals, &r_vals, y0, ydot0, cfg.gamma, &kern,
            );
            let alpha = solve_kkt(&m, &rhs, true).map_err(|e| attach_condition(e, &m))?;
            (
                CsvmVariant::LinearSecondOrder {
                    points: points.clone(),
                    a1_vals,
                    a0_vals,
                    alpha,
                    y0,
                    ydot0,
                },
                m,
            )
        }
        _ => return Err(Error::invalid("solve_linear_ode_csvm expects a linear ODE problem")),
    };
    let train_time = started.elapsed().as_secs_f64();
    let solution = CsvmDualSolution {
        kernel: cfg,
        condition_estimate: condition_estimate(&matrix),
        newton: None,
        variant,
    };
    let report = ode_report(problem, &solution, n, cfg, train_time, true)?;
    Ok((solution, report))
}

// ---------------------------------------------------------------------------
// Nonlinear ODE solver

/// Solves `y' = f(t, y)` through the 3N constrained stationarity system in
/// `(alpha, eta, y_nodes)` by Newton iteration; the initial value holds
/// identically whatever the convergence state.
pub fn solve_nonlinear_ode_csvm(
    problem: &BenchmarkProblem,
    n: usize,
    cfg: KernelConfig,
) -> Result<(CsvmDualSolution, ErrorReport)> {
    let ProblemKind::NonlinearFirstOrder { f, f_y, y0 } = problem.kind else {
        return Err(Error::invalid(
            "solve_nonlinear_ode_csvm expects a nonlinear first-order problem",
        ));
    };
    let (t0, tf) = problem.interval()?;
    let kern = RbfKernel { sigma: cfg.sigma };
    let started = Instant::now();
    let points = uniform_points(n, t0, tf)?;
    let ts = &points[1..].to_vec();
    let gamma = cfg.gamma;

    let k11 = DMatrix::from_fn(n, n, |i, j| kern.eval(ts[i], 1, ts[j], 1));
    // shifted[(i, j)] = phi'(t_j)^T [phi(t_i) - phi(t_0)]
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        kern.eval(ts[j], 1, ts[i], 0) - kern.eval(ts[j], 1, t0, 0)
    });
    let k4 = DMatrix::from_fn(n, n, |i, j| {
        kern.eval(ts[i], 0, ts[j], 0) - kern.eval(ts[j], 0, t0, 0) - kern.eval(ts[i], 0, t0, 0)
            + 1.0
    });

    let dim = 3 * n;
    let residual = |z: &DVector<f64>| -> DVector<f64> {
        let alpha = z.rows(0, n);
        let eta = z.rows(n, n);
        let y = z.rows(2 * n, n);
        let mut out = DVector::zeros(dim);
        for i in 0..n {
            let mut r1 = alpha[i] / gamma - f(ts[i], y[i]);
            let mut r2 = y0 - y[i];
            for j in 0..n {
                // shifted is phi'(t_j)^T [phi(t_i) - phi(t_0)]; its
                // transpose entry gives [phi(t_j) - phi(t_0)]^T phi'(t_i).
                r1 += k11[(i, j)] * alpha[j] + shifted[(j, i)] * eta[j];
                r2 += shifted[(i, j)] * alpha[j] + k4[(i, j)] * eta[j];
            }
            out[i] = r1;
            out[n + i] = r2;
            out[2 * n + i] = alpha[i] * f_y(ts[i], y[i]) + eta[i];
        }
        out
    };

    let mut jac_base = DMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            jac_base[(i, j)] = k11[(i, j)];
            jac_base[(i, n + j)] = shifted[(j, i)];
            jac_base[(n + i, j)] = shifted[(i, j)];
            jac_base[(n + i, n + j)] = k4[(i, j)];
        }
        jac_base[(i, i)] += 1.0 / gamma;
        jac_base[(n + i, 2 * n + i)] = -1.0;
        jac_base[(2 * n + i, n + i)] = 1.0;
    }

    let mut z = DVector::zeros(dim);
    let trajectory = heun_trajectory(f, &points, y0);
    for i in 0..n {
        z[2 * n + i] = trajectory[i + 1];
    }

    let mut newton =
        ConvergenceReport { iterations: 0, final_residual_norm: 0.0, converged: false };
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

    let variant = CsvmVariant::Nonlinear {
        points: points.clone(),
        alpha: z.rows(0, n).clone_owned(),
        eta: z.rows(n, n).clone_owned(),
        y_nodes: z.rows(2 * n, n).clone_owned(),
        y0,
    };
    let solution = CsvmDualSolution {
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

/// Solves the Poisson problem with the boundary-corrected kernel model:
/// the system couples only the interior residual multipliers, every edge
/// being exact by construction.
pub fn solve_pde_csvm(
    problem: &BenchmarkProblem,
    n_domain: usize,
    cfg: KernelConfig,
) -> Result<(CsvmDualSolution, ErrorReport)> {
    let ProblemKind::LinearPoisson2d { f, boundaries } = problem.kind else {
        return Err(Error::invalid("solve_pde_csvm expects a 2-D Poisson problem"));
    };
    let started = Instant::now();
    let (interior, _) = crate::svm::poisson_grids(&problem.domain, n_domain)?;
    let expr =
        build_dirichlet_expression(boundaries[0], boundaries[1], boundaries[2], boundaries[3])?;
    let kern = RbfKernel2d { sigma: cfg.sigma };
    let f_vals: Vec<f64> = interior.iter().map(|&(x, y)| f(x, y)).collect();
    let interp_lap: Vec<f64> = interior
        .iter()
        .map(|&(x, y)| expr.interpolant_xx(x, y) + expr.interpolant_yy(x, y))
        .collect();
    let (a, rhs) = assemble_csvm_poisson(&interior, &f_vals, &interp_lap, cfg.gamma, &kern);
    let alpha = solve_kkt(&a, &rhs, true).map_err(|e| attach_condition(e, &a))?;
    let train_time = started.elapsed().as_secs_f64();
    let solution = CsvmDualSolution {
        kernel: cfg,
        condition_estimate: condition_estimate(&a),
        newton: None,
        variant: CsvmVariant::Poisson { interior: interior.clone(), expr, alpha },
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
    solution: &CsvmDualSolution,
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
        Method::Csvm,
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
    solution: &CsvmDualSolution,
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
        Method::Csvm,
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
