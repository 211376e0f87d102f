//! Constrained-expression solvers with a Chebyshev free function.
//!
//! A constrained expression embeds the initial or boundary data so that it
//! holds identically for *any* free function `g`. Substituting the
//! expression into the differential equation leaves an unconstrained
//! residual-minimization problem in the Chebyshev coefficients of `g`:
//! linear equations collapse to one least-squares solve, nonlinear ones to
//! a Gauss-Newton iteration seeded by an improved-Euler fit.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::{chebyshev_basis, chebyshev_row, BasisMatrix};
use crate::error::{Error, Result};
use crate::grid::{linspace, make_collocation_grid, CollocationGrid};
use crate::heun::heun_trajectory;
use crate::linalg::{effective_condition, solve_least_squares};
use crate::newton::{newton_solve, ConvergenceReport};
use crate::problems::{BenchmarkProblem, BoundaryCurve, Domain, Point, ProblemKind};
use crate::report::{
    ErrorReport, Hyperparameters, Method, DEFAULT_TEST_POINTS_1D, DEFAULT_TEST_SIDE_2D,
};

// ---------------------------------------------------------------------------
// Constrained expressions

/// Constrained expression for first- and second-order initial value
/// problems:
///
/// * first order:  `y(t) = g(t) + (y0 - g(t0))`
/// * second order: `y(t) = g(t) + (y0 - g(t0)) + (t - t0)(ydot0 - g'(t0))`
///
/// Both reproduce the initial data exactly for any free function `g`.
#[derive(Debug, Clone, Copy)]
pub struct IvpExpression {
    pub t0: f64,
    pub y0: f64,
    /// Present for the second-order form.
    pub ydot0: Option<f64>,
}

impl IvpExpression {
    /// Expression value from precomputed free-function data. `gdot_t0` is
    /// ignored by the first-order form.
    pub fn value_from(&self, t: f64, g_t: f64, g_t0: f64, gdot_t0: f64) -> f64 {
        match self.ydot0 {
            None => g_t + (self.y0 - g_t0),
            Some(yd) => g_t + (self.y0 - g_t0) + (t - self.t0) * (yd - gdot_t0),
        }
    }

    /// First t-derivative of the expression.
    pub fn deriv1_from(&self, gdot_t: f64, gdot_t0: f64) -> f64 {
        match self.ydot0 {
            None => gdot_t,
            Some(yd) => gdot_t + (yd - gdot_t0),
        }
    }

    /// Second t-derivative of the expression.
    pub fn deriv2_from(&self, gddot_t: f64) -> f64 {
        gddot_t
    }

    /// Convenience evaluation from free-function callables.
    pub fn value(&self, t: f64, g: &dyn Fn(f64) -> f64, gdot: &dyn Fn(f64) -> f64) -> f64 {
        self.value_from(t, g(t), g(self.t0), gdot(self.t0))
    }
}

/// Builds the initial-value constrained expression; a derivative
/// constraint is embedded when `ydot0` is given.
pub fn build_ivp_expression(t0: f64, y0: f64, ydot0: Option<f64>) -> IvpExpression {
    IvpExpression { t0, y0, ydot0 }
}

/// Constrained expression for a Dirichlet problem on the unit square.
///
/// With boundary data `c1(x) = z(x,0)`, `c2(y) = z(0,y)`, `c3(x) = z(x,1)`,
/// `c4(y) = z(1,y)`, the expression is the transfinite boundary
/// interpolant plus the free function corrected by its own boundary
/// interpolant:
///
/// ```text
/// z(x,y) = a(x,y) + g(x,y) - sum_k w_k(x,y) g(anchor_k)
/// ```
///
/// so every edge is reproduced exactly for any `g`, provided the corner
/// values are consistent.
#[derive(Debug, Clone, Copy)]
pub struct DirichletExpression {
    curves: [BoundaryCurve; 4],
    /// Largest corner mismatch found at construction.
    pub max_corner_defect: f64,
    /// True when the corner mismatch exceeds the 1e-12 consistency check
    /// (builds still succeed up to 1e-6).
    pub corner_warning: bool,
}

/// Bottom/left/top/right boundary curves in the argument order of the
/// benchmark problem definition.
pub fn build_dirichlet_expression(
    c1: BoundaryCurve,
    c2: BoundaryCurve,
    c3: BoundaryCurve,
    c4: BoundaryCurve,
) -> Result<DirichletExpression> {
    let defects = [
        (c1.value)(0.0) - (c2.value)(0.0),
        (c1.value)(1.0) - (c4.value)(0.0),
        (c3.value)(0.0) - (c2.value)(1.0),
        (c3.value)(1.0) - (c4.value)(1.0),
    ];
    let max_corner_defect = defects.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    if max_corner_defect > 1e-6 {
        return Err(Error::InvalidConstraints(format!(
            "boundary corners disagree by {max_corner_defect:.3e}"
        )));
    }
    Ok(DirichletExpression {
        curves: [c1, c2, c3, c4],
        max_corner_defect,
        corner_warning: max_corner_defect > 1e-12,
    })
}

impl DirichletExpression {
    /// The transfinite interpolant `a(x, y)` of the boundary data alone.
    pub fn interpolant(&self, x: f64, y: f64) -> f64 {
        let [c1, c2, c3, c4] = &self.curves;
        (1.0 - y) * (c1.value)(x)
            + y * (c3.value)(x)
            + (1.0 - x) * (c2.value)(y)
            + x * (c4.value)(y)
            - (1.0 - x) * (1.0 - y) * (c1.value)(0.0)
            - (1.0 - x) * y * (c3.value)(0.0)
            - x * (1.0 - y) * (c1.value)(1.0)
            - x * y * (c3.value)(1.0)
    }

    /// `d^2 a / dx^2`; only the bottom/top curves contribute.
    pub fn interpolant_xx(&self, x: f64, y: f64) -> f64 {
        let [c1, _, c3, _] = &self.curves;
        (1.0 - y) * (c1.second_deriv)(x) + y * (c3.second_deriv)(x)
    }

    /// `d^2 a / dy^2`; only the left/right curves contribute.
    pub fn interpolant_yy(&self, x: f64, y: f64) -> f64 {
        let [_, c2, _, c4] = &self.curves;
        (1.0 - x) * (c2.second_deriv)(y) + x * (c4.second_deriv)(y)
    }

    /// Anchor points and weights of the free-function boundary correction:
    /// the correction is `sum_k w_k * g(p_k)` over these eight entries.
    pub fn correction_weights(x: f64, y: f64) -> [((f64, f64), f64); 8] {
        [
            ((x, 0.0), 1.0 - y),
            ((x, 1.0), y),
            ((0.0, y), 1.0 - x),
            ((1.0, y), x),
            ((0.0, 0.0), -((1.0 - x) * (1.0 - y))),
            ((0.0, 1.0), -((1.0 - x) * y)),
            ((1.0, 0.0), -(x * (1.0 - y))),
            ((1.0, 1.0), -(x * y)),
        ]
    }

    /// Full expression value for an arbitrary free function.
    pub fn value(&self, x: f64, y: f64, g: &dyn Fn(f64, f64) -> f64) -> f64 {
        let mut v = self.interpolant(x, y) + g(x, y);
        for ((px, py), w) in Self::correction_weights(x, y) {
            v -= w * g(px, py);
        }
        v
    }

    /// `d^2 z / dx^2` from the free function's second x-derivative.
    pub fn d2x(&self, x: f64, y: f64, g_xx: &dyn Fn(f64, f64) -> f64) -> f64 {
        self.interpolant_xx(x, y) + g_xx(x, y) - (1.0 - y) * g_xx(x, 0.0) - y * g_xx(x, 1.0)
    }

    /// `d^2 z / dy^2` from the free function's second y-derivative.
    pub fn d2y(&self, x: f64, y: f64, g_yy: &dyn Fn(f64, f64) -> f64) -> f64 {
        self.interpolant_yy(x, y) + g_yy(x, y) - (1.0 - x) * g_yy(0.0, y) - x * g_yy(1.0, y)
    }
}

// ---------------------------------------------------------------------------
// Solutions

#[derive(Debug, Clone)]
enum TfcForm {
    FirstOrder { grid: CollocationGrid, expr: IvpExpression, g0: f64 },
    SecondOrder { grid: CollocationGrid, expr: IvpExpression, g0: f64, gdot0: f64 },
    Poisson { gx: CollocationGrid, gy: CollocationGrid, expr: DirichletExpression },
}

/// A solved constrained expression: coefficient vector plus the expression
/// it was solved under. Evaluable anywhere in the closed domain; the
/// embedded constraints hold by construction.
#[derive(Debug, Clone)]
pub struct TfcSolution {
    xi: DVector<f64>,
    m: usize,
    form: TfcForm,
    /// Norm of the collocated equation residual at the solution.
    pub residual_norm: f64,
    /// Newton convergence data for nonlinear solves.
    pub newton: Option<ConvergenceReport>,
}

impl TfcSolution {
    pub fn coefficients(&self) -> &DVector<f64> {
        &self.xi
    }

    pub fn basis_count(&self) -> usize {
        self.m
    }

    /// Value at a domain point; points outside the closed domain are
    /// rejected.
    pub fn evaluate(&self, point: Point) -> Result<f64> {
        match (&self.form, point) {
            (
                TfcForm::FirstOrder { grid, .. } | TfcForm::SecondOrder { grid, .. },
                Point::OneD(t),
            ) => {
                if !grid.contains(t) {
                    return Err(Error::DomainError(format!(
                        "t = {t} outside [{}, {}]",
                        grid.t0(),
                        grid.tf()
                    )));
                }
                Ok(self.value_1d(t))
            }
            (TfcForm::Poisson { gx, gy, .. }, Point::TwoD(x, y)) => {
                if !gx.contains(x) || !gy.contains(y) {
                    return Err(Error::DomainError(format!("({x}, {y}) outside the rectangle")));
                }
                Ok(self.value_2d(x, y))
            }
            _ => Err(Error::invalid("point dimensionality does not match the solution")),
        }
    }

    /// Value without the domain check (extrapolation explicitly allowed).
    pub fn evaluate_extrapolated(&self, point: Point) -> Result<f64> {
        match (&self.form, point) {
            (TfcForm::FirstOrder { .. } | TfcForm::SecondOrder { .. }, Point::OneD(t)) => {
                Ok(self.value_1d(t))
            }
            (TfcForm::Poisson { .. }, Point::TwoD(x, y)) => Ok(self.value_2d(x, y)),
            _ => Err(Error::invalid("point dimensionality does not match the solution")),
        }
    }

    /// t-derivative of a 1-D solution, `order <= 2`.
    pub fn derivative(&self, t: f64, order: usize) -> Result<f64> {
        if order == 0 {
            return self.evaluate(Point::OneD(t));
        }
        if order > 2 {
            return Err(Error::UnsupportedOrder { order, max: 2 });
        }
        match &self.form {
            TfcForm::FirstOrder { grid, expr, .. } | TfcForm::SecondOrder { grid, expr, .. } => {
                let c = grid.scale_c();
                let row = chebyshev_row(grid.map_to_x(t), self.m, order)?;
                let gk: f64 = c.powi(order as i32)
                    * row[order].iter().zip(self.xi.iter()).map(|(h, x)| h * x).sum::<f64>();
                let gdot0 = match &self.form {
                    TfcForm::SecondOrder { gdot0, .. } => *gdot0,
                    _ => 0.0,
                };
                Ok(match order {
                    1 => expr.deriv1_from(gk, gdot0),
                    _ => expr.deriv2_from(gk),
                })
            }
            TfcForm::Poisson { .. } => {
                Err(Error::invalid("1-D derivative requested from a 2-D solution"))
            }
        }
    }

    fn value_1d(&self, t: f64) -> f64 {
        let (grid, expr, g0) = match &self.form {
            TfcForm::FirstOrder { grid, expr, g0 } => (grid, expr, *g0),
            TfcForm::SecondOrder { grid, expr, g0, .. } => (grid, expr, *g0),
            TfcForm::Poisson { .. } => unreachable!("1-D evaluation of a 2-D solution"),
        };
        let row = chebyshev_row(grid.map_to_x(t), self.m, 0).expect("basis row");
        let g_t: f64 = row[0].iter().zip(self.xi.iter()).map(|(h, x)| h * x).sum();
        let gdot0 = match &self.form {
            TfcForm::SecondOrder { gdot0, .. } => *gdot0,
            _ => 0.0,
        };
        expr.value_from(t, g_t, g0, gdot0)
    }

    fn value_2d(&self, x: f64, y: f64) -> f64 {
        let (gx, gy, expr) = match &self.form {
            TfcForm::Poisson { gx, gy, expr } => (gx, gy, expr),
            _ => unreachable!("2-D evaluation of a 1-D solution"),
        };
        let g = |px: f64, py: f64| -> f64 {
            let rx = chebyshev_row(gx.map_to_x(px), self.m, 0).expect("basis row");
            let ry = chebyshev_row(gy.map_to_x(py), self.m, 0).expect("basis row");
            let mut acc = 0.0;
            for (a, &xa) in rx[0].iter().enumerate() {
                if xa == 0.0 {
                    continue;
                }
                for (b, &yb) in ry[0].iter().enumerate() {
                    acc += xa * yb * self.xi[a * self.m + b];
                }
            }
            acc
        };
        expr.value(x, y, &g)
    }
}

/// Free-function form of [`TfcSolution::evaluate`].
pub fn evaluate_tfc(sol: &TfcSolution, point: Point) -> Result<f64> {
    sol.evaluate(point)
}

// ---------------------------------------------------------------------------
// Linear ODE solve

/// Solves a linear first- or second-order initial value problem by
/// substituting the constrained expression into the equation at the
/// collocation points and taking the minimum-norm least-squares solution
/// over the free-function coefficients.
pub fn solve_linear_ode_tfc(
    problem: &BenchmarkProblem,
    n: usize,
    m: usize,
) -> Result<(TfcSolution, ErrorReport)> {
    let (t0, tf) = problem.interval()?;
    let started = Instant::now();
    let (solution, matrix) = match problem.kind {
        ProblemKind::LinearFirstOrder { p, r, y0 } => {
            if m < 2 {
                return Err(Error::invalid(
                    "first-order expression needs at least two basis functions",
                ));
            }
            let grid = make_collocation_grid(n, t0, tf)?;
            let basis = chebyshev_basis(&grid, m, 1)?;
            let (a, b) = assemble_linear_first_order(&grid, &basis, p, r, y0);
            let xi = solve_least_squares(&a, &b)?;
            let residual_norm = (&a * &xi - &b).norm();
            let g0: f64 = basis.values.row(0).transpose().dot(&xi);
            let expr = build_ivp_expression(t0, y0, None);
            (
                TfcSolution {
                    xi,
                    m,
                    form: TfcForm::FirstOrder { grid, expr, g0 },
                    residual_norm,
                    newton: None,
                },
                a,
            )
        }
        ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 } => {
            if m < 3 {
                return Err(Error::invalid(
                    "second-order expression needs at least three basis functions",
                ));
            }
            let grid = make_collocation_grid(n, t0, tf)?;
            let basis = chebyshev_basis(&grid, m, 2)?;
            let (a, b) =
                assemble_linear_second_order(&grid, &basis, damping, stiffness, r, y0, ydot0);
            let xi = solve_least_squares(&a, &b)?;
            let residual_norm = (&a * &xi - &b).norm();
            let c = grid.scale_c();
            let g0: f64 = basis.values.row(0).transpose().dot(&xi);
            let gdot0: f64 = c * basis.deriv(1).row(0).transpose().dot(&xi);
            let expr = build_ivp_expression(t0, y0, Some(ydot0));
            (
                TfcSolution {
                    xi,
                    m,
                    form: TfcForm::SecondOrder { grid, expr, g0, gdot0 },
                    residual_norm,
                    newton: None,
                },
                a,
            )
        }
        _ => return Err(Error::invalid("solve_linear_ode_tfc expects a linear ODE problem")),
    };
    let train_time = started.elapsed().as_secs_f64();
    let report = ode_report(
        problem,
        &solution,
        n,
        m,
        train_time,
        true,
        Some(effective_condition(&matrix)),
    )?;
    Ok((solution, report))
}

fn assemble_linear_first_order(
    grid: &CollocationGrid,
    basis: &BasisMatrix,
    p: fn(f64) -> f64,
    r: fn(f64) -> f64,
    y0: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n_pts = grid.t_points().len();
    let m = basis.values.ncols();
    let c = grid.scale_c();
    let h0 = basis.values.row(0).clone_owned();
    let mut a = DMatrix::zeros(n_pts, m);
    let mut b = DVector::zeros(n_pts);
    for (i, &t) in grid.t_points().iter().enumerate() {
        let pi = p(t);
        for j in 0..m {
            a[(i, j)] = c * basis.deriv(1)[(i, j)] - pi * (basis.values[(i, j)] - h0[j]);
        }
        b[i] = r(t) + pi * y0;
    }
    (a, b)
}

#[allow(clippy::too_many_arguments)]
fn assemble_linear_second_order(
    grid: &CollocationGrid,
    basis: &BasisMatrix,
    damping: fn(f64) -> f64,
    stiffness: fn(f64) -> f64,
    r: fn(f64) -> f64,
    y0: f64,
    ydot0: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n_pts = grid.t_points().len();
    let m = basis.values.ncols();
    let c = grid.scale_c();
    let t0 = grid.t0();
    let h0 = basis.values.row(0).clone_owned();
    let h0d = basis.deriv(1).row(0).clone_owned();
    let mut a = DMatrix::zeros(n_pts, m);
    let mut b = DVector::zeros(n_pts);
    for (i, &t) in grid.t_points().iter().enumerate() {
        let (a1, a0) = (damping(t), stiffness(t));
        let tau = t - t0;
        for j in 0..m {
            a[(i, j)] = c * c * basis.deriv(2)[(i, j)]
                + a1 * c * (basis.deriv(1)[(i, j)] - h0d[j])
                + a0 * (basis.values[(i, j)] - h0[j] - tau * c * h0d[j]);
        }
        b[i] = r(t) - a1 * ydot0 - a0 * (y0 + tau * ydot0);
    }
    (a, b)
}

// ---------------------------------------------------------------------------
// Nonlinear ODE solve

/// Solves `y' = f(t, y)` with the first-order constrained expression and a
/// Gauss-Newton iteration on the collocated residual. The initial
/// coefficients come from a least-squares fit of an improved-Euler
/// trajectory over the same grid (zero if that fit is not finite).
pub fn solve_nonlinear_ode_tfc(
    problem: &BenchmarkProblem,
    n: usize,
    m: usize,
) -> Result<(TfcSolution, ErrorReport)> {
    let ProblemKind::NonlinearFirstOrder { f, f_y, y0 } = problem.kind else {
        return Err(Error::invalid(
            "solve_nonlinear_ode_tfc expects a nonlinear first-order problem",
        ));
    };
    if m < 2 {
        return Err(Error::invalid("first-order expression needs at least two basis functions"));
    }
    let (t0, tf) = problem.interval()?;
    let started = Instant::now();
    let grid = make_collocation_grid(n, t0, tf)?;
    let basis = chebyshev_basis(&grid, m, 1)?;
    let n_pts = grid.t_points().len();
    let c = grid.scale_c();
    let h0 = basis.values.row(0).clone_owned();
    // Shifted value matrix: row i gives y_i - y0 in terms of xi.
    let shifted = {
        let mut s = basis.values.clone();
        for i in 0..n_pts {
            for j in 0..m {
                s[(i, j)] -= h0[j];
            }
        }
        s
    };
    let deriv = basis.deriv(1).map(|v| c * v);

    // Improved-Euler seed fitted through the same expression.
    let trajectory = heun_trajectory(f, grid.t_points(), y0);
    let target = DVector::from_iterator(n_pts, trajectory.iter().map(|y| y - y0));
    let xi0 = match solve_least_squares(&shifted, &target) {
        Ok(x) if x.iter().all(|v| v.is_finite()) => x,
        _ => DVector::zeros(m),
    };

    let t_points = grid.t_points().to_vec();
    let residual_fn = |xi: &DVector<f64>| -> DVector<f64> {
        let ydot = &deriv * xi;
        let yvals = &shifted * xi;
        DVector::from_iterator(n_pts, (0..n_pts).map(|i| ydot[i] - f(t_points[i], yvals[i] + y0)))
    };
    let jacobian_fn = |xi: &DVector<f64>| -> DMatrix<f64> {
        let yvals = &shifted * xi;
        let mut j = deriv.clone();
        for i in 0..n_pts {
            let fy = f_y(t_points[i], yvals[i] + y0);
            for k in 0..m {
                j[(i, k)] -= fy * shifted[(i, k)];
            }
        }
        j
    };
    let (xi, newton) = newton_solve(
        residual_fn,
        jacobian_fn,
        &xi0,
        crate::newton::DEFAULT_EPS,
        crate::newton::DEFAULT_MAX_ITER,
    )?;
    let train_time = started.elapsed().as_secs_f64();

    let g0: f64 = basis.values.row(0).transpose().dot(&xi);
    let expr = build_ivp_expression(t0, y0, None);
    let solution = TfcSolution {
        xi,
        m,
        form: TfcForm::FirstOrder { grid, expr, g0 },
        residual_norm: newton.final_residual_norm,
        newton: Some(newton),
    };
    let report = ode_report(problem, &solution, n, m, train_time, newton.converged, None)?;
    Ok((solution, report))
}

// ---------------------------------------------------------------------------
// Linear PDE solve

/// Side length of the square tensor grid for a requested interior point
/// count: `ceil(sqrt(n)) + 2` points per axis including the boundary rows.
pub fn pde_grid_side(n_interior: usize) -> usize {
    (n_interior as f64).sqrt().ceil() as usize + 2
}

/// Solves the Poisson problem with a product-Chebyshev free function in
/// the Dirichlet constrained expression. Only the equation residual is
/// collocated (the boundary is exact by construction, so no boundary rows
/// are added) and the coefficients are the minimum-norm least-squares
/// solution with rank truncation.
///
/// The residual grid oversamples the training grid whenever `m` exceeds
/// the training resolution: an `m x m` product basis leaves null
/// directions through a coarser tensor grid, and those would otherwise
/// pollute the solution between collocation points. Training metrics are
/// always measured on the training grid's interior points.
pub fn solve_linear_pde_tfc(
    problem: &BenchmarkProblem,
    n_interior: usize,
    m: usize,
) -> Result<(TfcSolution, ErrorReport)> {
    let ProblemKind::LinearPoisson2d { f, boundaries } = problem.kind else {
        return Err(Error::invalid("solve_linear_pde_tfc expects a 2-D Poisson problem"));
    };
    let Domain::Rectangle { x0, x1, y0: ry0, y1: ry1 } = problem.domain else {
        return Err(Error::invalid("2-D problem without a rectangle domain"));
    };
    if m < 2 {
        return Err(Error::invalid("product basis needs at least two polynomials per axis"));
    }
    let started = Instant::now();
    let train_side = pde_grid_side(n_interior);
    let side = train_side.max(m + 1);
    let gx = make_collocation_grid(side - 1, x0, x1)?;
    let gy = make_collocation_grid(side - 1, ry0, ry1)?;
    let expr =
        build_dirichlet_expression(boundaries[0], boundaries[1], boundaries[2], boundaries[3])?;

    let bx = chebyshev_basis(&gx, m, 2)?;
    let by = chebyshev_basis(&gy, m, 2)?;
    let cx = gx.scale_c();
    let cy = gy.scale_c();
    // The mapped boundary coordinates -1 and +1 are the first/last grid
    // rows of each axis basis.
    let last = side - 1;

    let rows = side * side;
    let mut a = DMatrix::zeros(rows, m * m);
    let mut b = DVector::zeros(rows);
    for ix in 0..side {
        let x = gx.t_points()[ix];
        let wx = (x - gx.t0()) / (gx.tf() - gx.t0());
        for iy in 0..side {
            let y = gy.t_points()[iy];
            let wy = (y - gy.t0()) / (gy.tf() - gy.t0());
            let row = ix * side + iy;
            for pa in 0..m {
                let hxx = bx.deriv(2)[(ix, pa)];
                let hx = bx.values[(ix, pa)];
                let hx_lo = bx.values[(0, pa)];
                let hx_hi = bx.values[(last, pa)];
                for pb in 0..m {
                    let hyy = by.deriv(2)[(iy, pb)];
                    let hy = by.values[(iy, pb)];
                    let hy_lo = by.values[(0, pb)];
                    let hy_hi = by.values[(last, pb)];
                    // x-part: z_xx correction anchors the bottom/top edges,
                    // weighted along y; y-part symmetrically.
                    let term_x = cx * cx * hxx * (hy - (1.0 - wy) * hy_lo - wy * hy_hi);
                    let term_y = cy * cy * hyy * (hx - (1.0 - wx) * hx_lo - wx * hx_hi);
                    a[(row, pa * m + pb)] = term_x + term_y;
                }
            }
            b[row] = f(x, y) - expr.interpolant_xx(x, y) - expr.interpolant_yy(x, y);
        }
    }

    let xi = solve_least_squares(&a, &b)?;
    let residual_norm = (&a * &xi - &b).norm();
    let train_time = started.elapsed().as_secs_f64();
    let condition = effective_condition(&a);

    let solution = TfcSolution {
        xi,
        m,
        form: TfcForm::Poisson { gx: gx.clone(), gy: gy.clone(), expr },
        residual_norm,
        newton: None,
    };

    let analytic = problem.analytic_2d_unchecked();
    let tgx = make_collocation_grid(train_side - 1, x0, x1)?;
    let tgy = make_collocation_grid(train_side - 1, ry0, ry1)?;
    let mut train_true = Vec::with_capacity(n_interior);
    let mut train_hat = Vec::with_capacity(n_interior);
    for ix in 1..train_side - 1 {
        for iy in 1..train_side - 1 {
            let (x, y) = (tgx.t_points()[ix], tgy.t_points()[iy]);
            train_true.push(analytic(x, y));
            train_hat.push(solution.value_2d(x, y));
        }
    }
    let (test_true, test_hat) = pde_test_values(&solution, analytic, x0, x1, ry0, ry1);
    let report = ErrorReport::from_values(
        problem.id,
        Method::Tfc,
        n_interior,
        train_time,
        &train_true,
        &train_hat,
        &test_true,
        &test_hat,
        Hyperparameters::BasisCount(m),
        true,
        Some(condition),
    )?;
    Ok((solution, report))
}

fn pde_test_values(
    solution: &TfcSolution,
    analytic: fn(f64, f64) -> f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> (Vec<f64>, Vec<f64>) {
    let xs = linspace(x0, x1, DEFAULT_TEST_SIDE_2D);
    let ys = linspace(y0, y1, DEFAULT_TEST_SIDE_2D);
    let mut t = Vec::with_capacity(xs.len() * ys.len());
    let mut h = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            t.push(analytic(x, y));
            h.push(solution.value_2d(x, y));
        }
    }
    (t, h)
}

// ---------------------------------------------------------------------------

fn ode_report(
    problem: &BenchmarkProblem,
    solution: &TfcSolution,
    n: usize,
    m: usize,
    train_time: f64,
    converged: bool,
    condition: Option<f64>,
) -> Result<ErrorReport> {
    let (t0, tf) = problem.interval()?;
    let analytic = problem.analytic_1d_unchecked();
    let grid = match &solution.form {
        TfcForm::FirstOrder { grid, .. } | TfcForm::SecondOrder { grid, .. } => grid,
        TfcForm::Poisson { .. } => unreachable!(),
    };
    let train_true: Vec<f64> = grid.t_points().iter().map(|&t| analytic(t)).collect();
    let train_hat: Vec<f64> = grid.t_points().iter().map(|&t| solution.value_1d(t)).collect();
    let test_pts = linspace(t0, tf, DEFAULT_TEST_POINTS_1D);
    let test_true: Vec<f64> = test_pts.iter().map(|&t| analytic(t)).collect();
    let test_hat: Vec<f64> = test_pts.iter().map(|&t| solution.value_1d(t)).collect();
    ErrorReport::from_values(
        problem.id,
        Method::Tfc,
        n,
        train_time,
        &train_true,
        &train_hat,
        &test_true,
        &test_hat,
        Hyperparameters::BasisCount(m),
        converged,
        condition,
    )
}
