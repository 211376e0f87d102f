//! The four benchmark problems, with their exact solutions and the
//! coefficient callables the solvers consume. Every catalog entry is
//! self-checked on construction: the stored analytic solution must satisfy
//! the differential equation and its constraints.

use crate::error::{Error, Result};
use crate::special::{bessel_j, gamma_fn};

/// Identifier of a benchmark problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    P4,
}

impl std::fmt::Display for ProblemId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProblemId::P1 => "P1",
            ProblemId::P2 => "P2",
            ProblemId::P3 => "P3",
            ProblemId::P4 => "P4",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ProblemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(ProblemId::P1),
            "P2" => Ok(ProblemId::P2),
            "P3" => Ok(ProblemId::P3),
            "P4" => Ok(ProblemId::P4),
            _ => Err(Error::invalid(format!("unknown problem id {s:?}"))),
        }
    }
}

/// Solution domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { t0: f64, tf: f64 },
    /// Axis-aligned unit-style rectangle `[x0, x1] x [y0, y1]`.
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl Domain {
    pub fn contains_1d(&self, t: f64) -> bool {
        match *self {
            Domain::Interval { t0, tf } => {
                let tol = 1e-12 * (1.0 + tf.abs().max(t0.abs()));
                t >= t0 - tol && t <= tf + tol
            }
            Domain::Rectangle { .. } => false,
        }
    }

    pub fn contains_2d(&self, x: f64, y: f64) -> bool {
        match *self {
            Domain::Interval { .. } => false,
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let tol = 1e-12;
                x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol
            }
        }
    }
}

/// A point of either domain kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    OneD(f64),
    TwoD(f64, f64),
}

/// One edge of the PDE rectangle: the boundary value as a function of the
/// free coordinate, together with its second derivative along the edge
/// (the constrained expressions need it analytically).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryCurve {
    pub value: fn(f64) -> f64,
    pub second_deriv: fn(f64) -> f64,
}

/// Differential equation family plus constraint data.
#[derive(Debug, Clone, Copy)]
pub enum ProblemKind {
    /// `y' = p(t) y + r(t)`, `y(t0) = y0`.
    LinearFirstOrder { p: fn(f64) -> f64, r: fn(f64) -> f64, y0: f64 },
    /// `y' = f(t, y)`, `y(t0) = y0`.
    NonlinearFirstOrder { f: fn(f64, f64) -> f64, f_y: fn(f64, f64) -> f64, y0: f64 },
    /// `y'' + damping(t) y' + stiffness(t) y = r(t)`, `y(t0) = y0`,
    /// `y'(t0) = ydot0`.
    LinearSecondOrder {
        damping: fn(f64) -> f64,
        stiffness: fn(f64) -> f64,
        r: fn(f64) -> f64,
        y0: f64,
        ydot0: f64,
    },
    /// `laplacian(z) = f(x, y)` with Dirichlet data on the four edges,
    /// ordered bottom `z(x,0)`, left `z(0,y)`, top `z(x,1)`, right `z(1,y)`.
    LinearPoisson2d { f: fn(f64, f64) -> f64, boundaries: [BoundaryCurve; 4] },
}

/// A benchmark problem with its analytic solution.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkProblem {
    pub id: ProblemId,
    pub domain: Domain,
    pub kind: ProblemKind,
    analytic_1d: Option<fn(f64) -> f64>,
    analytic_2d: Option<fn(f64, f64) -> f64>,
}

impl BenchmarkProblem {
    /// Builds a problem outside the catalog (used by tests and callers
    /// with their own equations). The same construction-time self-check
    /// applies: the analytic solution must satisfy the equation and its
    /// constraints, otherwise this panics.
    pub fn custom(
        id: ProblemId,
        domain: Domain,
        kind: ProblemKind,
        analytic_1d: Option<fn(f64) -> f64>,
        analytic_2d: Option<fn(f64, f64) -> f64>,
    ) -> Self {
        let p = BenchmarkProblem { id, domain, kind, analytic_1d, analytic_2d };
        self_check(&p);
        p
    }

    /// Exact solution at a 1-D domain point.
    pub fn analytic_1d(&self, t: f64) -> Result<f64> {
        if !self.domain.contains_1d(t) {
            return Err(Error::DomainError(format!("t = {t} outside {:?}", self.domain)));
        }
        Ok(self.analytic_1d.expect("1-D analytic solution")(t))
    }

    /// Exact solution at a 2-D domain point.
    pub fn analytic_2d(&self, x: f64, y: f64) -> Result<f64> {
        if !self.domain.contains_2d(x, y) {
            return Err(Error::DomainError(format!("({x}, {y}) outside {:?}", self.domain)));
        }
        Ok(self.analytic_2d.expect("2-D analytic solution")(x, y))
    }

    pub(crate) fn analytic_1d_unchecked(&self) -> fn(f64) -> f64 {
        self.analytic_1d.expect("1-D analytic solution")
    }

    pub(crate) fn analytic_2d_unchecked(&self) -> fn(f64, f64) -> f64 {
        self.analytic_2d.expect("2-D analytic solution")
    }

    /// Interval bounds for the 1-D problems.
    pub fn interval(&self) -> Result<(f64, f64)> {
        match self.domain {
            Domain::Interval { t0, tf } => Ok((t0, tf)),
            Domain::Rectangle { .. } => {
                Err(Error::invalid(format!("{} is not a 1-D problem", self.id)))
            }
        }
    }
}

/// Exact-solution evaluation with domain and dimensionality checks.
pub fn analytic_solution(problem: &BenchmarkProblem, point: Point) -> Result<f64> {
    match point {
        Point::OneD(t) => problem.analytic_1d(t),
        Point::TwoD(x, y) => problem.analytic_2d(x, y),
    }
}

// ---------------------------------------------------------------------------
// Problem #1: linear first-order ODE on [0, 1].

fn p1_coeff_p(t: f64) -> f64 {
    -(t + (1.0 + 3.0 * t * t) / (1.0 + t + t * t * t))
}

fn p1_coeff_r(t: f64) -> f64 {
    t * t * t + 2.0 * t + t * t * (1.0 + 3.0 * t * t) / (1.0 + t + t * t * t)
}

fn p1_analytic(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (1.0 + t + t * t * t) + t * t
}

// ---------------------------------------------------------------------------
// Problem #2: nonlinear first-order ODE on [0, 0.5].

fn p2_f(t: f64, y: f64) -> f64 {
    y * y + t * t
}

fn p2_f_y(_t: f64, y: f64) -> f64 {
    2.0 * y
}

/// Closed form through the Bessel/Gamma ratio. The ratio tends to the
/// initial value 1 as `t -> 0`; below 1e-6 the limit value is returned to
/// avoid the indeterminate 0/0 form at exactly zero.
fn p2_analytic(t: f64) -> f64 {
    if t < 1e-6 {
        return 1.0;
    }
    let z = 0.5 * t * t;
    let g14 = gamma_fn(0.25).expect("gamma(1/4)");
    let g34 = gamma_fn(0.75).expect("gamma(3/4)");
    let num = -t
        * (g14 * bessel_j(-0.75, z).expect("J_{-3/4}")
            + 2.0 * g34 * bessel_j(0.75, z).expect("J_{3/4}"));
    let den = g14 * bessel_j(0.25, z).expect("J_{1/4}")
        - 2.0 * g34 * bessel_j(-0.25, z).expect("J_{-1/4}");
    num / den
}

// ---------------------------------------------------------------------------
// Problem #3: linear second-order ODE on [0, 2].

fn p3_damping(_t: f64) -> f64 {
    0.2
}

fn p3_stiffness(_t: f64) -> f64 {
    1.0
}

fn p3_r(t: f64) -> f64 {
    -0.2 * (-t / 5.0).exp() * t.cos()
}

fn p3_analytic(t: f64) -> f64 {
    t.sin() * (-t / 5.0).exp()
}

// ---------------------------------------------------------------------------
// Problem #4: Poisson equation on the unit square.

fn p4_rhs(x: f64, y: f64) -> f64 {
    (-x).exp() * (x - 2.0 + y * y * y + 6.0 * y)
}

fn p4_analytic(x: f64, y: f64) -> f64 {
    (x + y * y * y) * (-x).exp()
}

fn p4_bottom(x: f64) -> f64 {
    x * (-x).exp()
}
fn p4_bottom_d2(x: f64) -> f64 {
    (x - 2.0) * (-x).exp()
}
fn p4_left(y: f64) -> f64 {
    y * y * y
}
fn p4_left_d2(y: f64) -> f64 {
    6.0 * y
}
fn p4_top(x: f64) -> f64 {
    (x + 1.0) * (-x).exp()
}
fn p4_top_d2(x: f64) -> f64 {
    (x - 1.0) * (-x).exp()
}
fn p4_right(y: f64) -> f64 {
    (1.0 + y * y * y) * (-1.0_f64).exp()
}
fn p4_right_d2(y: f64) -> f64 {
    6.0 * y * (-1.0_f64).exp()
}

// ---------------------------------------------------------------------------

/// The four benchmark problems. Each entry is validated on construction:
/// the analytic solution must satisfy the equation at 50 pseudo-random
/// domain points to 1e-9 and every constraint to 1e-12.
pub fn problem_catalog() -> Vec<BenchmarkProblem> {
    let problems = vec![
        BenchmarkProblem {
            id: ProblemId::P1,
            domain: Domain::Interval { t0: 0.0, tf: 1.0 },
            kind: ProblemKind::LinearFirstOrder { p: p1_coeff_p, r: p1_coeff_r, y0: 1.0 },
            analytic_1d: Some(p1_analytic),
            analytic_2d: None,
        },
        BenchmarkProblem {
            id: ProblemId::P2,
            domain: Domain::Interval { t0: 0.0, tf: 0.5 },
            kind: ProblemKind::NonlinearFirstOrder { f: p2_f, f_y: p2_f_y, y0: 1.0 },
            analytic_1d: Some(p2_analytic),
            analytic_2d: None,
        },
        BenchmarkProblem {
            id: ProblemId::P3,
            domain: Domain::Interval { t0: 0.0, tf: 2.0 },
            kind: ProblemKind::LinearSecondOrder {
                damping: p3_damping,
                stiffness: p3_stiffness,
                r: p3_r,
                y0: 0.0,
                ydot0: 1.0,
            },
            analytic_1d: Some(p3_analytic),
            analytic_2d: None,
        },
        BenchmarkProblem {
            id: ProblemId::P4,
            domain: Domain::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 },
            kind: ProblemKind::LinearPoisson2d {
                f: p4_rhs,
                boundaries: [
                    BoundaryCurve { value: p4_bottom, second_deriv: p4_bottom_d2 },
                    BoundaryCurve { value: p4_left, second_deriv: p4_left_d2 },
                    BoundaryCurve { value: p4_top, second_deriv: p4_top_d2 },
                    BoundaryCurve { value: p4_right, second_deriv: p4_right_d2 },
                ],
            },
            analytic_1d: None,
            analytic_2d: Some(p4_analytic),
        },
    ];
    for p in &problems {
        self_check(p);
    }
    problems
}

/// Catalog lookup by id.
pub fn problem_by_id(id: ProblemId) -> BenchmarkProblem {
    problem_catalog().into_iter().find(|p| p.id == id).expect("catalog covers every id")
}

// ---------------------------------------------------------------------------
// Construction-time consistency checks.

/// Deterministic pseudo-random samples in [0, 1); enough for a self-check,
/// no RNG dependency needed.
fn lcg_samples(mut state: u64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        out.push((state >> 11) as f64 / (1u64 << 53) as f64);
    }
    out
}

fn fd_first(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

fn fd_second(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h))
        / (12.0 * h * h)
}

fn self_check(p: &BenchmarkProblem) {
    const RESIDUAL_TOL: f64 = 1e-9;
    const CONSTRAINT_TOL: f64 = 1e-12;
    // Fourth-order stencils: these steps balance truncation against
    // roundoff for each derivative order.
    const H: f64 = 1e-3;
    const H2: f64 = 5e-3;
    match (&p.kind, &p.domain) {
        (ProblemKind::LinearFirstOrder { p: pf, r, y0 }, Domain::Interval { t0, tf }) => {
            let y = p.analytic_1d.unwrap();
            for u in lcg_samples(0x1001, 50) {
                let t = t0 + u * (tf - t0);
                let res = fd_first(&y, t, H) - pf(t) * y(t) - r(t);
                assert!(res.abs() <= RESIDUAL_TOL, "{} residual {res} at t={t}", p.id);
            }
            assert!((y(*t0) - y0).abs() <= CONSTRAINT_TOL, "{} initial value", p.id);
        }
        (ProblemKind::NonlinearFirstOrder { f, y0, .. }, Domain::Interval { t0, tf }) => {
            let y = p.analytic_1d.unwrap();
            for u in lcg_samples(0x1002, 50) {
                // Keep the five-point stencil inside the region where the
                // closed form is evaluated directly.
                let t = t0 + (0.05 + 0.9 * u) * (tf - t0);
                let res = fd_first(&y, t, H) - f(t, y(t));
                assert!(res.abs() <= RESIDUAL_TOL, "{} residual {res} at t={t}", p.id);
            }
            assert!((y(*t0) - y0).abs() <= CONSTRAINT_TOL, "{} initial value", p.id);
        }
        (
            ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 },
            Domain::Interval { t0, tf },
        ) => {
            let y = p.analytic_1d.unwrap();
            for u in lcg_samples(0x1003, 50) {
                let t = t0 + u * (tf - t0);
                let res =
                    fd_second(&y, t, H2) + damping(t) * fd_first(&y, t, H) + stiffness(t) * y(t)
                        - r(t);
                assert!(res.abs() <= RESIDUAL_TOL, "{} residual {res} at t={t}", p.id);
            }
            assert!((y(*t0) - y0).abs() <= CONSTRAINT_TOL, "{} initial value", p.id);
            let d = fd_first(&y, *t0, 1e-3);
            assert!((d - ydot0).abs() <= CONSTRAINT_TOL, "{} initial slope {d}", p.id);
        }
        (ProblemKind::LinearPoisson2d { f, boundaries }, Domain::Rectangle { .. }) => {
            let z = p.analytic_2d.unwrap();
            let us = lcg_samples(0x1004, 50);
            let vs = lcg_samples(0x1005, 50);
            for (&u, &v) in us.iter().zip(&vs) {
                let zx = |x: f64| z(x, v);
                let zy = |y: f64| z(u, y);
                let res = fd_second(&zx, u, H2) + fd_second(&zy, v, H2) - f(u, v);
                assert!(res.abs() <= RESIDUAL_TOL, "{} residual {res} at ({u}, {v})", p.id);
            }
            let [bottom, left, top, right] = boundaries;
            for &u in us.iter().take(20) {
                assert!((z(u, 0.0) - (bottom.value)(u)).abs() <= CONSTRAINT_TOL);
                assert!((z(0.0, u) - (left.value)(u)).abs() <= CONSTRAINT_TOL);
                assert!((z(u, 1.0) - (top.value)(u)).abs() <= CONSTRAINT_TOL);
                assert!((z(1.0, u) - (right.value)(u)).abs() <= CONSTRAINT_TOL);
            }
        }
        _ => panic!("domain/kind mismatch in catalog entry {}", p.id),
    }
}
