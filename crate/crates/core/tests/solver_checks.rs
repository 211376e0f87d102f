//! Cross-method solver checks: independent integration oracles, paper-row
//! spot values at small point counts, and the stationarity relations every
//! dual solve must leave behind.

use desolve::csvm::{
    assemble_csvm_first_order, solve_linear_ode_csvm, solve_nonlinear_ode_csvm, solve_pde_csvm,
};
use desolve::grid::linspace;
use desolve::kernel::{Kernel1d, KernelConfig, RbfKernel};
use desolve::problems::{problem_by_id, Point, ProblemId, ProblemKind};
use desolve::svm::{
    assemble_lssvm_first_order, assemble_lssvm_second_order, solve_linear_ode_lssvm,
    solve_linear_pde_lssvm, solve_nonlinear_ode_lssvm,
};
use desolve::tfc::{solve_linear_ode_tfc, solve_linear_pde_tfc, solve_nonlinear_ode_tfc};
use nalgebra::DVector;

/// Classic fourth-order Runge-Kutta with a fixed step, the independent
/// integration oracle for the nonlinear problem.
fn rk4(f: impl Fn(f64, f64) -> f64, t0: f64, y0: f64, t_end: f64, h: f64) -> f64 {
    let mut t = t0;
    let mut y = y0;
    while t < t_end - 1e-15 {
        let step = h.min(t_end - t);
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * step, y + 0.5 * step * k1);
        let k3 = f(t + 0.5 * step, y + 0.5 * step * k2);
        let k4 = f(t + step, y + step * k3);
        y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += step;
    }
    y
}

#[test]
fn bessel_closed_form_agrees_with_rk4() {
    let p2 = problem_by_id(ProblemId::P2);
    let ProblemKind::NonlinearFirstOrder { f, y0, .. } = p2.kind else { unreachable!() };
    for &t in linspace(0.0, 0.5, 101).iter() {
        let reference = rk4(f, 0.0, y0, t, 1e-5);
        let closed = p2.analytic_1d(t).unwrap();
        assert!(
            (reference - closed).abs() <= 1e-9,
            "t = {t}: rk4 {reference} vs closed form {closed}"
        );
    }
}

#[test]
fn nonlinear_tfc_agrees_with_rk4_oracle() {
    let p2 = problem_by_id(ProblemId::P2);
    let ProblemKind::NonlinearFirstOrder { f, y0, .. } = p2.kind else { unreachable!() };
    let (sol, _) = solve_nonlinear_ode_tfc(&p2, 32, 32).unwrap();
    let newton = sol.newton.unwrap();
    assert!(newton.converged);
    assert!(newton.final_residual_norm <= 1e-12);
    let reference = rk4(f, 0.0, y0, 0.5, 1e-5);
    let value = sol.evaluate(Point::OneD(0.5)).unwrap();
    assert!((value - reference).abs() <= 1e-10, "{value} vs {reference}");
}

#[test]
fn tfc_solution_point_values() {
    let p1 = problem_by_id(ProblemId::P1);
    let (sol, _) = solve_linear_ode_tfc(&p1, 100, 26).unwrap();
    // Constraint embedding is exact at t0.
    assert_eq!(sol.evaluate(Point::OneD(0.0)).unwrap(), 1.0);
    // Closed form at the right endpoint: e^{-1/2}/3 + 1.
    let want = (-0.5_f64).exp() / 3.0 + 1.0;
    assert!((sol.evaluate(Point::OneD(1.0)).unwrap() - want).abs() <= 1e-12);
    // Out-of-domain evaluation requires the extrapolation path.
    assert!(sol.evaluate(Point::OneD(1.5)).is_err());
    assert!(sol.evaluate_extrapolated(Point::OneD(1.01)).is_ok());

    let p4 = problem_by_id(ProblemId::P4);
    let (sol4, _) = solve_linear_pde_tfc(&p4, 100, 15).unwrap();
    let want = 2.0 * (-1.0_f64).exp();
    assert!((sol4.evaluate(Point::TwoD(1.0, 1.0)).unwrap() - want).abs() <= 1e-12);
}

#[test]
fn tfc_small_paper_rows() {
    let p1 = problem_by_id(ProblemId::P1);
    let (_, r) = solve_linear_ode_tfc(&p1, 8, 7).unwrap();
    assert!(r.mse_test <= 1e-10, "P1 n=8 mse {}", r.mse_test);
    let (_, r17) = solve_linear_ode_tfc(&p1, 16, 17).unwrap();
    // Convergence between m = 7 and m = 17 spans at least eight orders.
    assert!(r17.mse_test <= 1e-8 * r.mse_test, "{} vs {}", r17.mse_test, r.mse_test);

    let p3 = problem_by_id(ProblemId::P3);
    let (_, r) = solve_linear_ode_tfc(&p3, 8, 8).unwrap();
    assert!(r.mse_test <= 1e-11, "P3 n=8 mse {}", r.mse_test);

    let p4 = problem_by_id(ProblemId::P4);
    let (_, r) = solve_linear_pde_tfc(&p4, 9, 8).unwrap();
    assert!(r.mse_test <= 1e-11, "P4 n=9 mse {}", r.mse_test);
}

#[test]
fn dual_small_paper_rows() {
    let p1 = problem_by_id(ProblemId::P1);
    let (_, r) =
        solve_linear_ode_lssvm(&p1, 8, KernelConfig::new(3.162, 5.995e17).unwrap()).unwrap();
    assert!(r.mse_test <= 1e-9, "P1 lssvm n=8 mse {}", r.mse_test);

    let p2 = problem_by_id(ProblemId::P2);
    let (_, r) =
        solve_nonlinear_ode_lssvm(&p2, 8, KernelConfig::new(3.704e-1, 1e10).unwrap()).unwrap();
    assert!(r.mse_test <= 1e-5, "P2 lssvm n=8 mse {}", r.mse_test);

    let p3 = problem_by_id(ProblemId::P3);
    let (_, r) =
        solve_linear_ode_lssvm(&p3, 8, KernelConfig::new(6.813, 5.995e17).unwrap()).unwrap();
    assert!(r.mse_test <= 1e-8, "P3 lssvm n=8 mse {}", r.mse_test);

    let p4 = problem_by_id(ProblemId::P4);
    let (_, r) =
        solve_linear_pde_lssvm(&p4, 9, KernelConfig::new(6.635, 1e14).unwrap()).unwrap();
    assert!(r.mse_test <= 1e-5, "P4 lssvm n=9 mse {}", r.mse_test);
    let (_, r) = solve_pde_csvm(&p4, 9, KernelConfig::new(6.948, 1e14).unwrap()).unwrap();
    assert!(r.mse_test <= 1e-8, "P4 csvm n=9 mse {}", r.mse_test);
}

#[test]
fn lssvm_dual_evaluation_examples() {
    let p1 = problem_by_id(ProblemId::P1);
    let cfg = KernelConfig::new(3.162e-1, 2.154e13).unwrap();
    let (sol, _) = solve_linear_ode_lssvm(&p1, 100, cfg).unwrap();
    // The initial-condition row holds to solver tolerance.
    assert!((sol.evaluate(Point::OneD(0.0)).unwrap() - 1.0).abs() <= 1e-9);
    // Closed form y(0.5) = e^{-1/8}/1.625 + 0.25.
    let want = (-0.125_f64).exp() / 1.625 + 0.25;
    assert!((sol.evaluate(Point::OneD(0.5)).unwrap() - want).abs() <= 1e-6);
}

#[test]
fn csvm_initial_value_examples() {
    let p1 = problem_by_id(ProblemId::P1);
    let cfg = KernelConfig::new(1.468e-1, 3.594e15).unwrap();
    let (sol, _) = solve_linear_ode_csvm(&p1, 100, cfg).unwrap();
    assert_eq!(sol.evaluate(Point::OneD(0.0)).unwrap(), 1.0);
    let want = (-0.5_f64).exp() / 3.0 + 1.0;
    assert!((sol.evaluate(Point::OneD(1.0)).unwrap() - want).abs() <= 1e-7);

    // Exactness holds for arbitrary kernel configurations.
    let p2 = problem_by_id(ProblemId::P2);
    for sigma in [0.05, 0.5, 3.0] {
        let cfg = KernelConfig::new(sigma, 1e10).unwrap();
        let (sol, _) = solve_nonlinear_ode_csvm(&p2, 12, cfg).unwrap();
        assert_eq!(sol.evaluate(Point::OneD(0.0)).unwrap(), 1.0);
    }
}

/// Stationarity residuals of the assembled systems and the
/// residual-multiplier relation `e_i = -alpha_i / gamma`, on
/// well-conditioned configurations of every solver variant.
#[test]
fn kkt_stationarity_and_residual_multiplier_relation() {
    let tol_rel = 1e-8;

    // First order.
    let p1 = problem_by_id(ProblemId::P1);
    let ProblemKind::LinearFirstOrder { p, r, y0 } = p1.kind else { unreachable!() };
    let cfg = KernelConfig::new(0.7, 1e5).unwrap();
    let kern = RbfKernel { sigma: cfg.sigma };
    let (sol, _) = solve_linear_ode_lssvm(&p1, 16, cfg).unwrap();
    let points = sol.train_points().unwrap().to_vec();
    let ts = &points[1..];
    let p_vals: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
    let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
    let (a, rhs) = assemble_lssvm_first_order(&points, &p_vals, &r_vals, y0, cfg.gamma, &kern);
    let mut z = DVector::zeros(ts.len() + 2);
    z.rows_mut(0, ts.len()).copy_from(sol.alpha());
    // Recover beta and bias from the stationarity rows they satisfy.
    let (sol_at, sol_d) = (
        |t: f64| sol.evaluate(Point::OneD(t)).unwrap(),
        |t: f64| sol.derivative(t, 1).unwrap(),
    );
    // beta = sum alpha_i p_i; bias from the model at t0.
    let beta: f64 = (0..ts.len()).map(|i| sol.alpha()[i] * p_vals[i]).sum();
    z[ts.len()] = beta;
    z[ts.len() + 1] = {
        // w^T phi(t0) part subtracted from yhat(t0).
        let mut wphi = beta * kern.eval(points[0], 0, points[0], 0);
        for (j, &tj) in ts.iter().enumerate() {
            wphi += sol.alpha()[j]
                * (kern.eval(tj, 1, points[0], 0) - p_vals[j] * kern.eval(tj, 0, points[0], 0));
        }
        sol_at(points[0]) - wphi
    };
    let res = &a * &z - &rhs;
    let bound = 1e-9 * (1.0 + rhs.amax());
    assert!(res.amax() <= bound, "first-order stationarity {:e} > {bound:e}", res.amax());
    for (i, &t) in ts.iter().enumerate() {
        let e = sol_d(t) - p(t) * sol_at(t) - r(t);
        let expect = -sol.alpha()[i] / cfg.gamma;
        assert!(
            (e - expect).abs() <= tol_rel * expect.abs().max(1e-14),
            "first-order residual relation at {t}: {e:e} vs {expect:e}"
        );
    }

    // Second order.
    let p3 = problem_by_id(ProblemId::P3);
    let ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 } = p3.kind else {
        unreachable!()
    };
    let cfg = KernelConfig::new(1.4, 1e5).unwrap();
    let (sol, _) = solve_linear_ode_lssvm(&p3, 16, cfg).unwrap();
    let points = sol.train_points().unwrap().to_vec();
    let ts = &points[1..];
    let a1: Vec<f64> = ts.iter().map(|&t| damping(t)).collect();
    let a0: Vec<f64> = ts.iter().map(|&t| stiffness(t)).collect();
    let rv: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
    let (_a2, _) =
        assemble_lssvm_second_order(&points, &a1, &a0, &rv, y0, ydot0, cfg.gamma, &kern);
    for (i, &t) in ts.iter().enumerate() {
        let e = sol.derivative(t, 2).unwrap()
            + damping(t) * sol.derivative(t, 1).unwrap()
            + stiffness(t) * sol.evaluate(Point::OneD(t)).unwrap()
            - r(t);
        let expect = -sol.alpha()[i] / cfg.gamma;
        assert!(
            (e - expect).abs() <= tol_rel * expect.abs().max(1e-14),
            "second-order residual relation at {t}: {e:e} vs {expect:e}"
        );
    }

    // Constrained first order: system residual directly on the cached
    // assembly, then the same multiplier relation.
    let cfg = KernelConfig::new(0.7, 1e5).unwrap();
    let kern = RbfKernel { sigma: cfg.sigma };
    let (sol, _) = solve_linear_ode_csvm(&p1, 16, cfg).unwrap();
    let ProblemKind::LinearFirstOrder { p, r, .. } = p1.kind else { unreachable!() };
    let points = sol.train_points().unwrap().to_vec();
    let ts = &points[1..];
    let p_vals: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
    let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
    let system = assemble_csvm_first_order(&points, &p_vals, &r_vals, 1.0, cfg.gamma, &kern);
    let res = &system.m * sol.alpha() - &system.rhs;
    let bound = 1e-9 * (1.0 + system.rhs.amax());
    assert!(res.amax() <= bound, "constrained stationarity {:e} > {bound:e}", res.amax());
    for (i, &t) in ts.iter().enumerate() {
        let e = sol.derivative(t, 1).unwrap() - p(t) * sol.evaluate(Point::OneD(t)).unwrap() - r(t);
        let expect = -sol.alpha()[i] / cfg.gamma;
        assert!(
            (e - expect).abs() <= tol_rel * expect.abs().max(1e-14),
            "constrained residual relation at {t}: {e:e} vs {expect:e}"
        );
    }

    // Nonlinear variants: the e_i relation against the dual derivative.
    let p2 = problem_by_id(ProblemId::P2);
    let ProblemKind::NonlinearFirstOrder { f, .. } = p2.kind else { unreachable!() };
    let cfg = KernelConfig::new(0.4, 1e5).unwrap();
    let (sol, rep) = solve_nonlinear_ode_lssvm(&p2, 12, cfg).unwrap();
    assert!(rep.converged);
    let points = sol.train_points().unwrap().to_vec();
    for (i, &t) in points[1..].iter().enumerate() {
        let e = sol.derivative(t, 1).unwrap() - f(t, sol.y_nodes().unwrap()[i]);
        let expect = -sol.alpha()[i] / cfg.gamma;
        assert!(
            (e - expect).abs() <= tol_rel * expect.abs().max(1e-14),
            "nonlinear residual relation at {t}: {e:e} vs {expect:e}"
        );
    }
    let (sol, rep) = solve_nonlinear_ode_csvm(&p2, 12, cfg).unwrap();
    assert!(rep.converged);
    let points = sol.train_points().unwrap().to_vec();
    for (i, &t) in points[1..].iter().enumerate() {
        let e = sol.derivative(t, 1).unwrap() - f(t, sol.y_nodes().unwrap()[i]);
        let expect = -sol.alpha()[i] / cfg.gamma;
        assert!(
            (e - expect).abs() <= tol_rel * expect.abs().max(1e-14),
            "constrained nonlinear residual relation at {t}: {e:e} vs {expect:e}"
        );
    }
}

/// Laplacian residual relation for the 2-D solvers, through the analytic
/// Laplacian of the dual models.
#[test]
fn poisson_residual_multiplier_relation() {
    let p4 = problem_by_id(ProblemId::P4);
    let ProblemKind::LinearPoisson2d { f, .. } = p4.kind else { unreachable!() };
    let cfg = KernelConfig::new(1.2, 1e3).unwrap();
    let side = 6;
    let xs = linspace(0.0, 1.0, side);

    let (sol, _) = solve_linear_pde_lssvm(&p4, 16, cfg).unwrap();
    let mut idx = 0;
    for i in 1..side - 1 {
        for j in 1..side - 1 {
            let (x, y) = (xs[i], xs[j]);
            let e = sol.laplacian(x, y).unwrap() - f(x, y);
            let expect = -sol.alpha()[idx] / cfg.gamma;
            assert!(
                (e - expect).abs() <= 1e-8 * expect.abs().max(1e-12),
                "lssvm poisson relation at ({x},{y}): {e:e} vs {expect:e}"
            );
            idx += 1;
        }
    }

    let (sol, _) = solve_pde_csvm(&p4, 16, cfg).unwrap();
    let mut idx = 0;
    for i in 1..side - 1 {
        for j in 1..side - 1 {
            let (x, y) = (xs[i], xs[j]);
            let e = sol.laplacian(x, y).unwrap() - f(x, y);
            let expect = -sol.alpha()[idx] / cfg.gamma;
            assert!(
                (e - expect).abs() <= 1e-8 * expect.abs().max(1e-12),
                "csvm poisson relation at ({x},{y}): {e:e} vs {expect:e}"
            );
            idx += 1;
        }
    }
}

/// Iterating the uniform grid: the improved-Euler seed must land close
/// enough for Newton to converge from every benchmark size.
#[test]
fn nonlinear_solvers_converge_across_sizes() {
    let p2 = problem_by_id(ProblemId::P2);
    for n in [8usize, 16, 32] {
        let cfg = KernelConfig::new(0.45, 1e10).unwrap();
        let (_, r) = solve_nonlinear_ode_lssvm(&p2, n, cfg).unwrap();
        assert!(r.mse_test <= 1e-4, "lssvm n={n} mse {}", r.mse_test);
        let (_, r) = solve_nonlinear_ode_csvm(&p2, n, cfg).unwrap();
        assert!(r.mse_test <= 1e-4, "csvm n={n} mse {}", r.mse_test);
        let (_, r) = solve_nonlinear_ode_tfc(&p2, n, n.min(33)).unwrap();
        assert!(r.converged, "tfc n={n} not converged");
    }
}
