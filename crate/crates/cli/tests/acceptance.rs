//! Acceptance suite: every benchmark-reproduction criterion and property
//! gate, each printing one pass/fail line (`cargo test --test acceptance
//! -- --nocapture` shows them all).

use desolve::csvm::{
    assemble_csvm_first_order, assemble_csvm_poisson, assemble_csvm_second_order,
    solve_linear_ode_csvm, solve_nonlinear_ode_csvm, solve_pde_csvm,
};
use desolve::grid::{linspace, uniform_points};
use desolve::kernel::{Kernel1d, Kernel2d, KernelConfig, RbfKernel, RbfKernel2d};
use desolve::linalg::{solve_full_piv, solve_kkt};
use desolve::problems::{problem_by_id, Point, ProblemId, ProblemKind};
use desolve::report::Method;
use desolve::svm::{
    assemble_lssvm_first_order, assemble_lssvm_poisson, assemble_lssvm_second_order,
    solve_linear_ode_lssvm, solve_linear_pde_lssvm, solve_nonlinear_ode_lssvm,
};
use desolve::tfc::{
    build_dirichlet_expression, build_ivp_expression, pde_grid_side, solve_linear_ode_tfc,
    solve_linear_pde_tfc, solve_nonlinear_ode_tfc,
};
use desolve_cli::runspec::{RunSpec, Tuning};
use desolve_cli::tune::{tune_hyperparameters, TunedHp};
use nalgebra::{DMatrix, DVector};

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion:02} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion:02}: {detail}");
}

#[test]
fn criterion_01_p1_tfc() {
    let p1 = problem_by_id(ProblemId::P1);
    let (_, r) = solve_linear_ode_tfc(&p1, 100, 26).unwrap();
    let pass = r.mse_test <= 1e-28 && r.max_err_test <= 1e-13;
    verdict(
        1,
        pass,
        &format!("P1 tfc n=100 m=26: mse_test={:.3e} max_test={:.3e}", r.mse_test, r.max_err_test),
    );
}

#[test]
fn criterion_02_p1_lssvm() {
    let p1 = problem_by_id(ProblemId::P1);
    let cfg = KernelConfig::new(3.162e-1, 2.154e13).unwrap();
    let (_, r) = solve_linear_ode_lssvm(&p1, 100, cfg).unwrap();
    verdict(2, r.mse_test <= 1e-15, &format!("P1 lssvm n=100: mse_test={:.3e}", r.mse_test));
}

#[test]
fn criterion_03_p1_csvm() {
    let p1 = problem_by_id(ProblemId::P1);
    let cfg = KernelConfig::new(1.468e-1, 3.594e15).unwrap();
    let (sol, r) = solve_linear_ode_csvm(&p1, 100, cfg).unwrap();
    let ic_err = (sol.evaluate(Point::OneD(0.0)).unwrap() - 1.0).abs();
    let pass = r.mse_test <= 1e-16 && ic_err <= 5e-15;
    verdict(
        3,
        pass,
        &format!("P1 csvm n=100: mse_test={:.3e} |y(0)-1|={ic_err:.3e}", r.mse_test),
    );
}

#[test]
fn criterion_04_p2_tfc() {
    let p2 = problem_by_id(ProblemId::P2);
    let (sol, r) = solve_nonlinear_ode_tfc(&p2, 32, 32).unwrap();
    let newton = sol.newton.unwrap();
    let pass = r.mse_test <= 1e-27 && newton.converged && newton.iterations <= 30;
    verdict(
        4,
        pass,
        &format!(
            "P2 tfc n=32 m=32: mse_test={:.3e} converged={} iterations={}",
            r.mse_test, newton.converged, newton.iterations
        ),
    );
}

#[test]
fn criterion_05_p2_dual_methods() {
    let p2 = problem_by_id(ProblemId::P2);
    let simplex_spec = |method: &str| {
        RunSpec {
            problem_id: "P2".into(),
            method: method.into(),
            point_counts: Some(vec![100]),
            tuning: Tuning::Simplex,
            seed: 0,
            test_points: None,
        }
        .validate()
        .unwrap()
    };
    let spec = simplex_spec("lssvm");
    let TunedHp::Kernel { sigma: sig_l, gamma } =
        tune_hyperparameters(&p2, Method::Lssvm, 100, &spec).unwrap()
    else {
        panic!("kernel hyperparameters expected")
    };
    let (_, r_l) =
        solve_nonlinear_ode_lssvm(&p2, 100, KernelConfig::new(sig_l, gamma).unwrap()).unwrap();
    let spec = simplex_spec("csvm");
    let TunedHp::Kernel { sigma: sig_c, .. } =
        tune_hyperparameters(&p2, Method::Csvm, 100, &spec).unwrap()
    else {
        panic!("kernel hyperparameters expected")
    };
    let (_, r_c) =
        solve_nonlinear_ode_csvm(&p2, 100, KernelConfig::new(sig_c, gamma).unwrap()).unwrap();
    let window = 1e-6..=5e-5;
    let pass = window.contains(&r_l.mse_test) && window.contains(&r_c.mse_test);
    verdict(
        5,
        pass,
        &format!(
            "P2 n=100 simplex: lssvm sigma={sig_l:.4} mse_test={:.3e}, csvm sigma={sig_c:.4} \
             mse_test={:.3e} (window [1e-6, 5e-5])",
            r_l.mse_test, r_c.mse_test
        ),
    );
}

#[test]
fn criterion_06_p3_tfc() {
    let p3 = problem_by_id(ProblemId::P3);
    let (_, r) = solve_linear_ode_tfc(&p3, 16, 15).unwrap();
    verdict(6, r.mse_test <= 1e-28, &format!("P3 tfc n=16 m=15: mse_test={:.3e}", r.mse_test));
}

#[test]
fn criterion_07_p3_dual_methods() {
    let p3 = problem_by_id(ProblemId::P3);
    let cfg = KernelConfig::new(1.468, 2.154e13).unwrap();
    let (_, r_l) = solve_linear_ode_lssvm(&p3, 100, cfg).unwrap();
    let (_, r_c) = solve_linear_ode_csvm(&p3, 100, cfg).unwrap();
    let pass = r_l.mse_test <= 1e-18 && r_c.mse_test <= 1e-17;
    verdict(
        7,
        pass,
        &format!("P3 n=100: lssvm mse_test={:.3e}, csvm mse_test={:.3e}", r_l.mse_test, r_c.mse_test),
    );
}

#[test]
fn criterion_08_p4_tfc() {
    let p4 = problem_by_id(ProblemId::P4);
    let started = std::time::Instant::now();
    let (_, r) = solve_linear_pde_tfc(&p4, 100, 15).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let pass = r.mse_test <= 1e-28 && elapsed <= 120.0;
    verdict(
        8,
        pass,
        &format!("P4 tfc n=100 m=15: mse_test={:.3e} ({elapsed:.1}s)", r.mse_test),
    );
}

#[test]
fn criterion_09_p4_dual_methods() {
    let p4 = problem_by_id(ProblemId::P4);
    let (_, r_l) =
        solve_linear_pde_lssvm(&p4, 100, KernelConfig::new(9.484e-1, 1e14).unwrap()).unwrap();
    let started = std::time::Instant::now();
    let (_, r_c) = solve_pde_csvm(&p4, 100, KernelConfig::new(8.891e-1, 1e14).unwrap()).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let pass = r_l.mse_test <= 1e-12 && r_c.mse_test <= 1e-13 && elapsed <= 300.0;
    verdict(
        9,
        pass,
        &format!(
            "P4 n=100: lssvm mse_test={:.3e}, csvm mse_test={:.3e} ({elapsed:.1}s)",
            r_l.mse_test, r_c.mse_test
        ),
    );
}

#[test]
fn criterion_10_method_ordering() {
    let cases = [
        (ProblemId::P1, 100usize, 26usize, 3.162e-1, 2.154e13),
        (ProblemId::P3, 100, 15, 1.468, 2.154e13),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (id, n, m, sigma, gamma) in cases {
        let problem = problem_by_id(id);
        let (_, tfc) = solve_linear_ode_tfc(&problem, n, m).unwrap();
        let (_, svm) =
            solve_linear_ode_lssvm(&problem, n, KernelConfig::new(sigma, gamma).unwrap()).unwrap();
        pass &= tfc.mse_test * 1e6 <= svm.mse_test;
        detail.push_str(&format!("{id}: tfc {:.1e} vs lssvm {:.1e}; ", tfc.mse_test, svm.mse_test));
    }
    let p4 = problem_by_id(ProblemId::P4);
    let (_, tfc) = solve_linear_pde_tfc(&p4, 100, 15).unwrap();
    let (_, svm) =
        solve_linear_pde_lssvm(&p4, 100, KernelConfig::new(9.484e-1, 1e14).unwrap()).unwrap();
    pass &= tfc.mse_test * 1e6 <= svm.mse_test;
    detail.push_str(&format!("P4: tfc {:.1e} vs lssvm {:.1e}", tfc.mse_test, svm.mse_test));
    verdict(10, pass, &detail);
}

#[test]
fn criterion_11_constraint_exactness() {
    let mut worst: f64 = 0.0;
    let mut state = 0x2001u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let ProblemKind::LinearPoisson2d { boundaries, .. } = problem_by_id(ProblemId::P4).kind else {
        unreachable!()
    };
    let expr2d =
        build_dirichlet_expression(boundaries[0], boundaries[1], boundaries[2], boundaries[3])
            .unwrap();
    for _ in 0..50 {
        let coeffs: Vec<f64> = (0..6).map(|_| 2.0 * next() - 1.0).collect();
        let g = {
            let c = coeffs.clone();
            move |t: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
        };
        let gdot = {
            let c = coeffs.clone();
            move |t: f64| (1..c.len()).rev().fold(0.0, |acc, k| acc * t + k as f64 * c[k])
        };
        let (t0, y0, ydot0) = (2.0 * next() - 1.0, 4.0 * next() - 2.0, 4.0 * next() - 2.0);
        let first = build_ivp_expression(t0, y0, None);
        worst = worst.max((first.value(t0, &g, &gdot) - y0).abs());
        let second = build_ivp_expression(t0, y0, Some(ydot0));
        worst = worst.max((second.value(t0, &g, &gdot) - y0).abs());

        let (a, b) = (2.0 * next() - 1.0, 2.0 * next() - 1.0);
        let g2 = move |x: f64, y: f64| a * x * y * y + b * (x - 0.3) * (y + 0.2);
        let s = next();
        let edge_cases = [
            (s, 0.0, (boundaries[0].value)(s)),
            (0.0, s, (boundaries[1].value)(s)),
            (s, 1.0, (boundaries[2].value)(s)),
            (1.0, s, (boundaries[3].value)(s)),
        ];
        for (x, y, want) in edge_cases {
            worst = worst.max((expr2d.value(x, y, &g2) - want).abs());
        }
    }
    verdict(11, worst <= 5e-14, &format!("constraint residuals over 50 free functions: {worst:.3e}"));
}

#[test]
fn criterion_12_kernel_derivative_suite() {
    let mut state = 0x3001u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_rel: f64 = 0.0;
    for _ in 0..100 {
        let sigma = 0.1 + 9.9 * next();
        let a = 6.0 * next() - 3.0;
        let b = 6.0 * next() - 3.0;
        let k = RbfKernel { sigma };
        let (ha, hb) = (1e-5 * a.abs().max(1.0), 1e-5 * b.abs().max(1.0));
        let mut check = |analytic: f64, fd: f64| {
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-6);
            worst_rel = worst_rel.max(rel);
        };
        for da in 1..=2usize {
            for db in 0..=2usize {
                let fd =
                    (k.eval(a + ha, da - 1, b, db) - k.eval(a - ha, da - 1, b, db)) / (2.0 * ha);
                check(k.eval(a, da, b, db), fd);
            }
        }
        for db in 1..=2usize {
            let fd = (k.eval(a, 0, b + hb, db - 1) - k.eval(a, 0, b - hb, db - 1)) / (2.0 * hb);
            check(k.eval(a, 0, b, db), fd);
        }
        let k2 = RbfKernel2d { sigma };
        let p = (a, b);
        let q = (6.0 * next() - 3.0, 6.0 * next() - 3.0);
        let h = 1e-5 * p.0.abs().max(1.0);
        let fd =
            (k2.eval((p.0 + h, p.1), (1, 0), q, (0, 2)) - k2.eval((p.0 - h, p.1), (1, 0), q, (0, 2)))
                / (2.0 * h);
        check(k2.eval(p, (2, 0), q, (0, 2)), fd);
    }
    verdict(12, worst_rel <= 1e-6, &format!("worst relative derivative error {worst_rel:.3e}"));
}

#[test]
fn criterion_13_kkt_residual_suite() {
    let mut pass = true;
    let mut worst_stat: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut note = |stat: f64, bound: f64, rel: f64, ok: bool| {
        worst_stat = worst_stat.max(stat / bound);
        worst_rel = worst_rel.max(rel);
        pass = pass && ok;
    };

    // Linear first order, both dual methods.
    let p1 = problem_by_id(ProblemId::P1);
    let ProblemKind::LinearFirstOrder { p, r, y0 } = p1.kind else { unreachable!() };
    let cfg = KernelConfig::new(0.7, 1e5).unwrap();
    let kern = RbfKernel { sigma: cfg.sigma };
    {
        let (sol, _) = solve_linear_ode_lssvm(&p1, 16, cfg).unwrap();
        let points = sol.train_points().unwrap().to_vec();
        let ts = &points[1..];
        let p_vals: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
        let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
        let (a, rhs) = assemble_lssvm_first_order(&points, &p_vals, &r_vals, y0, cfg.gamma, &kern);
        let mut z = DVector::zeros(ts.len() + 2);
        z.rows_mut(0, ts.len()).copy_from(sol.alpha());
        z[ts.len()] = sol.data_multipliers()[0];
        z[ts.len() + 1] = sol.bias();
        let stat = (&a * &z - &rhs).amax();
        let bound = 1e-9 * (1.0 + rhs.amax());
        let mut rel: f64 = 0.0;
        for (i, &t) in ts.iter().enumerate() {
            let e = sol.derivative(t, 1).unwrap() - p(t) * sol.evaluate(Point::OneD(t)).unwrap()
                - r(t);
            let expect = -sol.alpha()[i] / cfg.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, stat <= bound && rel <= 1e-8);
    }
    {
        let (sol, _) = solve_linear_ode_csvm(&p1, 16, cfg).unwrap();
        let points = sol.train_points().unwrap().to_vec();
        let ts = &points[1..];
        let p_vals: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
        let r_vals: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
        let system = assemble_csvm_first_order(&points, &p_vals, &r_vals, y0, cfg.gamma, &kern);
        let stat = (&system.m * sol.alpha() - &system.rhs).amax();
        let bound = 1e-9 * (1.0 + system.rhs.amax());
        let mut rel: f64 = 0.0;
        for (i, &t) in ts.iter().enumerate() {
            let e = sol.derivative(t, 1).unwrap() - p(t) * sol.evaluate(Point::OneD(t)).unwrap()
                - r(t);
            let expect = -sol.alpha()[i] / cfg.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, stat <= bound && rel <= 1e-8);
    }

    // Linear second order, both dual methods.
    let p3 = problem_by_id(ProblemId::P3);
    let ProblemKind::LinearSecondOrder { damping, stiffness, r, y0, ydot0 } = p3.kind else {
        unreachable!()
    };
    let cfg3 = KernelConfig::new(1.4, 1e5).unwrap();
    let kern3 = RbfKernel { sigma: cfg3.sigma };
    {
        let (sol, _) = solve_linear_ode_lssvm(&p3, 16, cfg3).unwrap();
        let points = sol.train_points().unwrap().to_vec();
        let ts = &points[1..];
        let a1: Vec<f64> = ts.iter().map(|&t| damping(t)).collect();
        let a0: Vec<f64> = ts.iter().map(|&t| stiffness(t)).collect();
        let rv: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
        let (a, rhs) =
            assemble_lssvm_second_order(&points, &a1, &a0, &rv, y0, ydot0, cfg3.gamma, &kern3);
        let mut z = DVector::zeros(ts.len() + 3);
        z.rows_mut(0, ts.len()).copy_from(sol.alpha());
        let betas = sol.data_multipliers();
        z[ts.len()] = betas[0];
        z[ts.len() + 1] = betas[1];
        z[ts.len() + 2] = sol.bias();
        let stat = (&a * &z - &rhs).amax();
        let bound = 1e-9 * (1.0 + rhs.amax());
        let mut rel: f64 = 0.0;
        for (i, &t) in ts.iter().enumerate() {
            let e = sol.derivative(t, 2).unwrap()
                + damping(t) * sol.derivative(t, 1).unwrap()
                + stiffness(t) * sol.evaluate(Point::OneD(t)).unwrap()
                - r(t);
            let expect = -sol.alpha()[i] / cfg3.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, stat <= bound && rel <= 1e-8);
    }
    {
        let (sol, _) = solve_linear_ode_csvm(&p3, 16, cfg3).unwrap();
        let points = sol.train_points().unwrap().to_vec();
        let ts = &points[1..];
        let a1: Vec<f64> = ts.iter().map(|&t| damping(t)).collect();
        let a0: Vec<f64> = ts.iter().map(|&t| stiffness(t)).collect();
        let rv: Vec<f64> = ts.iter().map(|&t| r(t)).collect();
        let (m, rhs) =
            assemble_csvm_second_order(&points, &a1, &a0, &rv, y0, ydot0, cfg3.gamma, &kern3);
        let stat = (&m * sol.alpha() - &rhs).amax();
        let bound = 1e-9 * (1.0 + rhs.amax());
        note(stat, bound, 0.0, stat <= bound);
    }

    // Nonlinear, both dual methods: the Newton report's residual norm is
    // the stationarity norm of the full system.
    let p2 = problem_by_id(ProblemId::P2);
    let ProblemKind::NonlinearFirstOrder { f, .. } = p2.kind else { unreachable!() };
    let cfg2 = KernelConfig::new(0.4, 1e5).unwrap();
    {
        let (sol, rep) = solve_nonlinear_ode_lssvm(&p2, 12, cfg2).unwrap();
        let stat = sol.newton.unwrap().final_residual_norm;
        let bound = 1e-9 * (1.0 + 2.0);
        let points = sol.train_points().unwrap().to_vec();
        let mut rel: f64 = 0.0;
        for (i, &t) in points[1..].iter().enumerate() {
            let e = sol.derivative(t, 1).unwrap() - f(t, sol.y_nodes().unwrap()[i]);
            let expect = -sol.alpha()[i] / cfg2.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, rep.converged && stat <= bound && rel <= 1e-8);
    }
    {
        let (sol, rep) = solve_nonlinear_ode_csvm(&p2, 12, cfg2).unwrap();
        let stat = sol.newton.unwrap().final_residual_norm;
        let bound = 1e-9 * (1.0 + 2.0);
        let points = sol.train_points().unwrap().to_vec();
        let mut rel: f64 = 0.0;
        for (i, &t) in points[1..].iter().enumerate() {
            let e = sol.derivative(t, 1).unwrap() - f(t, sol.y_nodes().unwrap()[i]);
            let expect = -sol.alpha()[i] / cfg2.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, rep.converged && stat <= bound && rel <= 1e-8);
    }

    // Poisson, both dual methods.
    let p4 = problem_by_id(ProblemId::P4);
    let ProblemKind::LinearPoisson2d { f, boundaries } = p4.kind else { unreachable!() };
    let cfg4 = KernelConfig::new(1.2, 1e3).unwrap();
    let kern4 = RbfKernel2d { sigma: cfg4.sigma };
    let side = pde_grid_side(16);
    let xs = linspace(0.0, 1.0, side);
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            if i == 0 || i == side - 1 || j == 0 || j == side - 1 {
                boundary.push((x, y));
            } else {
                interior.push((x, y));
            }
        }
    }
    {
        let (sol, _) = solve_linear_pde_lssvm(&p4, 16, cfg4).unwrap();
        let f_vals: Vec<f64> = interior.iter().map(|&(x, y)| f(x, y)).collect();
        let c_vals: Vec<f64> = boundary
            .iter()
            .map(|&(x, y)| {
                if y == 0.0 {
                    (boundaries[0].value)(x)
                } else if x == 0.0 {
                    (boundaries[1].value)(y)
                } else if y == 1.0 {
                    (boundaries[2].value)(x)
                } else {
                    (boundaries[3].value)(y)
                }
            })
            .collect();
        let (a, rhs) =
            assemble_lssvm_poisson(&interior, &boundary, &f_vals, &c_vals, cfg4.gamma, &kern4);
        let (ni, nb) = (interior.len(), boundary.len());
        let mut z = DVector::zeros(ni + nb + 1);
        z.rows_mut(0, ni).copy_from(sol.alpha());
        let betas = sol.data_multipliers();
        for (k, &b) in betas.iter().enumerate() {
            z[ni + k] = b;
        }
        z[ni + nb] = sol.bias();
        let stat = (&a * &z - &rhs).amax();
        let bound = 1e-9 * (1.0 + rhs.amax());
        let mut rel: f64 = 0.0;
        for (i, &(x, y)) in interior.iter().enumerate() {
            let e = sol.laplacian(x, y).unwrap() - f(x, y);
            let expect = -sol.alpha()[i] / cfg4.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, stat <= bound && rel <= 1e-8);
    }
    {
        let (sol, _) = solve_pde_csvm(&p4, 16, cfg4).unwrap();
        let expr =
            build_dirichlet_expression(boundaries[0], boundaries[1], boundaries[2], boundaries[3])
                .unwrap();
        let f_vals: Vec<f64> = interior.iter().map(|&(x, y)| f(x, y)).collect();
        let interp: Vec<f64> = interior
            .iter()
            .map(|&(x, y)| expr.interpolant_xx(x, y) + expr.interpolant_yy(x, y))
            .collect();
        let (a, rhs) = assemble_csvm_poisson(&interior, &f_vals, &interp, cfg4.gamma, &kern4);
        let stat = (&a * sol.alpha() - &rhs).amax();
        let bound = 1e-9 * (1.0 + rhs.amax());
        let mut rel: f64 = 0.0;
        for (i, &(x, y)) in interior.iter().enumerate() {
            let e = sol.laplacian(x, y).unwrap() - f(x, y);
            let expect = -sol.alpha()[i] / cfg4.gamma;
            rel = rel.max((e - expect).abs() / expect.abs().max(1e-14));
        }
        note(stat, bound, rel, stat <= bound && rel <= 1e-8);
    }

    verdict(
        13,
        pass,
        &format!(
            "eight variants: worst stationarity {worst_stat:.2}x of bound, worst e=-a/g rel {worst_rel:.3e}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 14: random-feature oracle.

struct RandomFeatures {
    omegas: Vec<f64>,
    phases: Vec<f64>,
    scale: f64,
}

impl RandomFeatures {
    fn new(count: usize, sigma: f64, seed: u64) -> Self {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let sd = (2.0 / (sigma * sigma)).sqrt();
        let omegas = (0..count)
            .map(|_| {
                let u1 = next().max(1e-12);
                let u2 = next();
                sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let phases = (0..count).map(|_| 2.0 * std::f64::consts::PI * next()).collect();
        RandomFeatures { omegas, phases, scale: (2.0 / count as f64).sqrt() }
    }

    fn feature(&self, k: usize, t: f64, d: usize) -> f64 {
        let arg = self.omegas[k] * t + self.phases[k];
        let w = self.omegas[k];
        self.scale
            * match d {
                0 => arg.cos(),
                1 => -w * arg.sin(),
                _ => -w * w * arg.cos(),
            }
    }

    fn feature_vec(&self, t: f64, d: usize) -> DVector<f64> {
        DVector::from_fn(self.omegas.len(), |k, _| self.feature(k, t, d))
    }
}

impl Kernel1d for RandomFeatures {
    fn eval(&self, a: f64, da: usize, b: f64, db: usize) -> f64 {
        (0..self.omegas.len()).map(|k| self.feature(k, a, da) * self.feature(k, b, db)).sum()
    }
}

#[test]
fn criterion_14_oracle_equivalence() {
    let n = 5;
    let gamma = 100.0;
    let y0 = 0.7;
    let p_fn = |t: f64| -(t + 0.5 * t * t);
    let r_fn = |t: f64| (2.0 * t).sin() + 1.0;
    let features = RandomFeatures::new(30, 1.0, 0x4001);
    let points = uniform_points(n, 0.0, 1.0).unwrap();
    let ts = &points[1..];
    let p_vals: Vec<f64> = ts.iter().map(|&t| p_fn(t)).collect();
    let r_vals: Vec<f64> = ts.iter().map(|&t| r_fn(t)).collect();

    let (a, rhs) = assemble_lssvm_first_order(&points, &p_vals, &r_vals, y0, gamma, &features);
    let z = solve_kkt(&a, &rhs, false).unwrap();
    let dual_at = |t: f64| -> f64 {
        let mut acc = z[n] * features.eval(points[0], 0, t, 0) + z[n + 1];
        for (j, &tj) in ts.iter().enumerate() {
            acc += z[j] * (features.eval(tj, 1, t, 0) - p_vals[j] * features.eval(tj, 0, t, 0));
        }
        acc
    };

    // Direct primal: v = [w, e, b], equality-constrained quadratic
    // program through its saddle system.
    let dim = features.omegas.len();
    let nv = dim + n + 1;
    let nc = n + 1;
    let mut kkt = DMatrix::zeros(nv + nc, nv + nc);
    let mut rhs2 = DVector::zeros(nv + nc);
    for k in 0..dim {
        kkt[(k, k)] = 1.0;
    }
    for i in 0..n {
        kkt[(dim + i, dim + i)] = gamma;
    }
    for (i, &t) in ts.iter().enumerate() {
        let row = features.feature_vec(t, 1) - p_vals[i] * features.feature_vec(t, 0);
        for k in 0..dim {
            kkt[(nv + i, k)] = row[k];
            kkt[(k, nv + i)] = row[k];
        }
        kkt[(nv + i, dim + i)] = -1.0;
        kkt[(dim + i, nv + i)] = -1.0;
        kkt[(nv + i, dim + n)] = -p_vals[i];
        kkt[(dim + n, nv + i)] = -p_vals[i];
        rhs2[nv + i] = r_vals[i];
    }
    let phi0 = features.feature_vec(points[0], 0);
    for k in 0..dim {
        kkt[(nv + n, k)] = phi0[k];
        kkt[(k, nv + n)] = phi0[k];
    }
    kkt[(nv + n, dim + n)] = 1.0;
    kkt[(dim + n, nv + n)] = 1.0;
    rhs2[nv + n] = y0;
    let v = solve_full_piv(&kkt, &rhs2).unwrap();
    let w = v.rows(0, dim).clone_owned();
    let b_primal = v[dim + n];

    let mut worst: f64 = 0.0;
    for &t in points.iter() {
        let primal = w.dot(&features.feature_vec(t, 0)) + b_primal;
        let dual = dual_at(t);
        worst = worst.max((primal - dual).abs() / primal.abs().max(1.0));
    }

    // Constrained variant: the printed coefficient matrix against direct
    // elimination of the weights.
    let system = assemble_csvm_first_order(&points, &p_vals, &r_vals, y0, gamma, &features);
    let psis: Vec<DVector<f64>> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            features.feature_vec(t, 1)
                - p_vals[i] * (features.feature_vec(t, 0) - features.feature_vec(points[0], 0))
        })
        .collect();
    let mut worst_m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let direct = psis[i].dot(&psis[j]) + if i == j { 1.0 / gamma } else { 0.0 };
            worst_m = worst_m.max((system.m[(i, j)] - direct).abs() / direct.abs().max(1.0));
        }
    }

    let pass = worst <= 1e-3 && worst_m <= 1e-3;
    verdict(
        14,
        pass,
        &format!("dual-vs-primal rel {worst:.3e}, matrix elimination rel {worst_m:.3e}"),
    );
}

#[test]
fn criterion_15_bessel_ratio_vs_rk4() {
    let p2 = problem_by_id(ProblemId::P2);
    let ProblemKind::NonlinearFirstOrder { f, y0, .. } = p2.kind else { unreachable!() };
    let mut worst: f64 = 0.0;
    for &t in linspace(0.0, 0.5, 101).iter() {
        let mut y = y0;
        let mut s = 0.0;
        let h: f64 = 1e-5;
        while s < t - 1e-15 {
            let step = h.min(t - s);
            let k1 = f(s, y);
            let k2 = f(s + 0.5 * step, y + 0.5 * step * k1);
            let k3 = f(s + 0.5 * step, y + 0.5 * step * k2);
            let k4 = f(s + step, y + step * k3);
            y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            s += step;
        }
        worst = worst.max((y - p2.analytic_1d(t).unwrap()).abs());
    }
    verdict(15, worst <= 1e-9, &format!("closed form vs integration oracle: {worst:.3e}"));
}
