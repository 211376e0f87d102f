//! Gaussian RBF kernel with analytic derivatives, in one and two
//! dimensions, plus the small feature-combination algebra the dual solvers
//! assemble their KKT systems with.
//!
//! All derivative bookkeeping reduces to derivatives of the scalar factor
//! `g(u) = exp(-u^2 / sigma^2)`: for `K(a, b) = g(a - b)`,
//!
//! ```text
//! d^da/da^da d^db/db^db K(a, b) = (-1)^db * g^(da+db)(a - b)
//! ```
//!
//! and the 2-D kernel factorizes per axis.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum derivative order per kernel argument.
pub const MAX_ARG_DERIV: usize = 2;

/// Kernel bandwidth and residual regularization weight of a dual solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub sigma: f64,
    pub gamma: f64,
}

impl KernelConfig {
    pub fn new(sigma: f64, gamma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid(format!("kernel bandwidth must be positive, got {sigma}")));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::invalid(format!("regularization weight must be positive, got {gamma}")));
        }
        Ok(KernelConfig { sigma, gamma })
    }
}

/// A differentiable scalar kernel on the line. The production kernel is
/// [`RbfKernel`]; tests substitute a truncated random-feature map to check
/// the KKT assembly against direct primal solves.
pub trait Kernel1d {
    /// `d^da/da^da d^db/db^db K(a, b)`, with `da, db <= 2`.
    fn eval(&self, a: f64, da: usize, b: f64, db: usize) -> f64;
}

/// A differentiable kernel on the plane; derivative orders are per-axis
/// multi-indices for each argument.
pub trait Kernel2d {
    fn eval(&self, p: (f64, f64), dp: (usize, usize), q: (f64, f64), dq: (usize, usize)) -> f64;
}

/// `exp(-(a-b)^2 / sigma^2)`.
#[derive(Debug, Clone, Copy)]
pub struct RbfKernel {
    pub sigma: f64,
}

/// `g^(order)(u)` for `g(u) = exp(-u^2/s2)`, orders 0..=4.
fn gaussian_derivative(u: f64, s2: f64, order: usize) -> f64 {
    let e = (-u * u / s2).exp();
    match order {
        0 => e,
        1 => -2.0 * u / s2 * e,
        2 => (-2.0 / s2 + 4.0 * u * u / (s2 * s2)) * e,
        3 => (12.0 * u / (s2 * s2) - 8.0 * u * u * u / (s2 * s2 * s2)) * e,
        4 => {
            let u2 = u * u;
            (12.0 / (s2 * s2) - 48.0 * u2 / (s2 * s2 * s2) + 16.0 * u2 * u2 / (s2 * s2 * s2 * s2))
                * e
        }
        _ => panic!("gaussian derivative order {order} out of range"),
    }
}

impl Kernel1d for RbfKernel {
    fn eval(&self, a: f64, da: usize, b: f64, db: usize) -> f64 {
        debug_assert!(da <= MAX_ARG_DERIV && db <= MAX_ARG_DERIV);
        let sign = if db.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * gaussian_derivative(a - b, self.sigma * self.sigma, da + db)
    }
}

/// `exp(-[(x1-x2)^2 + (y1-y2)^2] / sigma^2)`.
#[derive(Debug, Clone, Copy)]
pub struct RbfKernel2d {
    pub sigma: f64,
}

impl Kernel2d for RbfKernel2d {
    fn eval(&self, p: (f64, f64), dp: (usize, usize), q: (f64, f64), dq: (usize, usize)) -> f64 {
        debug_assert!(dp.0 + dp.1 <= MAX_ARG_DERIV && dq.0 + dq.1 <= MAX_ARG_DERIV);
        let s2 = self.sigma * self.sigma;
        let sign_x = if dq.0.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sign_y = if dq.1.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign_x
            * gaussian_derivative(p.0 - q.0, s2, dp.0 + dq.0)
            * sign_y
            * gaussian_derivative(p.1 - q.1, s2, dp.1 + dq.1)
    }
}

/// The four kernel blocks of the first-order dual systems, elementwise over
/// `ti x tj`:
///
/// * `k`   — `K(ti, tj)`
/// * `k1`  — `phi'(ti)^T phi(tj)  = -2(ti-tj)/sigma^2 * K`
/// * `k1t` — `phi(ti)^T phi'(tj)  = +2(ti-tj)/sigma^2 * K`
/// * `k11` — `phi'(ti)^T phi'(tj) = [2/sigma^2 - 4(ti-tj)^2/sigma^4] * K`
#[derive(Debug, Clone)]
pub struct KernelBlocks {
    pub k: DMatrix<f64>,
    pub k1: DMatrix<f64>,
    pub k1t: DMatrix<f64>,
    pub k11: DMatrix<f64>,
}

pub fn rbf_kernel_block(ti: &[f64], tj: &[f64], sigma: f64) -> Result<KernelBlocks> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!("kernel bandwidth must be positive, got {sigma}")));
    }
    let kern = RbfKernel { sigma };
    let build = |da: usize, db: usize| {
        DMatrix::from_fn(ti.len(), tj.len(), |r, c| kern.eval(ti[r], da, tj[c], db))
    };
    Ok(KernelBlocks { k: build(0, 0), k1: build(1, 0), k1t: build(0, 1), k11: build(1, 1) })
}

/// Derivative multi-index pair for the 2-D block op: orders of the first
/// argument `(x1, y1)` and of the second `(x2, y2)`.
pub type DerivOrders2d = ((usize, usize), (usize, usize));

/// All requested partial-derivative matrices of the 2-D kernel over
/// `pi x pj`. Each argument's total order is capped at two, which covers
/// every product arising from Laplacian-Laplacian inner products.
pub fn rbf_kernel_2d_block(
    pi: &[(f64, f64)],
    pj: &[(f64, f64)],
    sigma: f64,
    orders: &[DerivOrders2d],
) -> Result<BTreeMap<DerivOrders2d, DMatrix<f64>>> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!("kernel bandwidth must be positive, got {sigma}")));
    }
    for &(dp, dq) in orders {
        if dp.0 + dp.1 > MAX_ARG_DERIV || dq.0 + dq.1 > MAX_ARG_DERIV {
            return Err(Error::UnsupportedOrder {
                order: (dp.0 + dp.1).max(dq.0 + dq.1),
                max: MAX_ARG_DERIV,
            });
        }
    }
    let kern = RbfKernel2d { sigma };
    let mut map = BTreeMap::new();
    for &(dp, dq) in orders {
        let m = DMatrix::from_fn(pi.len(), pj.len(), |r, c| kern.eval(pi[r], dp, pj[c], dq));
        map.insert((dp, dq), m);
    }
    Ok(map)
}

/// One term of a formal linear combination of (derivatives of) feature maps,
/// `coeff * phi^(deriv)(point)`. The dual solvers express every vector that
/// appears in their stationarity conditions in this form and take inner
/// products through the kernel.
#[derive(Debug, Clone, Copy)]
pub struct FeatureTerm {
    pub point: f64,
    pub deriv: usize,
    pub coeff: f64,
}

impl FeatureTerm {
    pub fn new(point: f64, deriv: usize, coeff: f64) -> Self {
        FeatureTerm { point, deriv, coeff }
    }
}

/// Inner product of two feature combinations through a 1-D kernel.
pub fn feature_inner(a: &[FeatureTerm], b: &[FeatureTerm], kernel: &impl Kernel1d) -> f64 {
    let mut sum = 0.0;
    for ta in a {
        for tb in b {
            sum += ta.coeff * tb.coeff * kernel.eval(ta.point, ta.deriv, tb.point, tb.deriv);
        }
    }
    sum
}

/// 2-D analogue of [`FeatureTerm`].
#[derive(Debug, Clone, Copy)]
pub struct FeatureTerm2d {
    pub point: (f64, f64),
    pub deriv: (usize, usize),
    pub coeff: f64,
}

impl FeatureTerm2d {
    pub fn new(point: (f64, f64), deriv: (usize, usize), coeff: f64) -> Self {
        FeatureTerm2d { point, deriv, coeff }
    }
}

pub fn feature_inner_2d(a: &[FeatureTerm2d], b: &[FeatureTerm2d], kernel: &impl Kernel2d) -> f64 {
    let mut sum = 0.0;
    for ta in a {
        for tb in b {
            sum += ta.coeff * tb.coeff * kernel.eval(ta.point, ta.deriv, tb.point, tb.deriv);
        }
    }
    sum
}
