//! Collocation grids and the affine map between the problem domain
//! `[t0, tf]` and the Chebyshev domain `[-1, 1]`.

use crate::error::{Error, Result};

/// Chebyshev-Gauss-Lobatto abscissae together with their images in the
/// problem domain.
///
/// The grid holds `n_intervals + 1` points `x_i = -cos(i*pi/N)` in
/// `[-1, 1]` and the mapped points `t_i = t0 + (x_i + 1)/c`, where
/// `c = 2/(tf - t0)` is the constant Jacobian of the affine map.
#[derive(Debug, Clone)]
pub struct CollocationGrid {
    n_intervals: usize,
    t_points: Vec<f64>,
    x_points: Vec<f64>,
    scale_c: f64,
    t0: f64,
    tf: f64,
}

impl CollocationGrid {
    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Grid points in the problem domain, ascending, `t_points[0] == t0`.
    pub fn t_points(&self) -> &[f64] {
        &self.t_points
    }

    /// Grid points in `[-1, 1]`, ascending, endpoints exactly `-1` and `1`.
    pub fn x_points(&self) -> &[f64] {
        &self.x_points
    }

    /// `dx/dt` of the affine map.
    pub fn scale_c(&self) -> f64 {
        self.scale_c
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    /// Maps a domain point into the Chebyshev coordinate.
    pub fn map_to_x(&self, t: f64) -> f64 {
        -1.0 + self.scale_c * (t - self.t0)
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.tf.abs().max(self.t0.abs()));
        t >= self.t0 - tol && t <= self.tf + tol
    }
}

/// Builds the Chebyshev-Gauss-Lobatto grid of `n` intervals on `[t0, tf]`.
///
/// `x_i = -cos(i*pi/N)` is evaluated through `sin` so that the endpoints and
/// (for even `N`) the midpoint are exact and the grid is exactly symmetric.
pub fn make_collocation_grid(n: usize, t0: f64, tf: f64) -> Result<CollocationGrid> {
    if n < 1 {
        return Err(Error::invalid("collocation grid needs at least one interval"));
    }
    if !t0.is_finite() || !tf.is_finite() || tf <= t0 {
        return Err(Error::invalid(format!("bad interval [{t0}, {tf}]")));
    }
    let scale_c = 2.0 / (tf - t0);
    let nf = n as f64;
    let mut x_points = Vec::with_capacity(n + 1);
    let mut t_points = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // -cos(i*pi/N) == sin(pi*(2i - N)/(2N))
        let x = (std::f64::consts::PI * (2.0 * i as f64 - nf) / (2.0 * nf)).sin();
        x_points.push(x);
        t_points.push(t0 + (x + 1.0) / scale_c);
    }
    Ok(CollocationGrid { n_intervals: n, t_points, x_points, scale_c, t0, tf })
}

/// Uniform partition of `[t0, tf]` into `n` sub-intervals (`n + 1` points).
/// This is the training grid used by the kernel solvers.
pub fn uniform_points(n: usize, t0: f64, tf: f64) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::invalid("uniform grid needs at least one interval"));
    }
    if !t0.is_finite() || !tf.is_finite() || tf <= t0 {
        return Err(Error::invalid(format!("bad interval [{t0}, {tf}]")));
    }
    let h = (tf - t0) / n as f64;
    let mut pts: Vec<f64> = (0..=n).map(|i| t0 + i as f64 * h).collect();
    pts[n] = tf;
    Ok(pts)
}

/// `count` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    let h = (b - a) / (count - 1) as f64;
    let mut pts: Vec<f64> = (0..count).map(|i| a + i as f64 * h).collect();
    pts[count - 1] = b;
    pts
}

/// Midpoints of consecutive grid points; the deterministic validation set
/// used by hyperparameter tuning.
pub fn midpoints(points: &[f64]) -> Vec<f64> {
    points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}
