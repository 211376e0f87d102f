//! Improved Euler (Heun) integration, used only to seed Newton iterations.

/// Integrates `y' = f(t, y)` across the given (possibly non-uniform) grid,
/// one Heun step per sub-interval. Returns the trajectory at every grid
/// point, starting from `y0`.
pub fn heun_trajectory(f: impl Fn(f64, f64) -> f64, t_points: &[f64], y0: f64) -> Vec<f64> {
    let mut ys = Vec::with_capacity(t_points.len());
    let mut y = y0;
    ys.push(y);
    for w in t_points.windows(2) {
        let (t, t_next) = (w[0], w[1]);
        let h = t_next - t;
        let k1 = f(t, y);
        let k2 = f(t_next, y + h * k1);
        y += 0.5 * h * (k1 + k2);
        ys.push(y);
    }
    ys
}
