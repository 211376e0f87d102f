//! Chebyshev polynomial basis `T_0 .. T_{m-1}` and its derivatives, built
//! columnwise from the three-term recurrence.
//!
//! Derivatives are taken with respect to the Chebyshev coordinate `x`; a
//! caller working in the problem domain multiplies the k-th derivative by
//! `c^k` where `c` is the grid's affine map constant.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::CollocationGrid;

/// Highest derivative order the basis supports; the second-order problems
/// need at most two derivatives, the kernels up to four.
pub const MAX_DERIV: usize = 4;

/// Values (and requested `x`-derivatives) of `T_0 .. T_{m-1}` at a set of
/// points, one row per point.
#[derive(Debug, Clone)]
pub struct BasisMatrix {
    /// `(rows) x m` matrix of polynomial values.
    pub values: DMatrix<f64>,
    /// `derivs[k - 1]` holds the k-th `x`-derivatives, `k = 1..=max_deriv`.
    pub derivs: Vec<DMatrix<f64>>,
}

impl BasisMatrix {
    /// k-th derivative matrix, `k >= 1`.
    pub fn deriv(&self, k: usize) -> &DMatrix<f64> {
        &self.derivs[k - 1]
    }
}

/// Basis evaluated at the grid's Chebyshev points.
pub fn chebyshev_basis(grid: &CollocationGrid, m: usize, max_deriv: usize) -> Result<BasisMatrix> {
    chebyshev_basis_at(grid.x_points(), m, max_deriv)
}

/// Basis evaluated at arbitrary points of `[-1, 1]` (or beyond, for
/// extrapolation).
pub fn chebyshev_basis_at(xs: &[f64], m: usize, max_deriv: usize) -> Result<BasisMatrix> {
    if m < 1 {
        return Err(Error::invalid("basis needs at least one polynomial"));
    }
    if max_deriv > MAX_DERIV {
        return Err(Error::UnsupportedOrder { order: max_deriv, max: MAX_DERIV });
    }
    let rows = xs.len();
    let mut values = DMatrix::zeros(rows, m);
    let mut derivs = vec![DMatrix::zeros(rows, m); max_deriv];
    for (row, &x) in xs.iter().enumerate() {
        let table = chebyshev_row(x, m, max_deriv)?;
        for j in 0..m {
            values[(row, j)] = table[0][j];
            for k in 1..=max_deriv {
                derivs[k - 1][(row, j)] = table[k][j];
            }
        }
    }
    Ok(BasisMatrix { values, derivs })
}

/// `T_j(x)` and derivatives at a single point: `table[k][j]` is the k-th
/// derivative of `T_j`, with `table[0]` the values.
///
/// Differentiating the recurrence `T_{j+1} = 2x T_j - T_{j-1}` k times gives
/// `T^(k)_{j+1} = 2x T^(k)_j + 2k T^(k-1)_j - T^(k)_{j-1}`.
pub fn chebyshev_row(x: f64, m: usize, max_deriv: usize) -> Result<Vec<Vec<f64>>> {
    if m < 1 {
        return Err(Error::invalid("basis needs at least one polynomial"));
    }
    if max_deriv > MAX_DERIV {
        return Err(Error::UnsupportedOrder { order: max_deriv, max: MAX_DERIV });
    }
    let mut table = vec![vec![0.0; m]; max_deriv + 1];
    table[0][0] = 1.0;
    if m > 1 {
        table[0][1] = x;
        if max_deriv >= 1 {
            table[1][1] = 1.0;
        }
    }
    for j in 2..m {
        table[0][j] = 2.0 * x * table[0][j - 1] - table[0][j - 2];
        for k in 1..=max_deriv {
            table[k][j] =
                2.0 * x * table[k][j - 1] + 2.0 * k as f64 * table[k - 1][j - 1] - table[k][j - 2];
        }
    }
    Ok(table)
}
