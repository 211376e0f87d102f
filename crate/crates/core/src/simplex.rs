//! Downhill-simplex (Nelder-Mead) minimizer with the classic fminsearch
//! coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.

use crate::error::{Error, Result};

/// Default stopping tolerance on the simplex diameter.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default budget of objective evaluations.
pub const DEFAULT_MAX_EVALS: usize = 400;

/// Minimizes `objective` from `x0`, stopping when the simplex diameter
/// drops below `tol` or `max_evals` evaluations have been spent. Returns
/// the best vertex and its objective value.
///
/// Non-finite objective values during the search are treated as worst-case
/// and reflected away from; a non-finite value at `x0` is an error.
pub fn nelder_mead_minimize(
    mut objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    tol: f64,
    max_evals: usize,
) -> Result<(Vec<f64>, f64)> {
    if x0.is_empty() {
        return Err(Error::invalid("empty starting point"));
    }
    let n = x0.len();
    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(Error::invalid("objective is not finite at the starting point"));
    }

    // fminsearch-style initial simplex: 5% perturbation per coordinate.
    let mut verts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut fvals: Vec<f64> = vec![f0];
    let mut evals = 1;
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] = if v[i] != 0.0 { 1.05 * v[i] } else { 0.00025 };
        fvals.push(objective(&v));
        verts.push(v);
        evals += 1;
    }

    let cmp = |a: f64, b: f64| {
        // NaN sorts last so it is always replaced first.
        match (a.is_nan(), b.is_nan()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            _ => a.partial_cmp(&b).unwrap(),
        }
    };

    while evals < max_evals {
        // Order vertices by objective value.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| cmp(fvals[a], fvals[b]));
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| verts[i].clone()).collect();
        let ordered_f: Vec<f64> = idx.iter().map(|&i| fvals[i]).collect();
        verts = ordered;
        fvals = ordered_f;

        let diameter = verts[1..]
            .iter()
            .map(|v| {
                v.iter().zip(&verts[0]).map(|(a, b)| (a - b).abs()).fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if diameter < tol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| verts[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = verts[n].clone();
        let f_best = fvals[0];
        let f_second_worst = fvals[n - 1];
        let f_worst = fvals[n];

        let blend = |a: f64| -> Vec<f64> {
            // point = centroid + a * (centroid - worst)
            (0..n).map(|j| centroid[j] + a * (centroid[j] - worst[j])).collect()
        };

        let xr = blend(1.0);
        let fr = objective(&xr);
        evals += 1;

        if fr < f_best {
            let xe = blend(2.0);
            let fe = objective(&xe);
            evals += 1;
            if fe < fr {
                verts[n] = xe;
                fvals[n] = fe;
            } else {
                verts[n] = xr;
                fvals[n] = fr;
            }
        } else if fr < f_second_worst {
            verts[n] = xr;
            fvals[n] = fr;
        } else {
            let (xc, fc) = if fr < f_worst {
                // Outside contraction.
                let xc = blend(0.5);
                let fc = objective(&xc);
                (xc, fc)
            } else {
                // Inside contraction.
                let xc: Vec<f64> =
                    (0..n).map(|j| centroid[j] - 0.5 * (centroid[j] - worst[j])).collect();
                let fc = objective(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(f_worst) {
                verts[n] = xc;
                fvals[n] = fc;
            } else {
                // Shrink toward the best vertex.
                for i in 1..=n {
                    let v: Vec<f64> = (0..n)
                        .map(|j| verts[0][j] + 0.5 * (verts[i][j] - verts[0][j]))
                        .collect();
                    fvals[i] = objective(&v);
                    verts[i] = v;
                    evals += 1;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if cmp(fvals[i], fvals[best]) == std::cmp::Ordering::Less {
            best = i;
        }
    }
    Ok((verts[best].clone(), fvals[best]))
}
