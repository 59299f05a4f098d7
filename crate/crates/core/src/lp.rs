//! Small dense revised simplex for support re-computation.
//!
//! Solves min Σ λ_k c_k subject to Σ λ_k a_k = b, λ ≥ 0 with n ≤ 8 rows,
//! starting from a caller-supplied feasible column.

use nalgebra::{DMatrix, DVector};

/// Optimal value, or `None` if the iteration limit was hit or the problem is unbounded.
pub(crate) fn min_cost_combination(
    columns: &[DVector<f64>],
    costs: &[f64],
    target: &DVector<f64>,
    start: usize,
) -> Option<f64> {
    let n = target.len();
    // Basis: the start column (carrying all the mass) plus columns completing a nonsingular basis.
    let mut basis = vec![start];
    let mut mat = DMatrix::<f64>::zeros(n, n);
    mat.set_column(0, &columns[start]);
    for (k, col) in columns.iter().enumerate() {
        if basis.len() == n {
            break;
        }
        if basis.contains(&k) {
            continue;
        }
        let c = basis.len();
        let mut trial = mat.columns(0, c + 1).into_owned();
        trial.set_column(c, col);
        if trial.clone().svd(false, false).singular_values.min() > 1e-6 {
            mat.set_column(c, col);
            basis.push(k);
        }
    }
    if basis.len() < n {
        return None;
    }
    let mut x = mat.clone().lu().solve(target)?;
    for _ in 0..(50 * columns.len()).max(200) {
        let cb = DVector::from_iterator(n, basis.iter().map(|&k| costs[k]));
        let y = mat.transpose().lu().solve(&cb)?;
        // Bland's rule: lowest index with negative reduced cost.
        let entering = (0..columns.len())
            .find(|&k| !basis.contains(&k) && costs[k] - y.dot(&columns[k]) < -1e-12);
        let Some(e) = entering else {
            return Some(basis.iter().zip(x.iter()).map(|(&k, xk)| costs[k] * xk).sum());
        };
        let d = mat.clone().lu().solve(&columns[e])?;
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..n {
            if d[r] > 1e-12 {
                let ratio = x[r].max(0.0) / d[r];
                let better = match leave {
                    None => true,
                    Some((lr, best)) => ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, theta) = leave?;
        for j in 0..n {
            x[j] -= theta * d[j];
        }
        x[r] = theta;
        basis[r] = e;
        mat.set_column(r, &columns[e]);
    }
    None
}
