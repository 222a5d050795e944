//! Non-negative least squares by the Lawson-Hanson active-set method.

use nalgebra::{DMatrix, DVector};

/// Solves `min ‖a x - b‖` subject to `x >= 0`.
///
/// Returns the weight vector; the caller judges the residual.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    if n == 0 {
        return x;
    }
    let mut passive = vec![false; n];
    let scale = a.amax().max(1e-300) * b.amax().max(1e-300);
    let tol = 1e-12 * scale;

    let solve_passive = |passive: &[bool], x_out: &mut DVector<f64>| {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let mut sub = DMatrix::zeros(a.nrows(), cols.len());
        for (k, &j) in cols.iter().enumerate() {
            sub.set_column(k, &a.column(j));
        }
        let svd = sub.svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let z = svd.solve(b, 1e-12 * smax.max(1e-300)).expect("factors requested");
        x_out.fill(0.0);
        for (k, &j) in cols.iter().enumerate() {
            x_out[j] = z[k];
        }
    };

    for _ in 0..max_iter {
        let w = a.transpose() * (b - a * &x);
        let mut best = None;
        for j in 0..n {
            if !passive[j] && w[j] > tol {
                if best.map_or(true, |(_, wb)| w[j] > wb) {
                    best = Some((j, w[j]));
                }
            }
        }
        let Some((j_new, _)) = best else { break };
        passive[j_new] = true;

        let mut z = DVector::zeros(n);
        for _ in 0..max_iter {
            solve_passive(&passive, &mut z);
            let mut alpha = f64::INFINITY;
            let mut blocked = false;
            for j in 0..n {
                if passive[j] && z[j] <= 0.0 {
                    blocked = true;
                    let denom = x[j] - z[j];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !blocked {
                x = z.clone();
                break;
            }
            let alpha = alpha.min(1.0).max(0.0);
            x = &x + (&z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol.max(1e-14) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}
