//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Orthonormal basis of the (numerical) nullspace of `m`, as columns.
///
/// Computed from the Hermitian eigendecomposition of `mᴴ m` (nalgebra's thin
/// SVD cannot produce the cokernel of a wide matrix); `rel_tol` cuts on the
/// eigenvalues of `mᴴ m` relative to the largest one.
pub fn kernel_basis(m: &DMatrix<Complex64>, rel_tol: f64) -> DMatrix<Complex64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let h = m.adjoint() * m;
    let eig = h.symmetric_eigen();
    let emax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let tol = rel_tol * emax.max(1e-300);
    let keep: Vec<usize> = (0..cols).filter(|&i| eig.eigenvalues[i] <= tol).collect();
    let mut out = DMatrix::zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &eig.eigenvectors.column(i));
    }
    out
}

/// Real 2m x 2n embedding `X + iY ↦ [[X, -Y], [Y, X]]`.
///
/// nalgebra's complex SVD solve loses ~8 digits even on well-conditioned
/// systems, so least-squares work goes through the real embedding where the
/// real SVD is accurate.
fn real_embedding(a: &DMatrix<Complex64>) -> nalgebra::DMatrix<f64> {
    let (m, n) = a.shape();
    let mut out = nalgebra::DMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + m, j)] = z.im;
            out[(i + m, j + n)] = z.re;
        }
    }
    out
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> DVector<Complex64> {
    let (m, n) = a.shape();
    if n == 0 {
        return DVector::zeros(0);
    }
    let ar = real_embedding(a);
    let mut br = nalgebra::DVector::zeros(2 * m);
    for i in 0..m {
        br[i] = b[i].re;
        br[i + m] = b[i].im;
    }
    let svd = ar.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let xr = svd.solve(&br, 1e-13 * smax.max(1e-300)).expect("factors requested");
    DVector::from_fn(n, |j, _| Complex64::new(xr[j], xr[j + n]))
}

/// Numerical rank with a relative singular-value cutoff.
pub fn rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = real_embedding(m).svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    // each complex singular value appears twice in the embedding
    svd.singular_values.iter().filter(|&&s| s > rel_tol * smax).count() / 2
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = real_embedding(m).svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // deduplicate the doubled spectrum
    sv.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_projection() {
        // rank-1 projector on C^2 has a 1-dimensional kernel
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let k = kernel_basis(&m, 1e-12);
        assert_eq!(k.ncols(), 1);
        assert!((&m * &k).norm() < 1e-14);
        assert_eq!(rank(&m, 1e-12), 1);
    }

    #[test]
    fn least_squares_consistent_system() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        let x = DVector::from_vec(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)]);
        let b = &a * &x;
        let sol = least_squares(&a, &b);
        assert!((sol - x).norm() < 1e-12);
    }
}
