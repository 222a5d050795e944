//! Seed-controlled random generators for forms, metrics and unitary frames.
//!
//! Everything downstream (positivity dictionaries, verification suites,
//! feasibility searches) draws through these helpers so that a run is fully
//! reproducible from its seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::exterior::{Basis, Bidegree, Form};
use crate::metric::HermitianMetric;

/// Uniform complex coefficients in the unit box on every basis monomial.
pub fn random_form(rng: &mut impl Rng, n: usize, bidegree: Bidegree) -> Form {
    let basis = Basis::new(n, bidegree);
    let mut f = Form::zero(n, bidegree).expect("sampled bidegree fits");
    for (i, j) in &basis.pairs {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f.set(i.clone(), j.clone(), c);
    }
    f
}

/// Random real (p,p)-form: a random form symmetrized with its conjugate.
pub fn random_real_form(rng: &mut impl Rng, n: usize, p: usize) -> Form {
    let f = random_form(rng, n, Bidegree::new(p, p));
    f.add(&f.conjugate()).expect("conjugate of (p,p) has the same bidegree")
        .scaled(Complex64::new(0.5, 0.0))
}

/// Standard complex Gaussian matrix.
pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * u2.cos(), r * u2.sin())
    })
}

/// Haar-ish random unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let g = random_complex_matrix(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix the phase ambiguity so the distribution does not depend on QR details
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian positive-definite metric with eigenvalues in [lo, hi].
pub fn random_metric_in(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> HermitianMetric {
    let u = random_unitary(rng, n);
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        d[(j, j)] = Complex64::new(rng.gen_range(lo..hi), 0.0);
    }
    let m = &u * d * u.adjoint();
    HermitianMetric::new(m).expect("congruence of a positive diagonal is positive definite")
}

/// Random well-conditioned metric (eigenvalues in [0.4, 2.5]).
pub fn random_metric(rng: &mut impl Rng, n: usize) -> HermitianMetric {
    random_metric_in(rng, n, 0.4, 2.5)
}

/// Random ω-primitive form of the given bidegree (p+q <= n), sampled from a
/// basis of ker Λ_ω.
pub fn random_primitive_form(
    rng: &mut impl Rng,
    ops: &crate::metric::MetricOps,
    bd: Bidegree,
) -> Form {
    if bd.p == 0 || bd.q == 0 {
        // Λ vanishes identically on (p,0) and (0,q) forms
        return random_form(rng, ops.n(), bd);
    }
    let basis = crate::linalg::kernel_basis(ops.contract_matrix(bd), 1e-10);
    let y = nalgebra::DVector::from_fn(basis.ncols(), |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Form::from_dense(ops.basis(bd), &(basis * y))
}
