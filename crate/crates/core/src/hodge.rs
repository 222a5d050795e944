//! Lefschetz decomposition into primitive components and the explicit
//! factorial-coefficient identities tying it to the Hodge star and the
//! contraction operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{i_power, Bidegree, Form};
use crate::linalg::{kernel_basis, least_squares};
use crate::metric::{wedge_operator, MetricOps};

pub fn factorial(k: usize) -> f64 {
    (2..=k).map(|x| x as f64).product()
}

/// Lefschetz decomposition `ζ = Σ_l ζ_prim^{(l)} ∧ ω^l` of an (r,r)-form,
/// with each component ω-primitive of bidegree (r-l, r-l).
#[derive(Debug, Clone)]
pub struct PrimitiveDecomposition {
    r: usize,
    components: Vec<Form>,
}

impl PrimitiveDecomposition {
    pub fn r(&self) -> usize {
        self.r
    }

    /// Component at level `l`, of bidegree (r-l, r-l).
    pub fn component(&self, l: usize) -> &Form {
        &self.components[l]
    }

    pub fn components(&self) -> &[Form] {
        &self.components
    }

    /// Reassembles `Σ_l ζ_prim^{(l)} ∧ ω^l`.
    pub fn reconstruct(&self, ops: &MetricOps) -> Form {
        let n = ops.n();
        let omega = ops.metric().fiber_form();
        let mut acc = Form::zero(n, Bidegree::new(self.r, self.r)).expect("2r <= n implies r <= n");
        for (l, comp) in self.components.iter().enumerate() {
            let term = comp
                .wedge(&omega.wedge_power(l).expect("l <= r <= n"))
                .expect("bidegrees add up to (r,r)");
            acc = acc.add(&term).expect("same bidegree");
        }
        acc
    }

    /// Largest contraction norm `‖Λ ζ_prim^{(l)}‖` over all components.
    pub fn max_contraction_residual(&self, ops: &MetricOps) -> f64 {
        self.components
            .iter()
            .map(|c| ops.norm(&ops.contract(c)))
            .fold(0.0, f64::max)
    }
}

fn check_square_low(zeta: &Form, n: usize) -> Result<usize> {
    let bd = zeta.bidegree();
    if bd.p != bd.q {
        return Err(Error::Precondition(format!("expected an (r,r)-form, got {bd}")));
    }
    let r = bd.p;
    if 2 * r > n {
        return Err(Error::Precondition(format!(
            "decomposition formulas require 2r <= n (r = {r}, n = {n})"
        )));
    }
    Ok(r)
}

/// Decomposes an (r,r)-form into its primitive components.
///
/// The top two components come from the closed-form contraction identities
///   ζ_prim^{(r)}   = (n-r)!/(n! r!) Λ^r ζ
///   ζ_prim^{(r-1)} = (n-r-1)!/((n-2)!(r-1)!) (Λ^{r-1}ζ - (Λ^r ζ)/n · ω),
/// the lower ones from an exact least-squares solve over primitive bases.
pub fn primitive_decompose(ops: &MetricOps, zeta: &Form) -> Result<PrimitiveDecomposition> {
    let n = ops.n();
    let r = check_square_low(zeta, n)?;
    if r == 0 {
        return Ok(PrimitiveDecomposition { r, components: vec![zeta.clone()] });
    }

    let omega = ops.metric().fiber_form();
    let lam_rm1 = ops.contract_power(zeta, r - 1); // (1,1)-form
    let lam_r = ops.contract(&lam_rm1).scalar_value().expect("Λ^r ζ is a function");

    let top = Form::constant(n, lam_r * (factorial(n - r) / (factorial(n) * factorial(r))));

    let coeff = factorial(n - r - 1) / (factorial(n - 2) * factorial(r - 1));
    let sub = lam_rm1
        .sub(&omega.scaled(lam_r / n as f64))
        .expect("both are (1,1)-forms")
        .scaled(Complex64::new(coeff, 0.0));

    let mut components = vec![Form::zero(n, Bidegree::new(0, 0)).unwrap(); r + 1];
    components[r] = top;
    components[r - 1] = sub;

    if r >= 2 {
        // residual carries only levels l <= r-2
        let mut residual = zeta.clone();
        for l in [r - 1, r] {
            let term = components[l]
                .wedge(&omega.wedge_power(l).expect("fits"))
                .expect("bidegree (r,r)");
            residual = residual.sub(&term).expect("same bidegree");
        }
        let lower = solve_components_ls(ops, &residual, r, r - 2)?;
        for (l, comp) in lower.into_iter().enumerate() {
            components[l] = comp;
        }
    }

    Ok(PrimitiveDecomposition { r, components })
}

/// Independent route: solve for all primitive components at once by
/// least squares over primitive bases, with no closed-form shortcuts.
pub fn primitive_decompose_ls(ops: &MetricOps, zeta: &Form) -> Result<PrimitiveDecomposition> {
    let r = check_square_low(zeta, ops.n())?;
    let components = solve_components_ls(ops, zeta, r, r)?;
    Ok(PrimitiveDecomposition { r, components })
}

/// Least-squares fit of `target = Σ_{l<=lmax} x_l ∧ ω^l` with each `x_l`
/// constrained to the primitive subspace of bidegree (r-l, r-l).
fn solve_components_ls(
    ops: &MetricOps,
    target: &Form,
    r: usize,
    lmax: usize,
) -> Result<Vec<Form>> {
    let bd = Bidegree::new(r, r);
    let omega = ops.metric().fiber_form();
    let target_basis = ops.basis(bd);
    let mut prim_bases: Vec<DMatrix<Complex64>> = Vec::new();
    let mut stacked: Vec<DMatrix<Complex64>> = Vec::new();
    let mut total_cols = 0;
    for l in 0..=lmax {
        let low_bd = Bidegree::new(r - l, r - l);
        let prim = if low_bd.p == 0 {
            DMatrix::identity(1, 1)
        } else {
            kernel_basis(ops.contract_matrix(low_bd), 1e-10)
        };
        let omega_l = omega.wedge_power(l).expect("fits");
        let wedge_mat = wedge_operator(&omega_l, ops.basis(low_bd), target_basis);
        total_cols += prim.ncols();
        stacked.push(&wedge_mat * &prim);
        prim_bases.push(prim);
    }
    let mut a = DMatrix::zeros(target_basis.dim(), total_cols);
    let mut col = 0;
    for ab in &stacked {
        a.view_mut((0, col), (ab.nrows(), ab.ncols())).copy_from(ab);
        col += ab.ncols();
    }
    let y = least_squares(&a, &target.to_dense(target_basis));
    let mut out = Vec::with_capacity(lmax + 1);
    let mut offset = 0;
    for (l, prim) in prim_bases.iter().enumerate() {
        let cols = prim.ncols();
        let yl = y.rows(offset, cols).into_owned();
        let comp_dense = prim * yl;
        out.push(Form::from_dense(ops.basis(Bidegree::new(r - l, r - l)), &comp_dense));
        offset += cols;
    }
    Ok(out)
}

/// `⋆_ω(ζ ∧ ω_{n-r-1})` computed through the contraction identity
/// `(1/(r-1)!) (-Λ^{r-1} ζ + (Λ^r ζ)/r · ω)` instead of the Hodge star.
pub fn star_wedge_power(ops: &MetricOps, zeta: &Form, r: usize) -> Result<Form> {
    let n = ops.n();
    if r == 0 {
        return Err(Error::Precondition("degenerate r = 0".into()));
    }
    if zeta.bidegree() != Bidegree::new(r, r) {
        return Err(Error::Precondition(format!(
            "expected an ({r},{r})-form, got {}",
            zeta.bidegree()
        )));
    }
    if 2 * r > n {
        return Err(Error::Precondition(format!("requires 2r <= n (r = {r}, n = {n})")));
    }
    let lam_rm1 = ops.contract_power(zeta, r - 1);
    let lam_r = ops.contract(&lam_rm1).scalar_value().expect("function");
    let omega = ops.metric().fiber_form();
    let inner = omega.scaled(lam_r / r as f64).sub(&lam_rm1).expect("both (1,1)");
    Ok(inner.scaled(Complex64::new(1.0 / factorial(r - 1), 0.0)))
}

/// Same quantity through the direct pipeline `⋆_ω` of `ζ ∧ ω^{n-r-1}/(n-r-1)!`.
pub fn star_wedge_direct(ops: &MetricOps, zeta: &Form, r: usize) -> Result<Form> {
    let n = ops.n();
    let omega_pow = ops.metric().power_normalized(n - r - 1);
    Ok(ops.hodge_star(&zeta.wedge(&omega_pow)?))
}

/// Residual of the commutation identity `[L^r, Λ] u = r(k-n+r-1) L^{r-1} u`
/// on a k-form `u`, in the metric norm.
pub fn commutation_defect(ops: &MetricOps, u: &Form, r: usize) -> Result<f64> {
    let n = ops.n();
    let bd = u.bidegree();
    if r == 0 {
        return Err(Error::Precondition("commutation identity needs r >= 1".into()));
    }
    if bd.p + r > n || bd.q + r > n {
        return Err(Error::BidegreeOutOfRange { bidegree: Bidegree::new(bd.p + r, bd.q + r), n });
    }
    let k = bd.total() as f64;

    let mut lr_u = u.clone();
    for _ in 0..r {
        lr_u = ops.lefschetz(&lr_u)?;
    }
    let lam_lr_u = ops.contract(&lr_u);

    let lr_lam_u = if bd.p >= 1 && bd.q >= 1 {
        let mut t = ops.contract(u);
        for _ in 0..r {
            t = ops.lefschetz(&t)?;
        }
        t
    } else {
        // Λu vanishes on (p,0) and (0,q) forms
        Form::zero(n, Bidegree::new(bd.p + r - 1, bd.q + r - 1))?
    };

    let factor = r as f64 * (k - n as f64 + r as f64 - 1.0);
    let mut lpow = u.clone();
    for _ in 0..r - 1 {
        lpow = ops.lefschetz(&lpow)?;
    }
    let rhs = lpow.scaled(Complex64::new(factor, 0.0));

    let defect = lr_lam_u.sub(&lam_lr_u)?.sub(&rhs)?;
    Ok(ops.norm(&defect))
}

/// Residual of the primitive-form star formula
/// `⋆ v = (-1)^{k(k+1)/2} i^{p-q} ω^{n-p-q} ∧ v / (n-p-q)!` for ω-primitive v.
pub fn primitive_star_defect(ops: &MetricOps, v: &Form) -> Result<f64> {
    let n = ops.n();
    let bd = v.bidegree();
    let k = bd.total();
    if k > n {
        return Err(Error::Precondition(format!("primitive forms need p+q <= n, got {bd}")));
    }
    let star = ops.hodge_star(v);
    let sign = if (k * (k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let ipow = i_power((bd.p as i64 - bd.q as i64).rem_euclid(4) as usize);
    let omega_pow = ops.metric().fiber_form().wedge_power(n - k)?;
    let rhs = omega_pow
        .wedge(v)?
        .scaled(ipow * sign / factorial(n - k));
    Ok(ops.norm(&star.sub(&rhs)?))
}

/// Residual of the identity expressing the level r-1 primitive component of
/// an (r,r)-form through the primitive part of its iterated contraction:
/// `ζ_prim^{(r-1)} = (n-r-1)!/((n-2)!(r-1)!) (Λ^{r-1} ζ)_prim`.
///
/// The left side is taken from the independent least-squares decomposition
/// so the two routes share no code path.
pub fn contracted_primitive_defect(ops: &MetricOps, zeta: &Form) -> Result<f64> {
    let n = ops.n();
    let r = check_square_low(zeta, n)?;
    if r < 1 {
        return Err(Error::Precondition("needs r >= 1".into()));
    }
    let decomp = primitive_decompose_ls(ops, zeta)?;
    let w = ops.contract_power(zeta, r - 1); // (1,1)
    let trace = ops.contract(&w).scalar_value().expect("function");
    let w_prim = w.sub(&ops.metric().fiber_form().scaled(trace / n as f64))?;
    let coeff = factorial(n - r - 1) / (factorial(n - 2) * factorial(r - 1));
    let rhs = w_prim.scaled(Complex64::new(coeff, 0.0));
    Ok(ops.norm(&decomp.component(r - 1).sub(&rhs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::HermitianMetric;
    use crate::sample::{random_form, random_metric, random_primitive_form, random_real_form};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decompose_rejects_large_r() {
        let ops = MetricOps::new(&HermitianMetric::euclidean(3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zeta = random_form(&mut rng, 3, Bidegree::new(2, 2));
        assert!(primitive_decompose(&ops, &zeta).is_err());
    }

    #[test]
    fn decompose_primitive_form_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=4usize {
            let ops = MetricOps::new(&random_metric(&mut rng, n));
            let r = 1;
            let v = random_primitive_form(&mut rng, &ops, Bidegree::new(r, r));
            let d = primitive_decompose(&ops, &v).unwrap();
            assert!(d.component(0).max_diff(&v) < 1e-10 * (1.0 + v.coeff_norm()));
            assert!(ops.norm(d.component(1)) < 1e-10 * (1.0 + v.coeff_norm()));
        }
    }

    #[test]
    fn decompose_omega_is_pure_trace() {
        // ζ = ω -> ζ_prim^{(0)} = 0, ζ_prim^{(1)} = 1
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4usize {
            let metric = random_metric(&mut rng, n);
            let ops = MetricOps::new(&metric);
            let d = primitive_decompose(&ops, &metric.fiber_form()).unwrap();
            assert!(ops.norm(d.component(0)) < 1e-12);
            let one = d.component(1).scalar_value().unwrap();
            assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn decomposition_reconstructs_and_is_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=4usize {
            for r in 0..=n / 2 {
                for _ in 0..10 {
                    let ops = MetricOps::new(&random_metric(&mut rng, n));
                    let zeta = random_form(&mut rng, n, Bidegree::new(r, r));
                    let d = primitive_decompose(&ops, &zeta).unwrap();
                    let scale = 1.0 + ops.norm(&zeta);
                    assert!(
                        ops.norm(&d.reconstruct(&ops).sub(&zeta).unwrap()) <= 1e-12 * scale,
                        "reconstruction fails at n={n} r={r}"
                    );
                    assert!(d.max_contraction_residual(&ops) <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn closed_form_route_matches_pure_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ops = MetricOps::new(&random_metric(&mut rng, 4));
            let zeta = random_form(&mut rng, 4, Bidegree::new(2, 2));
            let a = primitive_decompose(&ops, &zeta).unwrap();
            let b = primitive_decompose_ls(&ops, &zeta).unwrap();
            for l in 0..=2 {
                assert!(
                    a.component(l).max_diff(b.component(l)) <= 1e-10 * (1.0 + zeta.coeff_norm()),
                    "component {l} differs between routes"
                );
            }
        }
    }

    #[test]
    fn commutation_identity_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=4usize {
            for _ in 0..25 {
                let p = rng.gen_range(0..=n);
                let q = rng.gen_range(0..=n);
                let max_r = (n - p).min(n - q);
                if max_r == 0 {
                    continue;
                }
                let r = rng.gen_range(1..=max_r);
                let ops = MetricOps::new(&random_metric(&mut rng, n));
                let u = random_form(&mut rng, n, Bidegree::new(p, q));
                let defect = commutation_defect(&ops, &u, r).unwrap();
                assert!(
                    defect <= 1e-10 * (1.0 + ops.norm(&u)),
                    "commutation defect {defect:.3e} at n={n} (p,q)=({p},{q}) r={r}"
                );
            }
        }
    }

    #[test]
    fn star_wedge_power_dual_pipelines_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4usize {
            for r in 1..=n / 2 {
                for _ in 0..10 {
                    let ops = MetricOps::new(&random_metric(&mut rng, n));
                    let zeta = random_real_form(&mut rng, n, r);
                    let formula = star_wedge_power(&ops, &zeta, r).unwrap();
                    let direct = star_wedge_direct(&ops, &zeta, r).unwrap();
                    assert!(
                        ops.norm(&formula.sub(&direct).unwrap())
                            <= 1e-10 * (1.0 + ops.norm(&zeta)),
                        "pipelines disagree at n={n} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn star_wedge_power_of_omega_power_is_positive_multiple_of_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=4usize {
            for r in 1..=n / 2 {
                let metric = random_metric(&mut rng, n);
                let ops = MetricOps::new(&metric);
                let zeta = metric.power_normalized(r);
                let result = star_wedge_power(&ops, &zeta, r).unwrap();
                let omega = metric.fiber_form();
                // result = c ω with c > 0: compare against the trace ratio
                let c = ops.inner_product(&result, &omega).unwrap() / Complex64::new(n as f64, 0.0);
                assert!(c.re > 0.0 && c.im.abs() < 1e-12);
                assert!(ops.norm(&result.sub(&omega.scaled(c)).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn star_wedge_power_primitive_input_kills_trace_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=4usize {
            for r in 1..=n / 2 {
                let ops = MetricOps::new(&random_metric(&mut rng, n));
                let v = random_primitive_form(&mut rng, &ops, Bidegree::new(r, r));
                let result = star_wedge_power(&ops, &v, r).unwrap();
                let expected = ops
                    .contract_power(&v, r - 1)
                    .scaled(Complex64::new(-1.0 / factorial(r - 1), 0.0));
                assert!(ops.norm(&result.sub(&expected).unwrap()) <= 1e-10 * (1.0 + ops.norm(&v)));
            }
        }
    }

    #[test]
    fn star_wedge_power_rejects_r_zero() {
        let ops = MetricOps::new(&HermitianMetric::euclidean(2));
        let zeta = Form::constant(2, Complex64::new(1.0, 0.0));
        assert!(star_wedge_power(&ops, &zeta, 0).is_err());
    }

    #[test]
    fn primitive_star_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 1..=4usize {
            for p in 0..=n {
                for q in 0..=n {
                    if p + q > n {
                        continue;
                    }
                    let ops = MetricOps::new(&random_metric(&mut rng, n));
                    let v = random_primitive_form(&mut rng, &ops, Bidegree::new(p, q));
                    let defect = primitive_star_defect(&ops, &v).unwrap();
                    assert!(
                        defect <= 1e-10 * (1.0 + ops.norm(&v)),
                        "primitive star defect {defect:.3e} at n={n} ({p},{q})"
                    );
                }
            }
        }
    }

    #[test]
    fn contracted_primitive_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4usize {
            for r in 1..=n / 2 {
                for _ in 0..10 {
                    let ops = MetricOps::new(&random_metric(&mut rng, n));
                    let zeta = random_form(&mut rng, n, Bidegree::new(r, r));
                    let defect = contracted_primitive_defect(&ops, &zeta).unwrap();
                    assert!(
                        defect <= 1e-10 * (1.0 + ops.norm(&zeta)),
                        "defect {defect:.3e} at n={n} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_primitive_forms_kill_high_omega_power() {
        // cross-check of the primitive sampler: v ∧ ω^{n-p-q+1} = 0
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 2..=4usize {
            let metric = random_metric(&mut rng, n);
            let ops = MetricOps::new(&metric);
            for p in 0..=n {
                for q in 0..=n {
                    if p + q > n || p + q == 0 {
                        continue;
                    }
                    let v = random_primitive_form(&mut rng, &ops, Bidegree::new(p, q));
                    if n - p - q + 1 + p > n || n - p - q + 1 + q > n {
                        continue;
                    }
                    let w = v
                        .wedge(&metric.fiber_form().wedge_power(n - p - q + 1).unwrap())
                        .unwrap();
                    assert!(w.coeff_norm() <= 1e-9 * (1.0 + v.coeff_norm()));
                }
            }
        }
    }
}
