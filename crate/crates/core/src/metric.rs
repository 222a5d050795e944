//! Hermitian metrics on C^n and the induced structure on (p,q)-forms:
//! inner products, volume form, Hodge star, Lefschetz operator and its
//! metric adjoint.
//!
//! All conventions are pinned by the defining identity
//! `u ∧ ⋆_γ v̄ = ⟨u,v⟩_γ dV_γ` with `dV_γ = γ^n/n!`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{combinations, i_power, Basis, Bidegree, Form, MultiIndex};

/// Positive-definite (1,1)-form `γ = i Σ γ_{jk̄} dz_j ∧ dz̄_k`,
/// stored through its Hermitian coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetric {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl HermitianMetric {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::NotPositiveDefinite("matrix not square".into()));
        }
        let herm_defect = (&matrix - matrix.adjoint()).norm();
        if herm_defect > 1e-12 * (1.0 + matrix.norm()) {
            return Err(Error::NotPositiveDefinite(format!(
                "Hermitian defect {herm_defect:.3e}"
            )));
        }
        let eig = matrix.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("min eigenvalue {min_eig:.3e}")));
        }
        // symmetrize exactly so downstream arithmetic sees a true Hermitian matrix
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(HermitianMetric { n, matrix: sym })
    }

    pub fn euclidean(n: usize) -> Self {
        HermitianMetric { n, matrix: DMatrix::identity(n, n) }
    }

    /// Diagonal metric with the given positive entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &e) in entries.iter().enumerate() {
            m[(j, j)] = Complex64::new(e, 0.0);
        }
        HermitianMetric::new(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// The metric as a (1,1)-form.
    pub fn fiber_form(&self) -> Form {
        Form::from_matrix(self.n, &self.matrix).expect("validated at construction")
    }

    /// `γ_p := γ^p / p!`.
    pub fn power_normalized(&self, p: usize) -> Form {
        let mut fact = 1.0;
        for k in 2..=p {
            fact *= k as f64;
        }
        self.fiber_form()
            .wedge_power(p)
            .expect("p <= n by construction")
            .scaled(Complex64::new(1.0 / fact, 0.0))
    }

    /// Volume form `dV_γ = γ^n / n!`.
    pub fn volume_form(&self) -> Form {
        self.power_normalized(self.n)
    }

    /// Coefficient of the volume form on `dz_{1..n} ∧ dz̄_{1..n}`.
    pub fn volume_coeff(&self) -> Complex64 {
        self.volume_form().top_coeff().expect("volume form is (n,n)")
    }

    /// Matrix of pairings `⟨dz_j, dz_k⟩_γ` of (1,0)-covectors.
    pub fn covector_gram(&self) -> DMatrix<Complex64> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .expect("positive definite at construction");
        inv.transpose()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.n)
            .map(|j| (0..self.n).map(|k| [self.matrix[(j, k)].re, self.matrix[(j, k)].im]).collect())
            .collect();
        json!({ "n": self.n, "matrix": rows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Serialization("expected object".into()))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Serialization("missing 'n'".into()))? as usize;
        let rows = obj
            .get("matrix")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Serialization("missing 'matrix'".into()))?;
        let mut m = DMatrix::zeros(n, n);
        for (j, row) in rows.iter().enumerate().take(n) {
            let row = row.as_array().ok_or_else(|| Error::Serialization("bad row".into()))?;
            for (k, e) in row.iter().enumerate().take(n) {
                let e = e.as_array().filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Serialization("bad entry".into()))?;
                m[(j, k)] = Complex64::new(
                    e[0].as_f64().unwrap_or(f64::NAN),
                    e[1].as_f64().unwrap_or(f64::NAN),
                );
            }
        }
        HermitianMetric::new(m)
    }
}

fn submatrix_det(m: &DMatrix<Complex64>, rows: &MultiIndex, cols: &MultiIndex) -> Complex64 {
    let k = rows.len();
    debug_assert_eq!(k, cols.len());
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut sub = DMatrix::zeros(k, k);
    for (a, &r) in rows.entries().iter().enumerate() {
        for (b, &c) in cols.entries().iter().enumerate() {
            sub[(a, b)] = m[(r as usize - 1, c as usize - 1)];
        }
    }
    sub.determinant()
}

/// Sign and check for `dz_A ∧ dz̄_B ∧ dz_C ∧ dz̄_D = σ dz_{A∪C} ∧ dz̄_{B∪D}`.
fn monomial_wedge_sign(
    a: &MultiIndex,
    b: &MultiIndex,
    c: &MultiIndex,
    d: &MultiIndex,
) -> Option<i32> {
    let (si, _) = a.merge(c)?;
    let (sj, _) = b.merge(d)?;
    let cross = b.len() * c.len();
    let cross_sign = if cross % 2 == 0 { 1 } else { -1 };
    Some(si * sj * cross_sign)
}

/// Precomputed operator matrices (Hodge star, Lefschetz, contraction,
/// Gram matrices) for one metric, over every bidegree of the fiber.
#[derive(Debug, Clone)]
pub struct MetricOps {
    metric: HermitianMetric,
    bases: BTreeMap<Bidegree, Basis>,
    grams: BTreeMap<Bidegree, DMatrix<Complex64>>,
    stars: BTreeMap<Bidegree, DMatrix<Complex64>>,
    lefschetz: BTreeMap<Bidegree, DMatrix<Complex64>>,
    contract: BTreeMap<Bidegree, DMatrix<Complex64>>,
}

impl MetricOps {
    pub fn new(metric: &HermitianMetric) -> Self {
        let n = metric.n();
        let mut bases = BTreeMap::new();
        for p in 0..=n {
            for q in 0..=n {
                let bd = Bidegree::new(p, q);
                bases.insert(bd, Basis::new(n, bd));
            }
        }

        let p_gram = metric.covector_gram();
        let mut grams = BTreeMap::new();
        for (bd, basis) in &bases {
            let dim = basis.dim();
            let mut g = DMatrix::zeros(dim, dim);
            for (a, (ia, ja)) in basis.pairs.iter().enumerate() {
                for (b, (ib, jb)) in basis.pairs.iter().enumerate() {
                    g[(a, b)] = submatrix_det(&p_gram, ia, ib)
                        * submatrix_det(&p_gram, ja, jb).conj();
                }
            }
            grams.insert(*bd, g);
        }

        // Unitary coframe ξ = A·dz with A^H A = G^T, so that γ = i Σ ξ_a ∧ ξ̄_a.
        let gt = metric.matrix().transpose();
        let chol = nalgebra::Cholesky::new(gt).expect("positive definite at construction");
        let a_mat: DMatrix<Complex64> = chol.l().adjoint();
        let a_inv = a_mat.clone().try_inverse().expect("triangular factor invertible");

        // Change of monomial basis dz -> ξ on the (p,0) part: columns indexed by
        // dz-monomials, rows by ξ-monomials, entries det(A^{-1}[I, K]).
        let mut hol_to_frame: Vec<DMatrix<Complex64>> = Vec::with_capacity(n + 1);
        let mut hol_from_frame: Vec<DMatrix<Complex64>> = Vec::with_capacity(n + 1);
        for p in 0..=n {
            let idx = combinations(n, p);
            let dim = idx.len();
            let mut to = DMatrix::zeros(dim, dim);
            let mut from = DMatrix::zeros(dim, dim);
            for (col, i) in idx.iter().enumerate() {
                for (row, k) in idx.iter().enumerate() {
                    to[(row, col)] = submatrix_det(&a_inv, i, k);
                    from[(row, col)] = submatrix_det(&a_mat, i, k);
                }
            }
            hol_to_frame.push(to);
            hol_from_frame.push(from);
        }

        let mut stars = BTreeMap::new();
        for (bd, basis) in &bases {
            let (p, q) = (bd.p, bd.q);
            let target = Bidegree::new(n - q, n - p);
            let tbasis = &bases[&target];
            // star of a frame monomial: ⋆(ξ_K ∧ ξ̄_L) = c(K,L) ξ_{∁L} ∧ ξ̄_{∁K}
            let mut star_frame = DMatrix::zeros(tbasis.dim(), basis.dim());
            for (col, (k_idx, l_idx)) in basis.pairs.iter().enumerate() {
                let cl = l_idx.complement(n);
                let ck = k_idx.complement(n);
                let sigma = monomial_wedge_sign(l_idx, k_idx, &cl, &ck)
                    .expect("complementary indices never overlap");
                debug_assert!(sigma == 1 || sigma == -1);
                let pq_sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
                let coeff = i_power(n * n) * pq_sign * sigma as f64;
                let row = tbasis
                    .position(&(cl, ck))
                    .expect("complement monomial is in the target basis");
                star_frame[(row, col)] = coeff;
            }
            // conjugate by the dz <-> ξ change of basis:
            // coeffs_ξ[(K,L)] = Σ_(I,J) det(A^{-1}[I,K]) conj(det(A^{-1}[J,L])) coeffs_dz[(I,J)]
            let to_frame = pq_transform(basis, &hol_to_frame[p], &hol_to_frame[q]);
            let from_frame = pq_transform(tbasis, &hol_from_frame[n - q], &hol_from_frame[n - p]);
            stars.insert(*bd, &from_frame * &star_frame * &to_frame);
        }

        let omega = metric.fiber_form();
        let mut lefschetz = BTreeMap::new();
        for (bd, basis) in &bases {
            if bd.p + 1 > n || bd.q + 1 > n {
                continue;
            }
            let target = Bidegree::new(bd.p + 1, bd.q + 1);
            lefschetz.insert(*bd, wedge_operator(&omega, basis, &bases[&target]));
        }

        // Λ on (p,q) is the Gram adjoint of L from (p-1,q-1). In matrix form,
        // with S := Gramᵀ the matrix of the sesquilinear pairing,
        //   M_Λ = S_{p-1,q-1}^{-1} M_L^H S_{p,q}.
        let mut contract = BTreeMap::new();
        for p in 1..=n {
            for q in 1..=n {
                let bd = Bidegree::new(p, q);
                let low = Bidegree::new(p - 1, q - 1);
                let l_mat = &lefschetz[&low];
                let s_low = grams[&low].transpose();
                let s_high = grams[&bd].transpose();
                let rhs = l_mat.adjoint() * s_high;
                let lam = nalgebra::Cholesky::new(s_low)
                    .expect("Gram matrices of a positive metric are positive definite")
                    .solve(&rhs);
                contract.insert(bd, lam);
            }
        }

        MetricOps { metric: metric.clone(), bases, grams, stars, lefschetz, contract }
    }

    pub fn metric(&self) -> &HermitianMetric {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn basis(&self, bd: Bidegree) -> &Basis {
        &self.bases[&bd]
    }

    pub fn gram(&self, bd: Bidegree) -> &DMatrix<Complex64> {
        &self.grams[&bd]
    }

    pub fn star_matrix(&self, bd: Bidegree) -> &DMatrix<Complex64> {
        &self.stars[&bd]
    }

    pub fn lefschetz_matrix(&self, bd: Bidegree) -> &DMatrix<Complex64> {
        &self.lefschetz[&bd]
    }

    pub fn contract_matrix(&self, bd: Bidegree) -> &DMatrix<Complex64> {
        &self.contract[&bd]
    }

    /// Pointwise inner product `⟨u, v⟩_γ` of two forms of equal bidegree.
    pub fn inner_product(&self, u: &Form, v: &Form) -> Result<Complex64> {
        if u.bidegree() != v.bidegree() {
            return Err(Error::BidegreeMismatch { left: u.bidegree(), right: v.bidegree() });
        }
        if u.n() != self.n() || v.n() != self.n() {
            return Err(Error::DimensionMismatch(u.n(), self.n()));
        }
        let basis = self.basis(u.bidegree());
        let ud = u.to_dense(basis);
        let vd = v.to_dense(basis);
        // ⟨u,v⟩ = Σ_{a,b} u_a conj(v_b) Gram[(a,b)] with Gram[(a,b)] = ⟨e_a, e_b⟩
        let gu = self.gram(u.bidegree()).transpose() * ud;
        Ok(vd.dotc(&gu))
    }

    /// Metric norm `⟨u,u⟩^{1/2}`.
    pub fn norm(&self, u: &Form) -> f64 {
        self.inner_product(u, u).map(|c| c.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// Hodge star `⋆_γ : Λ^{p,q} -> Λ^{n-q,n-p}`, satisfying the defining
    /// identity `u ∧ ⋆_γ v̄ = ⟨u,v⟩_γ dV_γ`.
    pub fn hodge_star(&self, u: &Form) -> Form {
        let bd = u.bidegree();
        let target = Bidegree::new(self.n() - bd.q, self.n() - bd.p);
        let v = self.star_matrix(bd) * u.to_dense(self.basis(bd));
        Form::from_dense(self.basis(target), &v)
    }

    /// Lefschetz operator `L_γ u = γ ∧ u`.
    pub fn lefschetz(&self, u: &Form) -> Result<Form> {
        let bd = u.bidegree();
        let target = Bidegree::new(bd.p + 1, bd.q + 1);
        if !target.fits(self.n()) {
            return Err(Error::BidegreeOutOfRange { bidegree: target, n: self.n() });
        }
        let v = self.lefschetz_matrix(bd) * u.to_dense(self.basis(bd));
        Ok(Form::from_dense(self.basis(target), &v))
    }

    /// Contraction `Λ_γ`, the metric adjoint of the Lefschetz operator.
    /// Sends (p,q) to (p-1,q-1); zero on forms with p = 0 or q = 0.
    pub fn contract(&self, u: &Form) -> Form {
        let bd = u.bidegree();
        if bd.p == 0 || bd.q == 0 {
            return Form::zero(self.n(), Bidegree::new(0, 0)).expect("(0,0) always fits");
        }
        let target = Bidegree::new(bd.p - 1, bd.q - 1);
        let v = self.contract_matrix(bd) * u.to_dense(self.basis(bd));
        Form::from_dense(self.basis(target), &v)
    }

    /// Iterated contraction `Λ^s u`.
    pub fn contract_power(&self, u: &Form, s: usize) -> Form {
        let mut out = u.clone();
        for _ in 0..s {
            out = self.contract(&out);
        }
        out
    }
}

/// Transform on (p,q) coefficients induced by separate transforms of the
/// holomorphic and anti-holomorphic monomial parts (the anti part is
/// conjugated).
fn pq_transform(
    basis: &Basis,
    hol: &DMatrix<Complex64>,
    anti: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let n = basis.n;
    let hols = combinations(n, basis.bidegree.p);
    let antis = combinations(n, basis.bidegree.q);
    let hpos: BTreeMap<&MultiIndex, usize> = hols.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let apos: BTreeMap<&MultiIndex, usize> = antis.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let dim = basis.dim();
    let mut t = DMatrix::zeros(dim, dim);
    for (col, (i, j)) in basis.pairs.iter().enumerate() {
        let ci = hpos[i];
        let cj = apos[j];
        for (row, (k, l)) in basis.pairs.iter().enumerate() {
            let rk = hpos[k];
            let rl = apos[l];
            t[(row, col)] = hol[(rk, ci)] * anti[(rl, cj)].conj();
        }
    }
    t
}

/// Matrix of `u ↦ a ∧ u` between the given bases.
pub fn wedge_operator(a: &Form, from: &Basis, to: &Basis) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(to.dim(), from.dim());
    for (col, (i2, j2)) in from.pairs.iter().enumerate() {
        for ((i1, j1), c) in a.coeffs() {
            let Some((si, hol)) = i1.merge(i2) else { continue };
            let Some((sj, anti)) = j1.merge(j2) else { continue };
            let cross = j1.len() * i2.len();
            let cross_sign = if cross % 2 == 0 { 1.0 } else { -1.0 };
            if let Some(row) = to.position(&(hol, anti)) {
                m[(row, col)] += c * (si * sj) as f64 * cross_sign;
            }
        }
    }
    m
}
