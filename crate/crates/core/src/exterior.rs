//! Pointwise exterior algebra of (p,q)-forms on an n-dimensional complex
//! vector space, with fixed basis ordering and i-power conventions.
//!
//! A form is stored sparsely as a map from ordered multi-index pairs to
//! complex coefficients; the reference monomial is `dz_I ∧ dz̄_J` with all
//! holomorphic factors first and both index lists strictly increasing.

use std::collections::BTreeMap;
use std::fmt;

use arrayvec::ArrayVec;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Largest supported ambient complex dimension.
pub const MAX_DIM: usize = 8;

/// Strictly increasing sequence of indices in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(ArrayVec<u8, MAX_DIM>);

impl MultiIndex {
    /// Builds a multi-index, checking that entries are strictly increasing.
    pub fn new(entries: &[u8]) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMultiIndex(format!(
                "entries not strictly increasing: {entries:?}"
            )));
        }
        if entries.iter().any(|&e| e == 0) || entries.len() > MAX_DIM {
            return Err(Error::InvalidMultiIndex(format!("entries out of range: {entries:?}")));
        }
        Ok(MultiIndex(entries.iter().copied().collect()))
    }

    pub fn empty() -> Self {
        MultiIndex(ArrayVec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn contains(&self, j: u8) -> bool {
        self.0.contains(&j)
    }

    /// Checks all entries lie in `1..=n`.
    pub fn fits(&self, n: usize) -> bool {
        self.0.iter().all(|&e| (e as usize) <= n)
    }

    /// Complementary multi-index inside `1..=n`.
    pub fn complement(&self, n: usize) -> MultiIndex {
        let mut out = ArrayVec::new();
        for j in 1..=n as u8 {
            if !self.contains(j) {
                out.push(j);
            }
        }
        MultiIndex(out)
    }

    /// Inserts `j`, returning the sign of moving `dz_j` from the front into
    /// place, or `None` if `j` is already present.
    pub fn insert(&self, j: u8) -> Option<(i32, MultiIndex)> {
        if self.contains(j) {
            return None;
        }
        let pos = self.0.iter().take_while(|&&e| e < j).count();
        let mut out = self.0.clone();
        out.insert(pos, j);
        Some((if pos % 2 == 0 { 1 } else { -1 }, MultiIndex(out)))
    }

    /// Removes `j`, returning the sign of pulling the factor to the front,
    /// or `None` if `j` is absent.
    pub fn remove(&self, j: u8) -> Option<(i32, MultiIndex)> {
        let pos = self.0.iter().position(|&e| e == j)?;
        let mut out = self.0.clone();
        out.remove(pos);
        Some((if pos % 2 == 0 { 1 } else { -1 }, MultiIndex(out)))
    }

    /// Concatenation sign and merged index, `None` on a repeated entry.
    pub fn merge(&self, other: &MultiIndex) -> Option<(i32, MultiIndex)> {
        // Sign of the permutation sorting (self, other) into increasing order:
        // count the inversions across the boundary.
        let mut inversions = 0usize;
        for &b in other.0.iter() {
            if self.contains(b) {
                return None;
            }
            inversions += self.0.iter().filter(|&&a| a > b).count();
        }
        let mut merged: ArrayVec<u8, MAX_DIM> = self.0.clone();
        for &b in other.0.iter() {
            merged.push(b);
        }
        merged.sort_unstable();
        Some((if inversions % 2 == 0 { 1 } else { -1 }, MultiIndex(merged)))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Bidegree (p,q) of a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub fn new(p: usize, q: usize) -> Self {
        Bidegree { p, q }
    }

    /// Total degree k = p + q.
    pub fn total(&self) -> usize {
        self.p + self.q
    }

    pub fn fits(&self, n: usize) -> bool {
        self.p <= n && self.q <= n
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// All strictly increasing k-subsets of `1..=n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<MultiIndex> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: ArrayVec<u8, MAX_DIM> = ArrayVec::new();
    fn rec(start: u8, n: u8, k: usize, current: &mut ArrayVec<u8, MAX_DIM>, out: &mut Vec<MultiIndex>) {
        if current.len() == k {
            out.push(MultiIndex(current.clone()));
            return;
        }
        for j in start..=n {
            current.push(j);
            rec(j + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(1, n as u8, k, &mut current, &mut out);
    out
}

/// Ordered monomial basis of Λ^{p,q} over C^n.
#[derive(Debug, Clone)]
pub struct Basis {
    pub n: usize,
    pub bidegree: Bidegree,
    pub pairs: Vec<(MultiIndex, MultiIndex)>,
    index: BTreeMap<(MultiIndex, MultiIndex), usize>,
}

impl Basis {
    pub fn new(n: usize, bidegree: Bidegree) -> Self {
        let hol = combinations(n, bidegree.p);
        let anti = combinations(n, bidegree.q);
        let mut pairs = Vec::with_capacity(hol.len() * anti.len());
        for i in &hol {
            for j in &anti {
                pairs.push((i.clone(), j.clone()));
            }
        }
        let index = pairs
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), k))
            .collect();
        Basis { n, bidegree, pairs, index }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn position(&self, key: &(MultiIndex, MultiIndex)) -> Option<usize> {
        self.index.get(key).copied()
    }
}

/// A (p,q)-form on C^n with sparse complex coefficients.
///
/// Absent keys mean zero. The coefficient at `(I, J)` multiplies the
/// monomial `dz_I ∧ dz̄_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: usize,
    bidegree: Bidegree,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl Form {
    pub fn zero(n: usize, bidegree: Bidegree) -> Result<Self> {
        if !bidegree.fits(n) {
            return Err(Error::BidegreeOutOfRange { bidegree, n });
        }
        Ok(Form { n, bidegree, coeffs: BTreeMap::new() })
    }

    /// A constant, i.e. a (0,0)-form.
    pub fn constant(n: usize, value: Complex64) -> Self {
        let mut f = Form { n, bidegree: Bidegree::new(0, 0), coeffs: BTreeMap::new() };
        f.set(MultiIndex::empty(), MultiIndex::empty(), value);
        f
    }

    /// Single monomial `c · dz_I ∧ dz̄_J`.
    pub fn monomial(n: usize, hol: MultiIndex, anti: MultiIndex, c: Complex64) -> Result<Self> {
        let bidegree = Bidegree::new(hol.len(), anti.len());
        if !bidegree.fits(n) || !hol.fits(n) || !anti.fits(n) {
            return Err(Error::InvalidMultiIndex(format!("({hol}|{anti}) for n = {n}")));
        }
        let mut f = Form::zero(n, bidegree)?;
        f.set(hol, anti, c);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn coeffs(&self) -> &BTreeMap<(MultiIndex, MultiIndex), Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, hol: &MultiIndex, anti: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(&(hol.clone(), anti.clone()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sets a coefficient, dropping exact zeros.
    pub fn set(&mut self, hol: MultiIndex, anti: MultiIndex, c: Complex64) {
        debug_assert_eq!(hol.len(), self.bidegree.p);
        debug_assert_eq!(anti.len(), self.bidegree.q);
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&(hol, anti));
        } else {
            self.coeffs.insert((hol, anti), c);
        }
    }

    pub fn add_assign_coeff(&mut self, hol: MultiIndex, anti: MultiIndex, c: Complex64) {
        let key = (hol, anti);
        let entry = self.coeffs.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.norm() == 0.0)
    }

    /// Euclidean norm of the coefficient vector (metric-independent scale).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Form {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out.coeffs.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        out
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_assign_coeff(k.0.clone(), k.1.clone(), *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    fn compatible(&self, other: &Form) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.bidegree != other.bidegree {
            return Err(Error::BidegreeMismatch { left: self.bidegree, right: other.bidegree });
        }
        Ok(())
    }

    /// Wedge product with permutation signs from the `dz_I ∧ dz̄_J` ordering.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let bidegree = Bidegree::new(
            self.bidegree.p + other.bidegree.p,
            self.bidegree.q + other.bidegree.q,
        );
        if !bidegree.fits(self.n) {
            return Err(Error::BidegreeOutOfRange { bidegree, n: self.n });
        }
        let mut out = Form::zero(self.n, bidegree)?;
        // Moving dz̄_{J1} (q1 factors) past dz_{I2} (p2 factors) costs (-1)^{q1 p2}.
        let cross = self.bidegree.q * other.bidegree.p;
        let cross_sign = if cross % 2 == 0 { 1.0 } else { -1.0 };
        for ((i1, j1), c1) in &self.coeffs {
            for ((i2, j2), c2) in &other.coeffs {
                let Some((si, hol)) = i1.merge(i2) else { continue };
                let Some((sj, anti)) = j1.merge(j2) else { continue };
                let sign = cross_sign * (si * sj) as f64;
                out.add_assign_coeff(hol, anti, c1 * c2 * sign);
            }
        }
        Ok(out)
    }

    /// Wedge power a^k (k = 0 gives the constant 1).
    pub fn wedge_power(&self, k: usize) -> Result<Form> {
        let mut out = Form::constant(self.n, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// Complex conjugate; swaps the bidegree (p,q) -> (q,p).
    pub fn conjugate(&self) -> Form {
        let bidegree = Bidegree::new(self.bidegree.q, self.bidegree.p);
        let sign = if (self.bidegree.p * self.bidegree.q) % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = Form { n: self.n, bidegree, coeffs: BTreeMap::new() };
        for ((i, j), c) in &self.coeffs {
            out.set(j.clone(), i.clone(), c.conj() * sign);
        }
        out
    }

    /// A form is real iff it equals its own conjugate.
    pub fn is_real_within(&self, tol: f64) -> bool {
        if self.bidegree.p != self.bidegree.q {
            return false;
        }
        let diff = match self.sub(&self.conjugate()) {
            Ok(d) => d,
            Err(_) => return false,
        };
        diff.coeff_norm() <= tol
    }

    pub fn is_real(&self) -> bool {
        self.is_real_within(0.0)
    }

    /// Simple positive form `τ_J := i^{m²} dz_J ∧ dz̄_J`.
    pub fn simple_positive(n: usize, idx: &MultiIndex) -> Result<Form> {
        if !idx.fits(n) {
            return Err(Error::InvalidMultiIndex(format!("{idx} for n = {n}")));
        }
        let m = idx.len();
        Form::monomial(n, idx.clone(), idx.clone(), i_power(m * m))
    }

    /// The (1,1)-form `i Σ H_{jk} dz_j ∧ dz̄_k` of a square matrix H.
    pub fn from_matrix(n: usize, h: &nalgebra::DMatrix<Complex64>) -> Result<Form> {
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch(h.nrows(), n));
        }
        let mut out = Form::zero(n, Bidegree::new(1, 1))?;
        for j in 0..n {
            for k in 0..n {
                let c = Complex64::new(0.0, 1.0) * h[(j, k)];
                if c != Complex64::new(0.0, 0.0) {
                    out.set(
                        MultiIndex::new(&[j as u8 + 1])?,
                        MultiIndex::new(&[k as u8 + 1])?,
                        c,
                    );
                }
            }
        }
        Ok(out)
    }

    /// Coefficient matrix H of a (1,1)-form written as `i Σ H_{jk} dz_j ∧ dz̄_k`.
    pub fn to_matrix(&self) -> Result<nalgebra::DMatrix<Complex64>> {
        if self.bidegree != Bidegree::new(1, 1) {
            return Err(Error::BidegreeMismatch {
                left: self.bidegree,
                right: Bidegree::new(1, 1),
            });
        }
        let mut h = nalgebra::DMatrix::zeros(self.n, self.n);
        for ((i, j), c) in &self.coeffs {
            h[(i.entries()[0] as usize - 1, j.entries()[0] as usize - 1)] =
                c / Complex64::new(0.0, 1.0);
        }
        Ok(h)
    }

    /// Value of a (0,0)-form.
    pub fn scalar_value(&self) -> Result<Complex64> {
        if self.bidegree != Bidegree::new(0, 0) {
            return Err(Error::BidegreeMismatch {
                left: self.bidegree,
                right: Bidegree::new(0, 0),
            });
        }
        Ok(self.coeff(&MultiIndex::empty(), &MultiIndex::empty()))
    }

    /// Coefficient of the top monomial dz_{1..n} ∧ dz̄_{1..n} of an (n,n)-form.
    pub fn top_coeff(&self) -> Result<Complex64> {
        let full = Bidegree::new(self.n, self.n);
        if self.bidegree != full {
            return Err(Error::BidegreeMismatch { left: self.bidegree, right: full });
        }
        let all = MultiIndex::new(&(1..=self.n as u8).collect::<Vec<_>>())?;
        Ok(self.coeff(&all, &all))
    }

    /// Dense coefficient vector over `basis`.
    pub fn to_dense(&self, basis: &Basis) -> nalgebra::DVector<Complex64> {
        let mut v = nalgebra::DVector::zeros(basis.dim());
        for (key, c) in &self.coeffs {
            if let Some(k) = basis.position(key) {
                v[k] = *c;
            }
        }
        v
    }

    pub fn from_dense(basis: &Basis, v: &nalgebra::DVector<Complex64>) -> Form {
        let mut f = Form { n: basis.n, bidegree: basis.bidegree, coeffs: BTreeMap::new() };
        for (k, pair) in basis.pairs.iter().enumerate() {
            if v[k] != Complex64::new(0.0, 0.0) {
                f.coeffs.insert(pair.clone(), v[k]);
            }
        }
        f
    }

    /// JSON encoding: `{"n":…, "p":…, "q":…, "coeffs":{"I|J":[re,im],…}}`.
    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for ((i, j), c) in &self.coeffs {
            coeffs.insert(format!("{i}|{j}"), json!([c.re, c.im]));
        }
        json!({
            "n": self.n,
            "p": self.bidegree.p,
            "q": self.bidegree.q,
            "coeffs": Value::Object(coeffs),
        })
    }

    pub fn from_json(v: &Value) -> Result<Form> {
        let obj = v.as_object().ok_or_else(|| Error::Serialization("expected object".into()))?;
        let get_usize = |key: &str| -> Result<usize> {
            obj.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::Serialization(format!("missing integer field '{key}'")))
        };
        let n = get_usize("n")?;
        let bidegree = Bidegree::new(get_usize("p")?, get_usize("q")?);
        let mut form = Form::zero(n, bidegree)?;
        let coeffs = obj
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Serialization("missing 'coeffs' object".into()))?;
        for (key, val) in coeffs {
            let (is, js) = key
                .split_once('|')
                .ok_or_else(|| Error::Serialization(format!("bad coefficient key '{key}'")))?;
            let parse = |s: &str| -> Result<MultiIndex> {
                if s.is_empty() {
                    return Ok(MultiIndex::empty());
                }
                let entries: std::result::Result<Vec<u8>, _> =
                    s.split(',').map(|t| t.parse::<u8>()).collect();
                MultiIndex::new(&entries.map_err(|e| Error::Serialization(e.to_string()))?)
            };
            let (hol, anti) = (parse(is)?, parse(js)?);
            if hol.len() != bidegree.p || anti.len() != bidegree.q || !hol.fits(n) || !anti.fits(n) {
                return Err(Error::Serialization(format!("key '{key}' incompatible with header")));
            }
            let arr = val
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Serialization(format!("bad coefficient value for '{key}'")))?;
            let re = arr[0].as_f64().ok_or_else(|| Error::Serialization("non-float re".into()))?;
            let im = arr[1].as_f64().ok_or_else(|| Error::Serialization("non-float im".into()))?;
            form.set(hol, anti, Complex64::new(re, im));
        }
        Ok(form)
    }

    /// Max coefficient difference against another form of the same shape.
    pub fn max_diff(&self, other: &Form) -> f64 {
        let mut keys: std::collections::BTreeSet<_> = self.coeffs.keys().cloned().collect();
        keys.extend(other.coeffs.keys().cloned());
        keys.into_iter()
            .map(|k| (self.coeff(&k.0, &k.1) - other.coeff(&k.0, &k.1)).norm())
            .fold(0.0, f64::max)
    }
}

/// i^k with k taken mod 4.
pub fn i_power(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
