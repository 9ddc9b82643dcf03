//! Sparse polynomials, the index calculus, root multisets and symmetric functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest degree for which a dense coefficient vector is ever materialised.
pub const DENSE_LIMIT: usize = 512;

/// `x + y_1 t^{k_1} + ... + y_L t^{k_L}` with `k_0 = 0`.
///
/// Interior zero coefficients are dropped on construction, so every stored
/// `y_j` with `j >= 1` is nonzero. Only the constant term may be zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsePolynomial {
    exponents: Vec<usize>,
    coefficients: Vec<f64>,
}

impl SparsePolynomial {
    /// Exponents must start at 0 and increase strictly.
    pub fn new(exponents: Vec<usize>, coefficients: Vec<f64>) -> Result<Self> {
        if exponents.first() != Some(&0) {
            return invalid("first exponent must be 0");
        }
        Self::from_terms(exponents, coefficients)
    }

    /// Like [`SparsePolynomial::new`] but the lowest exponent may be positive;
    /// a zero constant term is inserted in that case.
    pub fn from_terms(exponents: Vec<usize>, coefficients: Vec<f64>) -> Result<Self> {
        if exponents.len() != coefficients.len() {
            return invalid(format!(
                "{} exponents but {} coefficients",
                exponents.len(),
                coefficients.len()
            ));
        }
        if exponents.is_empty() {
            return invalid("empty polynomial");
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("exponents must be strictly increasing");
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return invalid("coefficients must be finite");
        }
        let Some(top) = coefficients.iter().rposition(|&c| c != 0.0) else {
            return invalid("all coefficients are zero");
        };
        let mut exps = vec![0];
        let mut coefs = vec![if exponents[0] == 0 { coefficients[0] } else { 0.0 }];
        for i in 0..=top {
            if exponents[i] == 0 || coefficients[i] == 0.0 {
                continue;
            }
            exps.push(exponents[i]);
            coefs.push(coefficients[i]);
        }
        Ok(Self { exponents: exps, coefficients: coefs })
    }

    /// Monic polynomial with the given roots, expanded densely.
    pub fn from_roots(roots: &RootMultiset) -> Result<Self> {
        let units = roots.units();
        if units.len() > DENSE_LIMIT {
            return Err(Error::Capacity { what: "degree", got: units.len(), limit: DENSE_LIMIT });
        }
        let s = symmetric_all(&units);
        let n = units.len();
        let exps: Vec<usize> = (0..=n).collect();
        let coefs: Vec<f64> = (0..=n).map(|e| s[n - e].re).collect();
        Self::from_terms(exps, coefs)
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of non-constant terms.
    pub fn l(&self) -> usize {
        self.exponents.len() - 1
    }

    pub fn degree(&self) -> usize {
        *self.exponents.last().unwrap()
    }

    pub fn x(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn leading(&self) -> f64 {
        *self.coefficients.last().unwrap()
    }

    pub fn k(&self, j: usize) -> usize {
        self.exponents[j]
    }

    pub fn y(&self, j: usize) -> f64 {
        self.coefficients[j]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            exponents: self.exponents.clone(),
            coefficients: self.coefficients.iter().map(|c| c / lead).collect(),
        }
    }

    /// The polynomial `t -> Ψ(σ t)`.
    pub fn rescaled(&self, sigma: f64) -> Self {
        let ls = sigma.abs().ln();
        let neg = sigma < 0.0;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&self.exponents)
            .map(|(&c, &k)| {
                let sign = if neg && k % 2 == 1 { -1.0 } else { 1.0 };
                sign * c * (k as f64 * ls).exp()
            })
            .collect();
        Self { exponents: self.exponents.clone(), coefficients }
    }

    /// Coefficient of `t^e` (zero when `e` is not an exponent).
    pub fn coefficient_of(&self, e: usize) -> f64 {
        match self.exponents.binary_search(&e) {
            Ok(i) => self.coefficients[i],
            Err(_) => 0.0,
        }
    }

    /// Dense coefficients `c_0..c_n`.
    pub fn dense(&self) -> Result<Vec<f64>> {
        let n = self.degree();
        if n > DENSE_LIMIT {
            return Err(Error::Capacity { what: "degree", got: n, limit: DENSE_LIMIT });
        }
        let mut out = vec![0.0; n + 1];
        for (&k, &c) in self.exponents.iter().zip(&self.coefficients) {
            out[k] = c;
        }
        Ok(out)
    }

    /// `Σ k_j y_j t^{k_j - 1}` as a sparse polynomial; `None` for constants.
    pub fn derivative(&self) -> Option<Self> {
        if self.l() == 0 {
            return None;
        }
        let exps: Vec<usize> = self.exponents[1..].iter().map(|k| k - 1).collect();
        let coefs: Vec<f64> =
            self.exponents[1..].iter().zip(&self.coefficients[1..]).map(|(&k, &c)| k as f64 * c).collect();
        Self::from_terms(exps, coefs).ok()
    }
}

/// Integer power by repeated squaring.
pub fn powi(z: Complex64, mut k: usize) -> Complex64 {
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// `Ψ(t)`. Overflow propagates as infinity.
pub fn evaluate(poly: &SparsePolynomial, t: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut prev = 0;
    for (&k, &c) in poly.exponents.iter().zip(&poly.coefficients) {
        power *= powi(t, k - prev);
        prev = k;
        acc += power * c;
    }
    acc
}

/// Terms `y_j z^{k_j}` divided by a common scale `e^{log_scale}`.
///
/// Magnitudes go through logarithms and phases through unit-modulus powers, so
/// nothing overflows however large `k_L` or the coefficients are.
#[derive(Clone, Debug)]
pub struct ScaledTerms {
    pub terms: Vec<Complex64>,
    pub log_scale: f64,
}

impl ScaledTerms {
    pub fn new(poly: &SparsePolynomial, z: Complex64) -> Self {
        let r = z.norm();
        let lr = r.ln();
        let unit = if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) };
        let mut logs = Vec::with_capacity(poly.exponents.len());
        for (&k, &c) in poly.exponents.iter().zip(&poly.coefficients) {
            let l = if c == 0.0 {
                f64::NEG_INFINITY
            } else if k == 0 {
                c.abs().ln()
            } else {
                c.abs().ln() + k as f64 * lr
            };
            logs.push(l);
        }
        let log_scale = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut terms = Vec::with_capacity(logs.len());
        let mut phase = Complex64::new(1.0, 0.0);
        let mut prev = 0;
        for ((&k, &c), &l) in poly.exponents.iter().zip(&poly.coefficients).zip(&logs) {
            phase *= powi(unit, k - prev);
            prev = k;
            let mag = (l - log_scale).exp();
            terms.push(phase * (mag * c.signum()));
        }
        Self { terms, log_scale }
    }

    pub fn sum(&self) -> Complex64 {
        self.terms.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.norm()).sum()
    }

    /// `|Ψ(z)| / Σ |y_j| |z|^{k_j}`.
    pub fn relative_residual(&self) -> f64 {
        let a = self.abs_sum();
        if a == 0.0 {
            0.0
        } else {
            self.sum().norm() / a
        }
    }
}

/// `Ψ(z) / Ψ'(z)` from scaled terms; `None` when `Ψ'(z)` vanishes.
pub fn newton_ratio(poly: &SparsePolynomial, z: Complex64) -> (Option<Complex64>, ScaledTerms) {
    let st = ScaledTerms::new(poly, z);
    let num: Complex64 = st.sum();
    let den: Complex64 = st.terms.iter().zip(&poly.exponents).map(|(t, &k)| t * k as f64).sum();
    if den == Complex64::new(0.0, 0.0) || z == Complex64::new(0.0, 0.0) {
        return (None, st);
    }
    (Some(z * num / den), st)
}

/// `d`, `D` and the distinguished set `{0, D_1, ..., D_L}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexTable {
    /// `d_0 = 0`, `d_j = k_{L-j+1} - k_{L-j}`.
    pub d: Vec<usize>,
    /// `D_j = d_1 + ... + d_j = k_L - k_{L-j}`.
    pub big_d: Vec<usize>,
    pub distinguished: Vec<usize>,
}

impl IndexTable {
    pub fn l(&self) -> usize {
        self.big_d.len() - 1
    }

    pub fn is_distinguished(&self, i: usize) -> bool {
        self.distinguished.binary_search(&i).is_ok()
    }
}

pub fn index_table(poly: &SparsePolynomial) -> IndexTable {
    let k = &poly.exponents;
    let l = poly.l();
    let mut d = vec![0];
    let mut big_d = vec![0];
    for j in 1..=l {
        let dj = k[l - j + 1] - k[l - j];
        d.push(dj);
        big_d.push(big_d[j - 1] + dj);
    }
    debug_assert!((0..=l).all(|j| big_d[j] == k[l] - k[l - j]));
    let distinguished = big_d.clone();
    IndexTable { d, big_d, distinguished }
}

/// `Ψ / t^{m_0}`, re-based so the constant term is nonzero.
pub fn deflate_zero_roots(poly: &SparsePolynomial) -> Result<(SparsePolynomial, usize)> {
    let Some(first) = poly.coefficients.iter().position(|&c| c != 0.0) else {
        return invalid("all coefficients are zero");
    };
    let m0 = poly.exponents[first];
    let exps = poly.exponents[first..].iter().map(|k| k - m0).collect();
    let coefs = poly.coefficients[first..].to_vec();
    Ok((SparsePolynomial::new(exps, coefs)?, m0))
}

/// Complex roots with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootMultiset {
    pub roots: Vec<(Complex64, usize)>,
}

impl RootMultiset {
    pub fn new(roots: Vec<(Complex64, usize)>) -> Result<Self> {
        if roots.iter().any(|&(_, m)| m == 0) {
            return invalid("multiplicities must be at least 1");
        }
        Ok(Self { roots })
    }

    pub fn simple(roots: impl IntoIterator<Item = Complex64>) -> Self {
        Self { roots: roots.into_iter().map(|z| (z, 1)).collect() }
    }

    /// Groups exactly equal values.
    pub fn from_units(units: &[Complex64]) -> Self {
        let mut sorted = units.to_vec();
        sort_by_magnitude(&mut sorted);
        let mut roots: Vec<(Complex64, usize)> = Vec::new();
        for z in sorted {
            match roots.last_mut() {
                Some((w, m)) if *w == z => *m += 1,
                _ => roots.push((z, 1)),
            }
        }
        Self { roots }
    }

    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Every root repeated by its multiplicity, in stored order.
    pub fn units(&self) -> Vec<Complex64> {
        self.roots.iter().flat_map(|&(z, m)| std::iter::repeat(z).take(m)).collect()
    }

    /// `z_1, ..., z_n` with `|z_1| >= |z_2| >= ...`; equal magnitudes by argument.
    pub fn sorted_by_magnitude(&self) -> Vec<Complex64> {
        let mut u = self.units();
        sort_by_magnitude(&mut u);
        u
    }

    /// Largest distance from a root to the conjugate of its nearest partner,
    /// relative to `max(1, |z|)`.
    pub fn conjugate_defect(&self) -> f64 {
        let units = self.units();
        let mut worst: f64 = 0.0;
        for z in &units {
            let c = z.conj();
            let best = units.iter().map(|w| (w - c).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(best / z.norm().max(1.0));
        }
        worst
    }
}

/// Descending magnitude, ties by argument then by real part.
pub fn sort_by_magnitude(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
            .then(a.re.total_cmp(&b.re))
    });
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() + b.len() - 1;
    let mut out = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(a.len().min(b.len()));
    for k in 0..n {
        buf.clear();
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        for i in lo..=hi {
            buf.push(a[i] * b[k - i]);
        }
        out.push(pairwise_sum(&buf));
    }
    out
}

/// `[S_0, S_1, ..., S_n]` for the given roots, by a balanced product tree of
/// the factors `1 + (-z) X`.
pub fn symmetric_all(units: &[Complex64]) -> Vec<Complex64> {
    match units.len() {
        0 => vec![Complex64::new(1.0, 0.0)],
        1 => vec![Complex64::new(1.0, 0.0), -units[0]],
        n => convolve(&symmetric_all(&units[..n / 2]), &symmetric_all(&units[n / 2..])),
    }
}

/// `S_j(A)`, the sum over `j`-subsets of products of negated roots.
pub fn elementary_symmetric(roots: &RootMultiset, j: usize) -> Result<Complex64> {
    let n = roots.count();
    if j > n {
        return Err(Error::Index { index: j, max: n });
    }
    Ok(symmetric_all(&roots.units())[j])
}

/// Elementary symmetric functions of the magnitudes, `e_0..e_n`; the natural
/// size of `S_j`.
pub fn magnitude_scales(units: &[Complex64]) -> Vec<f64> {
    let mut e = vec![0.0; units.len() + 1];
    e[0] = 1.0;
    for (i, z) in units.iter().enumerate() {
        let r = z.norm();
        for j in (1..=i + 1).rev() {
            e[j] += r * e[j - 1];
        }
    }
    e
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VietaReport {
    /// `(D_j, |S_{D_j}(R) - y_{L-j}/y_L| / e_{D_j})` for `j = 0..L`.
    pub distinguished: Vec<(usize, f64)>,
    /// `(i, |S_i(R)| / e_i)` for indices outside the distinguished set.
    pub vanishing: Vec<(usize, f64)>,
    pub max_distinguished: f64,
    pub max_vanishing: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the symmetric functions of `roots` with the coefficient ratios.
pub fn vieta_check(poly: &SparsePolynomial, roots: &RootMultiset, tol: f64) -> Result<VietaReport> {
    let n = poly.degree();
    if roots.count() != n {
        return invalid(format!("{} roots for degree {}", roots.count(), n));
    }
    let units = roots.units();
    let s = symmetric_all(&units);
    let scale = magnitude_scales(&units);
    let idx = index_table(poly);
    let l = poly.l();
    let lead = poly.leading();
    let rel = |i: usize, v: f64| if scale[i] > 0.0 { v / scale[i] } else { v };
    let distinguished: Vec<(usize, f64)> = (0..=l)
        .map(|j| {
            let i = idx.big_d[j];
            let target = poly.y(l - j) / lead;
            (i, rel(i, (s[i] - target).norm()))
        })
        .collect();
    let vanishing: Vec<(usize, f64)> =
        (0..=n).filter(|i| !idx.is_distinguished(*i)).map(|i| (i, rel(i, s[i].norm()))).collect();
    let max_distinguished = distinguished.iter().map(|p| p.1).fold(0.0, f64::max);
    let max_vanishing = vanishing.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(VietaReport {
        passed: max_distinguished <= tol && max_vanishing <= tol,
        distinguished,
        vanishing,
        max_distinguished,
        max_vanishing,
        tol,
    })
}

/// Horner evaluation of dense coefficients `c_0..c_n`.
pub fn horner(coefs: &[f64], t: Complex64) -> Complex64 {
    coefs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(e: &[usize], c: &[f64]) -> SparsePolynomial {
        SparsePolynomial::new(e.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!(evaluate(&p(&[0, 2], &[1.0, 1.0]), c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(evaluate(&p(&[0, 9], &[-512.0, 1.0]), c(2.0, 0.0)), c(0.0, 0.0));
        assert_eq!(evaluate(&p(&[0, 1, 2], &[100.0, -101.0, 1.0]), c(3.0, 0.0)), c(-194.0, 0.0));
    }

    #[test]
    fn index_table_examples() {
        let t = index_table(&p(&[0, 1, 2], &[1.0, 1.0, 1.0]));
        assert_eq!(t.d, vec![0, 1, 1]);
        assert_eq!(t.big_d, vec![0, 1, 2]);
        assert_eq!(t.distinguished, vec![0, 1, 2]);
        let t = index_table(&p(&[0, 9, 18], &[1.0, 1.0, 1.0]));
        assert_eq!(t.d, vec![0, 9, 9]);
        assert_eq!(t.big_d, vec![0, 9, 18]);
        let t = index_table(&p(&[0, 3, 5, 11], &[1.0, 1.0, 1.0, 1.0]));
        assert_eq!(t.big_d, vec![0, 6, 8, 11]);
    }

    #[test]
    fn deflation_examples() {
        let (q, m) = deflate_zero_roots(&SparsePolynomial::from_terms(vec![3, 5], vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!((q.exponents(), q.coefficients(), m), (&[0, 2][..], &[1.0, 1.0][..], 3));
        let (q, m) = deflate_zero_roots(&p(&[0, 2], &[1.0, 1.0])).unwrap();
        assert_eq!((q.exponents(), m), (&[0, 2][..], 0));
        let (q, m) = deflate_zero_roots(&SparsePolynomial::from_terms(vec![4, 9], vec![-1.0, 2.0]).unwrap()).unwrap();
        assert_eq!((q.exponents(), q.coefficients(), m), (&[0, 5][..], &[-1.0, 2.0][..], 4));
        assert!(SparsePolynomial::from_terms(vec![0, 1], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn symmetric_examples() {
        let two = RootMultiset::new(vec![(c(1.0, 0.0), 2)]).unwrap();
        assert_eq!(elementary_symmetric(&two, 1).unwrap(), c(-2.0, 0.0));
        assert_eq!(elementary_symmetric(&two, 2).unwrap(), c(1.0, 0.0));
        assert_eq!(elementary_symmetric(&two, 0).unwrap(), c(1.0, 0.0));
        let r = RootMultiset::simple([c(100.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(elementary_symmetric(&r, 1).unwrap(), c(-101.0, 0.0));
        assert!(matches!(elementary_symmetric(&r, 3), Err(Error::Index { .. })));
    }

    #[test]
    fn vieta_exact_and_perturbed() {
        let poly = p(&[0, 1, 2], &[100.0, -101.0, 1.0]);
        let r = RootMultiset::simple([c(100.0, 0.0), c(1.0, 0.0)]);
        let rep = vieta_check(&poly, &r, 1e-12).unwrap();
        assert_eq!(rep.max_distinguished, 0.0);
        assert!(rep.passed);
        let bad = RootMultiset::simple([c(100.0, 0.0), c(1.001, 0.0)]);
        assert!(!vieta_check(&poly, &bad, 1e-10).unwrap().passed);
        assert!(vieta_check(&poly, &RootMultiset::simple([c(1.0, 0.0)]), 1e-10).is_err());
    }

    #[test]
    fn rescale_and_monic() {
        let poly = p(&[0, 1, 2], &[100.0, -101.0, 2.0]);
        let m = poly.monic();
        assert!(m.is_monic());
        let s = poly.rescaled(-2.0);
        assert_eq!(s.coefficients(), &[100.0, 202.0, 8.0]);
    }

    #[test]
    fn scaled_terms_survive_huge_exponents() {
        let poly = p(&[0, 4000], &[-1.0, 1.0]);
        let z = Complex64::from_polar(1.5, 0.3);
        let st = ScaledTerms::new(&poly, z);
        assert!(st.log_scale.is_finite());
        assert!((st.log_scale - 4000.0 * 1.5f64.ln()).abs() < 1e-9);
    }
}
