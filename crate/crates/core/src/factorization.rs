//! Rough factorisation: one monic factor per tier, built from the tier's own
//! coefficients, and the size of `E = Ψ̃ - Ψ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covering::{count_roots_in_cells, CellCovering};
use crate::error::{invalid, Error, Result};
use crate::oracle::{find_roots, RootFindConfig};
use crate::poly::{evaluate, RootMultiset, ScaledTerms, SparsePolynomial};
use crate::tiers::TierDecomposition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughFactorization {
    /// `Ψ̃_1, ..., Ψ̃_s`, each monic of degree `D(T_j)`.
    pub factors: Vec<SparsePolynomial>,
    /// Leading coefficient the input was divided by.
    pub normalization: f64,
    pub heights: Vec<f64>,
}

impl RoughFactorization {
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.degree()).sum()
    }

    /// `Ψ̃(t) = ∏ Ψ̃_j(t)`.
    pub fn evaluate(&self, t: Complex64) -> Complex64 {
        self.factors.iter().map(|f| evaluate(f, t)).product()
    }
}

/// `Ψ̃_j(t) = (1 / y_{L-L(j-1)}) Σ_{i=0}^{l_j} y_{L-L(j)+i} t^{k_i(T_j)}`.
pub fn rough_factor(poly: &SparsePolynomial, dec: &TierDecomposition) -> Result<RoughFactorization> {
    if !poly.is_monic() {
        return invalid("rough_factor needs a monic polynomial; use rough_factor_normalized");
    }
    if dec.is_empty() {
        return invalid("no tiers");
    }
    let l = poly.l();
    let mut factors = Vec::with_capacity(dec.len());
    let mut prev = 0;
    for t in &dec.tiers {
        let cum = t.cumulative_l;
        let top = poly.y(l - prev);
        let coefs: Vec<f64> = (0..=t.l).map(|i| poly.y(l - cum + i) / top).collect();
        factors.push(SparsePolynomial::new(t.local_k.clone(), coefs)?);
        prev = cum;
    }
    Ok(RoughFactorization { factors, normalization: 1.0, heights: dec.heights() })
}

/// Divides by `y_L` first and records it.
pub fn rough_factor_normalized(poly: &SparsePolynomial, dec: &TierDecomposition) -> Result<RoughFactorization> {
    let mut rf = rough_factor(&poly.monic(), dec)?;
    rf.normalization = poly.leading();
    Ok(rf)
}

/// `E(t) = Ψ̃(t) - Ψ(t)/y_L`, never expanding `Ψ̃`.
pub fn factorization_error(poly: &SparsePolynomial, rf: &RoughFactorization, t: Complex64) -> Complex64 {
    rf.evaluate(t) - evaluate(poly, t) / rf.normalization
}

fn log_abs_error(poly: &SparsePolynomial, rf: &RoughFactorization, t: Complex64) -> f64 {
    // Evaluate on a common logarithmic scale so large degrees do not overflow.
    let mut log_prod = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for f in &rf.factors {
        let st = ScaledTerms::new(f, t);
        let v = st.sum();
        log_prod += st.log_scale + v.norm().ln();
        phase *= v / v.norm();
    }
    let st = ScaledTerms::new(poly, t);
    let v = st.sum();
    let log_psi = st.log_scale + v.norm().ln() - rf.normalization.abs().ln();
    let phase_psi = v / v.norm() * rf.normalization.signum();
    let top = log_prod.max(log_psi);
    if !top.is_finite() {
        return top;
    }
    let diff = phase * (log_prod - top).exp() - phase_psi * (log_psi - top).exp();
    top + diff.norm().ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    /// Annulus index `r`: between tiers `r` and `r+1` (1-based; 0 is outside tier 1).
    pub r: usize,
    pub inner: f64,
    pub outer: f64,
    /// Largest `|E(t)| / (∏_{i<=r} h_i^{D_i} |t|^{Σ_{j>r} D_j})` seen.
    pub observed_epsilon_f: f64,
}

/// Samples `E` on `radii` log-spaced circles of `samples` points in every
/// annulus `10 h_{r+1} <= |t| <= h_r`.
pub fn verify_error_bound(
    poly: &SparsePolynomial,
    rf: &RoughFactorization,
    samples: usize,
    radii: usize,
) -> Vec<AnnulusReport> {
    let s = rf.factors.len();
    let h = &rf.heights;
    let degs: Vec<usize> = rf.factors.iter().map(|f| f.degree()).collect();
    let mut out = Vec::new();
    for r in 0..=s {
        let outer = if r == 0 { 1e3 * h[0] } else { h[r - 1] };
        let inner = if r == s { 1e-3 * h[s - 1] } else { 10.0 * h[r] };
        if inner >= outer {
            continue;
        }
        let log_fixed: f64 = (0..r).map(|i| degs[i] as f64 * h[i].ln()).sum();
        let tail: usize = degs[r..].iter().sum();
        let mut worst: f64 = 0.0;
        for ri in 0..radii.max(1) {
            let frac = if radii <= 1 { 0.5 } else { ri as f64 / (radii - 1) as f64 };
            let rad = (inner.ln() + frac * (outer.ln() - inner.ln())).exp();
            for a in 0..samples.max(1) {
                let theta = 2.0 * PI * (a as f64 + 0.5) / samples.max(1) as f64;
                let t = Complex64::from_polar(rad, theta);
                let le = log_abs_error(poly, rf, t);
                let ratio = (le - log_fixed - tail as f64 * rad.ln()).exp();
                if ratio.is_finite() {
                    worst = worst.max(ratio);
                }
            }
        }
        out.push(AnnulusReport { r, inner, outer, observed_epsilon_f: worst });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutsideReport {
    pub max_ratio: f64,
    pub witness: Complex64,
    pub samples_used: usize,
}

/// Largest `|E(t)| / |Ψ(t)|` over sample points outside every cell.
pub fn relative_error_outside_cells(
    poly: &SparsePolynomial,
    rf: &RoughFactorization,
    cov: &CellCovering,
    samples: usize,
) -> Result<OutsideReport> {
    let n = samples.max(1);
    let mut points = Vec::new();
    let ring = |c: Complex64, rad: f64, pts: &mut Vec<Complex64>| {
        for a in 0..n {
            let theta = 2.0 * PI * (a as f64 + 0.25) / n as f64;
            pts.push(c + Complex64::from_polar(rad, theta));
        }
    };
    for cell in &cov.cells {
        for f in [1.05, 1.5, 2.0, 4.0] {
            ring(cell.center, f * cell.radius, &mut points);
        }
    }
    let h = &rf.heights;
    for (i, &hr) in h.iter().enumerate() {
        for f in [0.3, 0.5, 0.7, 0.9, 1.1, 1.5, 2.0, 3.0] {
            ring(Complex64::new(0.0, 0.0), f * hr, &mut points);
        }
        if i + 1 < h.len() {
            ring(Complex64::new(0.0, 0.0), (hr * h[i + 1]).sqrt(), &mut points);
        }
    }
    let mut worst = (0.0, Complex64::new(0.0, 0.0));
    let mut used = 0;
    for t in points {
        if cov.cells.iter().any(|c| c.contains(t)) {
            continue;
        }
        used += 1;
        let le = log_abs_error(poly, rf, t);
        let st = ScaledTerms::new(poly, t);
        let lp = st.log_scale + st.sum().norm().ln() - rf.normalization.abs().ln();
        let ratio = (le - lp).exp();
        if ratio > worst.0 || (ratio.is_nan() && worst.0.is_finite()) {
            worst = (ratio, t);
        }
    }
    if used == 0 {
        return Err(Error::Sampling("every sample point fell inside a cell".into()));
    }
    Ok(OutsideReport { max_ratio: worst.0, witness: worst.1, samples_used: used })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub psi_counts: Vec<usize>,
    pub tilde_counts: Vec<usize>,
    pub uncovered_psi: usize,
    pub uncovered_tilde: usize,
    pub equal: bool,
    /// Every cell holds between 1 and `L` roots of `Ψ`.
    pub counts_in_range: bool,
}

/// Roots of all factors, solved one factor at a time.
pub fn factor_roots(rf: &RoughFactorization, cfg: &RootFindConfig) -> Result<RootMultiset> {
    let mut roots = Vec::new();
    for f in &rf.factors {
        roots.extend(find_roots(f, cfg)?.roots);
    }
    RootMultiset::new(roots)
}

/// Per-cell root counts of `Ψ` and `Ψ̃`.
pub fn match_root_counts(
    psi_roots: &RootMultiset,
    tilde_roots: &RootMultiset,
    cov: &CellCovering,
    l: usize,
) -> MatchReport {
    let a = count_roots_in_cells(cov, psi_roots);
    let b = count_roots_in_cells(cov, tilde_roots);
    let uncovered = |c: &crate::covering::CellCounts| c.uncovered.iter().map(|u| u.1).sum();
    MatchReport {
        equal: a.counts == b.counts && a.all_covered() && b.all_covered(),
        counts_in_range: a.counts.iter().all(|&n| n >= 1 && n <= l),
        uncovered_psi: uncovered(&a),
        uncovered_tilde: uncovered(&b),
        psi_counts: a.counts,
        tilde_counts: b.counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiers::decompose;

    fn p(e: &[usize], c: &[f64]) -> SparsePolynomial {
        SparsePolynomial::new(e.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn single_tier_is_identity() {
        let poly = p(&[0, 9], &[-512.0, 1.0]);
        let (_, dec) = decompose(&poly, 1e3).unwrap();
        let rf = rough_factor(&poly, &dec).unwrap();
        assert_eq!(rf.factors, vec![poly.clone()]);
        assert_eq!(factorization_error(&poly, &rf, Complex64::new(1.3, 0.4)), Complex64::new(0.0, 0.0));
        for a in verify_error_bound(&poly, &rf, 16, 3) {
            assert_eq!(a.observed_epsilon_f, 0.0);
        }
    }

    #[test]
    fn running_fixture() {
        let poly = p(&[0, 1, 2], &[100.0, -101.0, 1.0]);
        let (_, dec) = decompose(&poly, 10.0).unwrap();
        let rf = rough_factor(&poly, &dec).unwrap();
        assert_eq!(rf.factors[0], p(&[0, 1], &[-101.0, 1.0]));
        assert_eq!(rf.factors[1], p(&[0, 1], &[100.0 / -101.0, 1.0]));
        let t = Complex64::new(10.0, 0.0);
        let expect = (10.0 - 101.0) * (10.0 - 100.0 / 101.0) - (100.0 - 1010.0 + 100.0);
        assert!((factorization_error(&poly, &rf, t) - expect).norm() < 1e-12);
        let w = Complex64::new(100.0, 0.0);
        assert_eq!(factorization_error(&poly, &rf, w), rf.evaluate(w));
        assert!(rough_factor(&p(&[0, 1, 2], &[100.0, -101.0, 2.0]), &dec).is_err());
    }

    #[test]
    fn nine_nine_model() {
        // y_2 = 1, α_1 = -1e4, α_2 = -1: (t^9 - 1e4)(t^9 - 1)
        // The two heights differ by 1e4^{1/9} ~ 2.78 only.
        let poly = p(&[0, 9, 18], &[1e4, -(1e4 + 1.0), 1.0]);
        let (_, merged) = decompose(&poly, 1e3).unwrap();
        assert_eq!(merged.tiers.len(), 1);
        let (_, dec) = decompose(&poly, 2.0).unwrap();
        let rf = rough_factor(&poly, &dec).unwrap();
        assert_eq!(rf.factors[0], p(&[0, 9], &[-(1e4 + 1.0), 1.0]));
        assert_eq!(rf.factors[1], p(&[0, 9], &[1e4 / -(1e4 + 1.0), 1.0]));
        assert_eq!(rf.degree(), 18);
    }

    #[test]
    fn error_decays_with_separation() {
        for (ratio, limit) in [(1e3, 1e-2), (1e6, 1e-5)] {
            let poly = p(&[0, 1, 2], &[ratio, -(ratio + 1.0), 1.0]);
            let (_, dec) = decompose(&poly, 10.0).unwrap();
            let rf = rough_factor(&poly, &dec).unwrap();
            let worst = verify_error_bound(&poly, &rf, 64, 8)
                .iter()
                .map(|a| a.observed_epsilon_f)
                .fold(0.0, f64::max);
            assert!(worst <= limit, "ratio {ratio}: {worst}");
        }
    }
}
