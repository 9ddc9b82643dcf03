//! Tiers: groups of height estimates of comparable size, with their local
//! index calculus, cluster bounds and checks against actual roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heights::{estimate_heights, HeightProfile};
use crate::poly::{index_table, sort_by_magnitude, symmetric_all, IndexTable, RootMultiset, SparsePolynomial};

pub const DEFAULT_SEPARATION: f64 = 1e3;
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    /// Number of coefficient indices the tier spans, `l_r = L(r) - L(r-1)`.
    pub l: usize,
    /// `L(r) = l_1 + ... + l_r`.
    pub cumulative_l: usize,
    /// `h(T_r)`, the first height estimate of the tier.
    pub height: f64,
    /// `D(T_r) = D(L(r)) - D(L(r-1))`, the number of roots in the tier.
    pub root_count: usize,
    /// `D_0(T_r), ..., D_{l_r}(T_r)`.
    pub local_d: Vec<usize>,
    /// `k_0(T_r), ..., k_{l_r}(T_r)`.
    pub local_k: Vec<usize>,
    /// At most this many roots sit in any `B(w, ε|w|)`; equals `l_r`.
    pub cluster_bound: usize,
    /// Indices `b` (0-based) of the height estimates in this tier.
    pub estimates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TierDecomposition {
    pub tiers: Vec<Tier>,
    pub separation: f64,
    /// `h(T_r) / h(T_{r+1})`.
    pub gap_ratios: Vec<f64>,
}

impl TierDecomposition {
    pub fn len(&self) -> usize {
        self.tiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.tiers.iter().map(|t| t.l).collect()
    }

    pub fn root_counts(&self) -> Vec<usize> {
        self.tiers.iter().map(|t| t.root_count).collect()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.tiers.iter().map(|t| t.height).collect()
    }

    /// Smallest ratio between consecutive tier heights (infinite for one tier).
    pub fn min_gap(&self) -> f64 {
        self.gap_ratios.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Merges consecutive estimates whose ratio is below `separation`; a ratio
/// equal to it starts a new tier.
pub fn stratify(profile: &HeightProfile, idx: &IndexTable, separation: f64) -> Result<TierDecomposition> {
    if !(separation > 1.0) {
        return invalid("separation must exceed 1");
    }
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for b in 1..profile.etas.len() {
        if profile.etas[b - 1] / profile.etas[b] < separation {
            groups.last_mut().unwrap().push(b);
        } else {
            groups.push(vec![b]);
        }
    }
    let big_d = &idx.big_d;
    let mut tiers = Vec::with_capacity(groups.len());
    let mut prev = 0;
    for g in groups {
        let last = *g.last().unwrap();
        let cum = profile.alphas[last + 1];
        let l = cum - prev;
        let local_d: Vec<usize> = (0..=l).map(|j| big_d[prev + j] - big_d[prev]).collect();
        let local_k: Vec<usize> = (0..=l).map(|j| big_d[cum] - big_d[cum - j]).collect();
        tiers.push(Tier {
            l,
            cumulative_l: cum,
            height: profile.etas[g[0]],
            root_count: big_d[cum] - big_d[prev],
            local_d,
            local_k,
            cluster_bound: l,
            estimates: g,
        });
        prev = cum;
    }
    let gap_ratios = tiers.windows(2).map(|w| w[0].height / w[1].height).collect();
    Ok(TierDecomposition { tiers, separation, gap_ratios })
}

/// Heights and tiers of `poly` in one call.
pub fn decompose(poly: &SparsePolynomial, separation: f64) -> Result<(HeightProfile, TierDecomposition)> {
    let profile = estimate_heights(poly)?;
    let dec = stratify(&profile, &index_table(poly), separation)?;
    Ok((profile, dec))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TierAssignment {
    pub tiers: Vec<RootMultiset>,
    pub min_magnitude: Vec<f64>,
    pub max_magnitude: Vec<f64>,
    /// `min |z| in T_r` over `max |z| in T_{r+1}`.
    pub gap_ratios: Vec<f64>,
}

/// Splits the magnitude-sorted roots into consecutive runs of `D(T_r)`.
pub fn assign_roots(dec: &TierDecomposition, roots: &RootMultiset) -> Result<TierAssignment> {
    let total: usize = dec.root_counts().iter().sum();
    if roots.count() != total {
        return invalid(format!("{} roots but tiers hold {}", roots.count(), total));
    }
    let sorted = roots.sorted_by_magnitude();
    let mut tiers = Vec::new();
    let mut min_magnitude = Vec::new();
    let mut max_magnitude = Vec::new();
    let mut start = 0;
    for t in &dec.tiers {
        let chunk = &sorted[start..start + t.root_count];
        start += t.root_count;
        max_magnitude.push(chunk.first().map_or(0.0, |z| z.norm()));
        min_magnitude.push(chunk.last().map_or(0.0, |z| z.norm()));
        tiers.push(RootMultiset::from_units(chunk));
    }
    let gap_ratios = (1..tiers.len()).map(|r| min_magnitude[r - 1] / max_magnitude[r]).collect();
    Ok(TierAssignment { tiers, min_magnitude, max_magnitude, gap_ratios })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedClassification {
    /// Pivot index: the smallest maximiser of `|y_j|^{1/k_j}`.
    pub m: usize,
    pub gamma: f64,
    pub delta: f64,
    /// Number of tiers with `h >= 1`.
    pub s1: usize,
    /// Number of tiers with `h < 1`.
    pub s2: usize,
    /// `true` for tiers with `h >= 1`, in tier order.
    pub large: Vec<bool>,
    /// Cap for large tiers: `L - m` when `s2 >= 1`, else `L - m + 1`.
    pub large_cap: Option<usize>,
    /// Cap for small tiers: `m`.
    pub small_cap: Option<usize>,
}

impl RefinedClassification {
    pub fn cap(&self, tier: usize) -> Option<usize> {
        if self.large[tier] {
            self.large_cap
        } else {
            self.small_cap
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Refinement {
    Applicable(RefinedClassification),
    NotApplicable { m: usize, reason: String },
}

fn root_sizes(poly: &SparsePolynomial) -> Vec<f64> {
    (1..=poly.l()).map(|j| (poly.y(j).abs().ln() / poly.k(j) as f64).exp()).collect()
}

/// Rescales `t` so that `max_j |y_j|^{1/k_j} = 1`; returns the polynomial and
/// the factor `σ` with `Ψ_new(t) = Ψ(σ t)`.
pub fn normalize_pivot(poly: &SparsePolynomial) -> (SparsePolynomial, f64) {
    let top = root_sizes(poly).into_iter().fold(0.0, f64::max);
    let sigma = 1.0 / top;
    let mut q = poly.rescaled(sigma);
    // Make the pivot exactly 1 against rounding in the rescale.
    let sizes = root_sizes(&q);
    let over = sizes.iter().cloned().fold(0.0, f64::max);
    if over > 1.0 {
        let fix = 1.0 / over;
        q = q.rescaled(fix);
        return (q, sigma * fix);
    }
    (q, sigma)
}

/// Large/small classification under the pivot hypotheses
/// `|y_m|^{1/k_m} >= γ` and `|y_n|^{1/k_n} <= δ` for all `n > m`.
pub fn refine(poly: &SparsePolynomial, gamma: f64, delta: f64, separation: f64) -> Result<Refinement> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return invalid("gamma must lie in (0, 1]");
    }
    if !(delta > 0.0 && delta < gamma) {
        return invalid("delta must lie in (0, gamma)");
    }
    if poly.l() == 0 {
        return invalid("polynomial has degree 0");
    }
    let sizes = root_sizes(poly);
    let top = sizes.iter().cloned().fold(0.0, f64::max);
    if top > 1.0 + 1e-12 {
        return invalid(format!("max |y_j|^(1/k_j) = {top} exceeds 1; normalise first"));
    }
    let mut m = 1;
    for (i, &s) in sizes.iter().enumerate() {
        if s > sizes[m - 1] {
            m = i + 1;
        }
    }
    if sizes[m - 1] < gamma {
        return Ok(Refinement::NotApplicable {
            m,
            reason: format!("|y_m|^(1/k_m) = {} < gamma = {gamma}", sizes[m - 1]),
        });
    }
    if let Some(n) = (m + 1..=poly.l()).find(|&n| sizes[n - 1] > delta) {
        return Ok(Refinement::NotApplicable {
            m,
            reason: format!("|y_{n}|^(1/k_{n}) = {} > delta = {delta}", sizes[n - 1]),
        });
    }
    let (_, dec) = decompose(poly, separation)?;
    let large: Vec<bool> = dec.tiers.iter().map(|t| t.height >= 1.0).collect();
    let s1 = large.iter().filter(|&&b| b).count();
    let s2 = large.len() - s1;
    let l = poly.l();
    let (large_cap, small_cap) = if s2 >= 1 {
        ((s1 >= 1).then_some(l - m), Some(m))
    } else {
        (Some(l - m + 1), None)
    };
    Ok(Refinement::Applicable(RefinedClassification { m, gamma, delta, s1, s2, large, large_cap, small_cap }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub max_count: usize,
    /// A root whose ball holds `max_count` roots.
    pub witness: Option<Complex64>,
    pub cap: usize,
    pub passed: bool,
}

/// Largest multiplicity-weighted number of roots in any `B(w, ε|w|)`, `w` a root.
pub fn verify_cluster_counts(roots: &RootMultiset, epsilon: f64, cap: usize) -> ClusterReport {
    let mut max_count = 0;
    let mut witness = None;
    for &(w, _) in &roots.roots {
        let r = epsilon * w.norm();
        let count: usize = roots.roots.iter().filter(|(z, _)| (z - w).norm() <= r).map(|x| x.1).sum();
        if count > max_count {
            max_count = count;
            witness = Some(w);
        }
    }
    ClusterReport { max_count, witness, cap, passed: max_count <= cap }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TierResidual {
    /// Largest `|S_j(T_r) - c_j(T_r)| / h^j` over `j` in the tier's distinguished set.
    pub distinguished: f64,
    /// Largest `|S_j(T_r)| / h^j` over the other `j`.
    pub vanishing: f64,
}

/// Tier-local symmetric equations: `S_j(T_r)` against
/// `c_j = S_{D(L(r-1))+j}(R) / S_{D(L(r-1))}(T_1 ∪ ... ∪ T_{r-1})`.
pub fn tier_symmetric_residuals(
    assignment: &TierAssignment,
    dec: &TierDecomposition,
) -> Result<Vec<TierResidual>> {
    let mut all: Vec<Complex64> = assignment.tiers.iter().flat_map(|t| t.units()).collect();
    sort_by_magnitude(&mut all);
    let s_all = symmetric_all(&all);
    let mut out = Vec::new();
    let mut offset = 0;
    for (tier, roots) in dec.tiers.iter().zip(&assignment.tiers) {
        let prior: Complex64 = all[..offset].iter().map(|z| -z).product();
        if prior.norm() == 0.0 && offset > 0 {
            return Err(Error::StructuralViolation("empty prior-tier product".into()));
        }
        let s = symmetric_all(&roots.units());
        let h = tier.height;
        let mut dist: f64 = 0.0;
        let mut van: f64 = 0.0;
        for j in 1..=tier.root_count {
            let scale = (j as f64 * h.ln()).exp();
            if tier.local_d.contains(&j) {
                let c = s_all[offset + j] / prior;
                dist = dist.max((s[j] - c).norm() / scale);
            } else {
                van = van.max(s[j].norm() / scale);
            }
        }
        out.push(TierResidual { distinguished: dist, vanishing: van });
        offset += tier.root_count;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{find_roots, RootFindConfig};

    fn p(e: &[usize], c: &[f64]) -> SparsePolynomial {
        SparsePolynomial::new(e.to_vec(), c.to_vec()).unwrap()
    }

    fn fixture() -> SparsePolynomial {
        p(&[0, 1, 2], &[100.0, -101.0, 1.0])
    }

    #[test]
    fn stratify_examples() {
        let (_, dec) = decompose(&fixture(), 10.0).unwrap();
        assert_eq!(dec.sizes(), vec![1, 1]);
        assert_eq!(dec.root_counts(), vec![1, 1]);
        assert_eq!(dec.tiers.iter().map(|t| t.cluster_bound).collect::<Vec<_>>(), vec![1, 1]);

        let (_, dec) = decompose(&p(&[0, 9, 18], &[1.0, 1.5, 1.0]), DEFAULT_SEPARATION).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!((dec.tiers[0].l, dec.tiers[0].root_count, dec.tiers[0].cluster_bound), (2, 18, 2));
        assert_eq!(dec.tiers[0].local_k, vec![0, 9, 18]);

        let (_, dec) = decompose(&p(&[0, 6], &[-1.0, 1.0]), DEFAULT_SEPARATION).unwrap();
        assert_eq!((dec.len(), dec.tiers[0].cluster_bound), (1, 1));
    }

    #[test]
    fn ratio_equal_to_separation_breaks() {
        let prof = HeightProfile { etas: vec![100.0, 1.0], alphas: vec![0, 1, 2], gaps: vec![1, 1] };
        let idx = index_table(&fixture());
        assert_eq!(stratify(&prof, &idx, 100.0).unwrap().len(), 2);
        assert_eq!(stratify(&prof, &idx, 100.5).unwrap().len(), 1);
        assert!(stratify(&prof, &idx, 1.0).is_err());
    }

    #[test]
    fn local_indices_are_consistent() {
        let poly = p(&[0, 2, 3, 7, 8, 12], &[1e-9, 3e-3, 1.0, 2.0, 1e6, 1.0]);
        let (_, dec) = decompose(&poly, 10.0).unwrap();
        assert_eq!(dec.root_counts().iter().sum::<usize>(), 12);
        for t in &dec.tiers {
            assert_eq!(t.local_d[t.l], t.root_count);
            assert_eq!(t.local_k[t.l], t.root_count);
            for j in 0..=t.l {
                assert_eq!(t.local_k[j], t.root_count - t.local_d[t.l - j]);
            }
        }
    }

    #[test]
    fn assignment_and_residuals() {
        let poly = fixture();
        let (_, dec) = decompose(&poly, 10.0).unwrap();
        let roots = find_roots(&poly, &RootFindConfig::default()).unwrap();
        let a = assign_roots(&dec, &roots).unwrap();
        assert!((a.tiers[0].roots[0].0 - 100.0).norm() < 1e-12);
        assert!((a.tiers[1].roots[0].0 - 1.0).norm() < 1e-12);
        let res = tier_symmetric_residuals(&a, &dec).unwrap();
        assert!((res[0].distinguished - 1.0 / 101.0).abs() < 1e-12);
        assert!(res[1].distinguished < 1e-14);
    }

    #[test]
    fn single_tier_residual_is_rounding() {
        let poly = p(&[0, 9, 18], &[2.0, 3.0, 1.0]);
        let (_, dec) = decompose(&poly, DEFAULT_SEPARATION).unwrap();
        let roots = find_roots(&poly, &RootFindConfig::default()).unwrap();
        let a = assign_roots(&dec, &roots).unwrap();
        let res = tier_symmetric_residuals(&a, &dec).unwrap();
        assert!(res[0].distinguished < 1e-12 && res[0].vanishing < 1e-12);
    }

    #[test]
    fn cluster_counts() {
        let roots = find_roots(&p(&[0, 9], &[-512.0, 1.0]), &RootFindConfig::default()).unwrap();
        assert_eq!(verify_cluster_counts(&roots, 0.1, 1).max_count, 1);
        for a in [1.0, 10.0, 100.0] {
            // (t^9 - a)^2
            let poly = p(&[0, 9, 18], &[a * a, -2.0 * a, 1.0]);
            let roots = find_roots(&poly, &RootFindConfig::default()).unwrap();
            for eps in [0.05, 0.01] {
                assert_eq!(verify_cluster_counts(&roots, eps, 2).max_count, 2);
            }
        }
    }

    #[test]
    fn refine_examples() {
        let Refinement::Applicable(c) = refine(&p(&[0, 3], &[0.2, 1.0]), 0.5, 0.1, DEFAULT_SEPARATION).unwrap() else {
            panic!()
        };
        assert_eq!((c.m, c.s1, c.s2, c.small_cap), (1, 0, 1, Some(1)));

        let poly = p(&[0, 1, 2, 3], &[0.5, 0.5, 1.0, 1e-18]);
        let Refinement::Applicable(c) = refine(&poly, 0.5, 1e-3, DEFAULT_SEPARATION).unwrap() else { panic!() };
        assert_eq!((c.m, c.s1, c.s2), (2, 1, 1));
        assert_eq!((c.large_cap, c.small_cap), (Some(1), Some(2)));

        let flat = p(&[0, 1, 2], &[0.3, 1.0, 1.0]);
        assert!(matches!(refine(&flat, 0.5, 0.1, 10.0).unwrap(), Refinement::NotApplicable { .. }));
        assert!(refine(&p(&[0, 1], &[1.0, 2.0]), 0.5, 0.1, 10.0).is_err());
    }

    #[test]
    fn pivot_normalisation() {
        let (q, sigma) = normalize_pivot(&p(&[0, 2, 5], &[3.0, 40.0, 2.0]));
        let top = root_sizes(&q).into_iter().fold(0.0, f64::max);
        assert!(top <= 1.0 && top > 1.0 - 1e-12);
        assert!(sigma > 0.0);
    }
}
