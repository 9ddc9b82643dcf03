//! Seeded generators for the test corpora: constructed polynomials with known
//! roots, random sparse polynomials, series multisets and oscillatory phases.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::oscillatory::{root_bound, PolyPhase};
use crate::poly::{RootMultiset, SparsePolynomial};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `∏_r (t^k - c_r)^{l_r}` together with its exact roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructedCase {
    pub k: usize,
    /// `c_r`; the roots of tier `r` have magnitude `|c_r|^{1/k}`.
    pub c: Vec<f64>,
    pub l: Vec<usize>,
    pub poly: SparsePolynomial,
    pub roots: RootMultiset,
}

impl ConstructedCase {
    pub fn heights(&self) -> Vec<f64> {
        self.c.iter().map(|c| c.abs().powf(1.0 / self.k as f64)).collect()
    }

    /// Exact roots of tier `r`, one entry per distinct root.
    pub fn tier_roots(&self, r: usize) -> Vec<Complex64> {
        tier_roots(self.k, self.c[r])
    }
}

fn tier_roots(k: usize, c: f64) -> Vec<Complex64> {
    let h = c.abs().powf(1.0 / k as f64);
    let shift = if c < 0.0 { std::f64::consts::PI / k as f64 } else { 0.0 };
    (0..k)
        .map(|i| Complex64::from_polar(h, shift + 2.0 * std::f64::consts::PI * i as f64 / k as f64))
        .map(|z| if z.im.abs() < 1e-15 * h { Complex64::new(z.re, 0.0) } else { z })
        .collect()
}

/// `∏_r (t^k - c_r)^{l_r}` for tiers listed from the largest.
pub fn constructed(k: usize, c: &[f64], l: &[usize]) -> Result<ConstructedCase> {
    if k == 0 || c.is_empty() || c.len() != l.len() || l.contains(&0) || c.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return invalid("need k >= 1 and matching nonzero c, positive l");
    }
    // Expand in u = t^k.
    let mut u = vec![1.0];
    for (&cr, &lr) in c.iter().zip(l) {
        for _ in 0..lr {
            let mut next = vec![0.0; u.len() + 1];
            for (i, &a) in u.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= cr * a;
            }
            u = next;
        }
    }
    let exps = (0..u.len()).map(|i| i * k).collect();
    let poly = SparsePolynomial::from_terms(exps, u)?;
    let mut roots = Vec::new();
    for (&cr, &lr) in c.iter().zip(l) {
        roots.extend(tier_roots(k, cr).into_iter().map(|z| (z, lr)));
    }
    Ok(ConstructedCase { k, c: c.to_vec(), l: l.to_vec(), poly, roots: RootMultiset::new(roots)? })
}

/// The same family written with root heights: `∏ (t^k - h_r^k)^{l_r}`.
pub fn height_family(k: usize, heights: &[f64], l: &[usize]) -> Result<ConstructedCase> {
    let c: Vec<f64> = heights.iter().map(|h| h.powi(k as i32)).collect();
    constructed(k, &c, l)
}

/// Log-uniform on `[10^lo, 10^hi]`.
fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo..=hi))
}

fn sign(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// `l_max` terms at most, exponents up to `k_max`, magnitudes log-uniform
/// over `10^{±decades}`.
pub fn random_sparse(rng: &mut impl Rng, l_max: usize, k_max: usize, decades: f64) -> SparsePolynomial {
    let l = rng.gen_range(1..=l_max.min(k_max));
    let mut ks: Vec<usize> = sample(rng, k_max, l).into_iter().map(|i| i + 1).collect();
    ks.sort_unstable();
    let mut exps = vec![0];
    exps.extend(ks);
    let coefs = (0..=l).map(|_| sign(rng) * log_uniform(rng, -decades, decades)).collect();
    SparsePolynomial::new(exps, coefs).expect("nonzero coefficients")
}

/// Tier shapes with heights roughly centred on 1 and consecutive ratios in
/// `[10^lo, 10^hi]`.
fn tiered_case(
    rng: &mut impl Rng,
    k: usize,
    l: Vec<usize>,
    ratio_decades: (f64, f64),
) -> ConstructedCase {
    let s = l.len();
    let mut logs = vec![0.0];
    for _ in 1..s {
        let step = rng.gen_range(ratio_decades.0..=ratio_decades.1);
        logs.push(logs.last().unwrap() - step);
    }
    let mid = 0.5 * (logs[0] + logs[s - 1]);
    let c: Vec<f64> = logs.iter().map(|lg| sign(rng) * 10f64.powf((lg - mid) * k as f64)).collect();
    constructed(k, &c, &l).expect("valid construction")
}

/// Heights corpus: `k ∈ [2, 7]`, up to three tiers, `l_r ∈ {1, 2, 3}` with
/// `Σ l_r <= 6`, consecutive height ratios in `[10^3, 10^4]`.
pub fn height_corpus(seed: u64, n: usize) -> Vec<ConstructedCase> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let k = r.gen_range(2..=7);
            let s = r.gen_range(1..=3);
            let l = loop {
                let l: Vec<usize> = (0..s).map(|_| r.gen_range(1..=3)).collect();
                if l.iter().sum::<usize>() <= 6 {
                    break l;
                }
            };
            tiered_case(&mut r, k, l, (3.0, 4.0))
        })
        .collect()
}

/// Separated corpus: `k ∈ [2, 5]`, `l_r ∈ {1, 2}` with `Σ l_r <= 3`, consecutive
/// ratios in `[min_ratio, 10 min_ratio]`.
pub fn separated_corpus(seed: u64, n: usize, min_ratio: f64) -> Vec<ConstructedCase> {
    let mut r = rng(seed);
    let lo = min_ratio.log10();
    (0..n)
        .map(|_| {
            let k = r.gen_range(2..=5);
            let l = loop {
                let s = r.gen_range(1..=3);
                let l: Vec<usize> = (0..s).map(|_| r.gen_range(1..=2)).collect();
                if l.iter().sum::<usize>() <= 3 {
                    break l;
                }
            };
            tiered_case(&mut r, k, l, (lo, lo + 1.0))
        })
        .collect()
}

/// One single-tier multiset with a highlighted cluster of a given diameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCase {
    pub roots: Vec<Complex64>,
    pub highlighted: Vec<usize>,
    pub diameter: f64,
}

/// `n` trials of 8-root multisets; each trial yields one case per diameter,
/// sharing the shape and with the highlighted cluster rescaled. The cluster
/// size cycles through `1..=7`.
pub fn series_corpus(seed: u64, n: usize, diameters: &[f64]) -> Vec<Vec<SeriesCase>> {
    const SIZE: usize = 8;
    let mut r = rng(seed);
    (0..n)
        .map(|trial| {
            let m = 1 + trial % 7;
            let centre = Complex64::from_polar(r.gen_range(0.5..=1.0), r.gen_range(0.0..std::f64::consts::TAU));
            let offsets: Vec<Complex64> =
                (0..m).map(|_| Complex64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0))).collect();
            let mut spread: f64 = 0.0;
            for a in &offsets {
                for b in &offsets {
                    spread = spread.max((a - b).norm());
                }
            }
            let others: Vec<Complex64> = (0..SIZE - m)
                .map(|_| loop {
                    let z = Complex64::from_polar(r.gen_range(0.1..=1.0), r.gen_range(0.0..std::f64::consts::TAU));
                    if (z - centre).norm() > 0.2 {
                        break z;
                    }
                })
                .collect();
            diameters
                .iter()
                .map(|&d| {
                    let scale = if spread > 0.0 { d / spread } else { 0.0 };
                    let mut roots: Vec<Complex64> = offsets.iter().map(|o| centre + o * scale).collect();
                    roots.extend(&others);
                    SeriesCase { roots, highlighted: (0..m).collect(), diameter: if m > 1 { d } else { 0.0 } }
                })
                .collect()
        })
        .collect()
}

/// Oscillatory corpus: `L <= 3`, `k_1 >= max(2, L)`, `k_L <= 6`, `|y_L| ∈ [0.1, 1]`,
/// other `|y_j|` log-uniform in `[10^-3, 1]`, `|x| <= 2`, roots of `Φ'` inside
/// radius 2.
pub fn phase_corpus(seed: u64, n: usize) -> Vec<PolyPhase> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let l = r.gen_range(1..=3);
        let lo = l.max(2);
        let mut ks: Vec<usize> = sample(&mut r, 6 - lo + 1, l).into_iter().map(|i| i + lo).collect();
        ks.sort_unstable();
        let mut ys: Vec<f64> = (0..l - 1).map(|_| sign(&mut r) * log_uniform(&mut r, -3.0, 0.0)).collect();
        ys.push(sign(&mut r) * r.gen_range(0.1..=1.0));
        let x = r.gen_range(-2.0..=2.0);
        let phase = PolyPhase::new(x, ys, ks).expect("valid phase");
        if root_bound(&phase) <= 2.0 {
            out.push(phase);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::evaluate;

    #[test]
    fn constructed_roots_are_roots() {
        let case = height_family(5, &[1e4, 1.0], &[2, 1]).unwrap();
        assert_eq!(case.poly.degree(), 15);
        assert_eq!(case.roots.count(), 15);
        for (z, _) in &case.roots.roots {
            let scale: f64 = case.poly.coefficients().iter().zip(case.poly.exponents()).map(|(c, &e)| c.abs() * z.norm().powi(e as i32)).sum();
            assert!(evaluate(&case.poly, *z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn negative_c_rotates() {
        let case = constructed(2, &[-4.0], &[1]).unwrap();
        let mut units = case.roots.units();
        units.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((units[0] - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert!((units[1] - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn corpora_are_deterministic() {
        assert_eq!(height_corpus(7, 5), height_corpus(7, 5));
        assert_eq!(phase_corpus(7, 5), phase_corpus(7, 5));
        let mut a = rng(1);
        let mut b = rng(1);
        assert_eq!(random_sparse(&mut a, 8, 40, 12.0), random_sparse(&mut b, 8, 40, 12.0));
    }

    #[test]
    fn corpus_shapes() {
        for case in height_corpus(3, 50) {
            assert!((2..=7).contains(&case.k) && case.l.iter().sum::<usize>() <= 6);
            let h = case.heights();
            assert!(h.windows(2).all(|w| w[0] / w[1] >= 1e3 * (1.0 - 1e-9)));
        }
        for ph in phase_corpus(3, 50) {
            assert!(ph.ks[0] >= ph.l().max(2) && *ph.ks.last().unwrap() <= 6);
        }
        let series = series_corpus(3, 14, &[0.1, 0.01]);
        assert_eq!(series[6][0].highlighted.len(), 7);
        assert_eq!(series[0][1].diameter, 0.0);
        assert!((series[3][1].diameter - 0.01).abs() < 1e-15);
    }
}
