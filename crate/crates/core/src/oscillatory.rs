//! Oscillatory integrals `∫ e^{iΦ(t)} dt` with a sparse polynomial phase:
//! the coefficient bound, the cluster bound over roots of `Φ'`, a windowed
//! quadrature and the sharpness slope experiment.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::{pairwise_sum, RootMultiset, SparsePolynomial};

/// `Φ(t) = x t + Σ y_j t^{k_j+1} / (k_j + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyPhase {
    pub x: f64,
    pub ys: Vec<f64>,
    pub ks: Vec<usize>,
}

impl PolyPhase {
    pub fn new(x: f64, ys: Vec<f64>, ks: Vec<usize>) -> Result<Self> {
        if ys.is_empty() || ys.len() != ks.len() {
            return invalid("need matching, non-empty y and k");
        }
        if ks[0] < 2 || ks.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("exponents must increase strictly from k_1 >= 2");
        }
        if *ys.last().unwrap() == 0.0 {
            return invalid("y_L must be nonzero");
        }
        if !x.is_finite() || ys.iter().any(|y| !y.is_finite()) {
            return invalid("coefficients must be finite");
        }
        Ok(Self { x, ys, ks })
    }

    /// The phase whose derivative is `poly` (so `Φ(0) = 0`).
    pub fn from_derivative(poly: &SparsePolynomial) -> Result<Self> {
        Self::new(poly.x(), poly.coefficients()[1..].to_vec(), poly.exponents()[1..].to_vec())
    }

    pub fn l(&self) -> usize {
        self.ys.len()
    }

    pub fn derivative(&self) -> SparsePolynomial {
        let mut e = vec![0];
        e.extend(&self.ks);
        let mut c = vec![self.x];
        c.extend(&self.ys);
        SparsePolynomial::new(e, c).expect("validated phase")
    }

    pub fn value(&self, t: f64) -> f64 {
        let mut v = self.x * t;
        for (&y, &k) in self.ys.iter().zip(&self.ks) {
            v += y * t.powi(k as i32 + 1) / (k + 1) as f64;
        }
        v
    }

    pub fn slope(&self, t: f64) -> f64 {
        let mut v = self.x;
        for (&y, &k) in self.ys.iter().zip(&self.ks) {
            v += y * t.powi(k as i32);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBound {
    /// `min_j |y_j|^{-1/(k_j+1)}`.
    pub value: f64,
    /// Index `j` (1-based) attaining the minimum.
    pub argmin: usize,
    /// Pivot `m` (1-based), a maximiser of `|y_j|^{1/k_j}`.
    pub pivot: usize,
    /// `k_1 >= L`.
    pub k1_condition: bool,
    /// `k_m >= L - m + 1`.
    pub pivot_condition: bool,
}

impl CoefficientBound {
    pub fn applicable(&self) -> bool {
        self.k1_condition || self.pivot_condition
    }
}

pub fn coefficient_bound(phase: &PolyPhase) -> Result<CoefficientBound> {
    if phase.ys.iter().all(|&y| y == 0.0) {
        return invalid("all y_j are zero");
    }
    let l = phase.l();
    let mut value = f64::INFINITY;
    let mut argmin = 0;
    let mut pivot = 0;
    let mut top = f64::NEG_INFINITY;
    for (j, (&y, &k)) in phase.ys.iter().zip(&phase.ks).enumerate() {
        if y == 0.0 {
            continue;
        }
        let v = (-y.abs().ln() / (k + 1) as f64).exp();
        if v < value {
            value = v;
            argmin = j + 1;
        }
        let s = y.abs().ln() / k as f64;
        if s > top {
            top = s;
            pivot = j + 1;
        }
    }
    Ok(CoefficientBound {
        value,
        argmin,
        pivot,
        k1_condition: phase.ks[0] >= l,
        pivot_condition: phase.ks[pivot - 1] + pivot >= l + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterSearch {
    /// All clusters through each root; at most 24 roots.
    Exact,
    /// Per root: its ball neighbours, topped up with the smallest roots, at every size.
    TierGuided,
    /// Exact up to 16 roots, tier-guided beyond.
    Auto,
}

pub const EXACT_CLUSTER_LIMIT: usize = 16;
pub const EXACT_CLUSTER_CAPACITY: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhongSteinBound {
    pub value: f64,
    pub exact: bool,
}

fn cluster_value(y_l: f64, log_dists: &[f64], outside: impl Iterator<Item = usize>, size: usize) -> f64 {
    let s: f64 = outside.map(|i| log_dists[i]).sum();
    (-(y_l.abs().ln() + s) / (size + 1) as f64).exp()
}

/// `max_j min_{C ∋ z_j} (|y_L| ∏_{l ∉ C} |z_j - z_l|)^{-1/(|C|+1)}`, without the
/// unknown constant.
pub fn phong_stein_bound(roots: &RootMultiset, y_l: f64, search: ClusterSearch) -> Result<PhongSteinBound> {
    let units = roots.sorted_by_magnitude();
    let n = units.len();
    if n == 0 {
        return invalid("no roots");
    }
    let exact = match search {
        ClusterSearch::Exact => {
            if n > EXACT_CLUSTER_CAPACITY {
                return Err(Error::Capacity { what: "roots for exact cluster search", got: n, limit: EXACT_CLUSTER_CAPACITY });
            }
            true
        }
        ClusterSearch::TierGuided => false,
        ClusterSearch::Auto => n <= EXACT_CLUSTER_LIMIT,
    };
    let per_root: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let log_d: Vec<f64> = (0..n).map(|l| (units[j] - units[l]).norm().ln()).collect();
            let others: Vec<usize> = (0..n).filter(|&l| l != j).collect();
            let mut best = f64::INFINITY;
            if exact {
                for mask in 0u32..(1u32 << others.len()) {
                    let size = 1 + mask.count_ones() as usize;
                    let out = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 0).map(|(_, &l)| l);
                    best = best.min(cluster_value(y_l, &log_d, out, size));
                }
            } else {
                // {z_j}, then roots within ε|z_j|, then the smallest roots.
                let eps = 0.05;
                let mut order: Vec<usize> =
                    others.iter().cloned().filter(|&l| (units[l] - units[j]).norm() <= eps * units[j].norm()).collect();
                for l in (0..n).rev() {
                    if l != j && !order.contains(&l) {
                        order.push(l);
                    }
                }
                for size in 1..=n {
                    let inside = &order[..size - 1];
                    let out = others.iter().cloned().filter(|l| !inside.contains(l));
                    best = best.min(cluster_value(y_l, &log_d, out, size));
                }
            }
            best
        })
        .collect();
    let value = per_root.into_iter().fold(0.0, f64::max);
    Ok(PhongSteinBound { value, exact })
}

/// Smooth step: 1 at `s <= 0`, 0 at `s >= 1`, `C^∞` in between.
pub fn taper(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let f = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    let a = f(1.0 - s);
    a / (a + f(s))
}

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];
// 8-point rule for the error estimate.
const GL8_X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Largest number of panels one integral may use.
pub const PANEL_BUDGET: usize = 20_000_000;

fn panel(phase: &PolyPhase, t_half: f64, w: f64, a: f64, b: f64, depth: u32) -> Option<Complex64> {
    let f = |t: f64| {
        let chi = taper((t.abs() - t_half) / w);
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(chi, phase.value(t))
    };
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut i16 = Complex64::new(0.0, 0.0);
    for (x, wt) in GL16_X.iter().zip(GL16_W) {
        i16 += (f(c - r * x) + f(c + r * x)) * wt;
    }
    let mut i8 = Complex64::new(0.0, 0.0);
    for (x, wt) in GL8_X.iter().zip(GL8_W) {
        i8 += (f(c - r * x) + f(c + r * x)) * wt;
    }
    let (i16, i8) = (i16 * r, i8 * r);
    if (i16 - i8).norm() <= 1e-10 * (b - a).max(1e-300) || depth >= 12 {
        if depth >= 12 && (i16 - i8).norm() > 1e-8 * (b - a) {
            return None;
        }
        return Some(i16);
    }
    let left = panel(phase, t_half, w, a, c, depth + 1)?;
    let right = panel(phase, t_half, w, c, b, depth + 1)?;
    Some(left + right)
}

/// `∫ e^{iΦ(t)} χ(t) dt` with `χ = 1` on `[-T, T]`, tapering smoothly to 0
/// at `±(T + w)`.
pub fn windowed_integral(phase: &PolyPhase, t_half: f64, taper_width: f64) -> Result<Complex64> {
    if !(t_half > 0.0) || !(taper_width > 0.0) {
        return invalid("window and taper widths must be positive");
    }
    let end = t_half + taper_width;
    let mut edges = vec![-end];
    let mut a = -end;
    while a < end {
        let mut h = std::f64::consts::PI / (1.0 + phase.slope(a).abs());
        for _ in 0..3 {
            let mid = (a + 0.5 * h).min(end);
            let far = (a + h).min(end);
            let g = phase.slope(a).abs().max(phase.slope(mid).abs()).max(phase.slope(far).abs());
            h = std::f64::consts::PI / (1.0 + g);
        }
        a = (a + h).min(end);
        edges.push(a);
        if edges.len() > PANEL_BUDGET {
            return Err(Error::Accuracy {
                estimate: Complex64::new(f64::NAN, f64::NAN),
                message: format!("more than {PANEL_BUDGET} panels"),
            });
        }
    }
    let parts: Vec<Option<Complex64>> =
        edges.par_windows(2).map(|e| panel(phase, t_half, taper_width, e[0], e[1], 0)).collect();
    let failed = parts.iter().filter(|p| p.is_none()).count();
    let vals: Vec<Complex64> = parts.into_iter().map(|p| p.unwrap_or_default()).collect();
    let total = pairwise_sum(&vals);
    if failed > 0 {
        return Err(Error::Accuracy { estimate: total, message: format!("{failed} panels did not converge") });
    }
    Ok(total)
}

/// Windowed integral with the default taper width `T/4`.
pub fn windowed_integral_default(phase: &PolyPhase, t_half: f64) -> Result<Complex64> {
    windowed_integral(phase, t_half, 0.25 * t_half)
}

/// The phase with `Φ'(t) = y (t^k - 1)^l`.
pub fn sharpness_phase(k: usize, l: usize, y: f64) -> Result<PolyPhase> {
    if k == 0 || l == 0 {
        return invalid("k and l must be positive");
    }
    let mut exps = Vec::new();
    let mut coefs = Vec::new();
    for i in 0..=l {
        let c = crate::series::binomial(l as i64, i as i64);
        let c: f64 = num_traits::ToPrimitive::to_f64(&c).unwrap();
        let sign = if (l - i) % 2 == 0 { 1.0 } else { -1.0 };
        exps.push(k * i);
        coefs.push(y * sign * c);
    }
    PolyPhase::from_derivative(&SparsePolynomial::new(exps, coefs)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub expected: f64,
    /// `(y, |I|)` used in the fit.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of `log |I|` against `log y` for `Φ' = y (t^k - 1)^l`.
///
/// When `Φ'` has two real zeros (`k` even) the two stationary contributions
/// beat against each other with period `2π / c` in `y`, where `c = |Φ(1) -
/// Φ(-1)| / y`; each grid value is replaced by the peak over one such period.
pub fn sharpness_slope(k: usize, l: usize, ys: &[f64]) -> Result<SlopeFit> {
    if ys.len() < 2 {
        return invalid("need at least two grid values");
    }
    let unit = sharpness_phase(k, l, 1.0)?;
    let c = (unit.value(1.0) - unit.value(-1.0)).abs();
    let window = 1.5;
    let mut points = Vec::new();
    for &y0 in ys {
        let mut peak: f64 = 0.0;
        let scan: Vec<f64> = if k % 2 == 0 && c > 0.0 {
            let period = 2.0 * std::f64::consts::PI / c;
            (0..16).map(|i| y0 + period * i as f64 / 16.0).collect()
        } else {
            vec![y0]
        };
        for y in scan {
            let v = windowed_integral_default(&sharpness_phase(k, l, y)?, window)?.norm();
            peak = peak.max(v);
        }
        points.push((y0, peak));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let zs: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let mz = zs.iter().sum::<f64>() / zs.len() as f64;
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(SlopeFit { slope: sxz / sxx, expected: -1.0 / (l as f64 + 1.0), points })
}

/// Upper bound for the root magnitudes of `Φ'` (Fujiwara).
pub fn root_bound(phase: &PolyPhase) -> f64 {
    let d = phase.derivative();
    let n = d.degree();
    let lead = d.leading().abs();
    let mut b: f64 = 0.0;
    for j in 0..d.l() {
        let c = d.y(j).abs() / lead;
        if c == 0.0 {
            continue;
        }
        let gap = (n - d.k(j)) as f64;
        let c = if d.k(j) == 0 { c / 2.0 } else { c };
        b = b.max(c.powf(1.0 / gap));
    }
    2.0 * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{find_roots, RootFindConfig};

    #[test]
    fn bound_examples() {
        let b = coefficient_bound(&PolyPhase::new(0.0, vec![1.0], vec![3]).unwrap()).unwrap();
        assert_eq!(b.value, 1.0);
        assert!(b.k1_condition);
        let b = coefficient_bound(&PolyPhase::new(0.0, vec![1e4, 1.0], vec![4, 9]).unwrap()).unwrap();
        assert!((b.value - 10f64.powf(-0.8)).abs() < 1e-12);
        assert_eq!((b.argmin, b.pivot), (1, 1));
        assert!(b.pivot_condition && b.k1_condition);
        let b = coefficient_bound(&PolyPhase::new(0.0, vec![1.0, 1.0, 1.0], vec![2, 3, 4]).unwrap()).unwrap();
        assert!(!b.k1_condition);
    }

    #[test]
    fn phong_stein_examples() {
        let r = RootMultiset::new(vec![(Complex64::new(0.5, 0.0), 4)]).unwrap();
        let b = phong_stein_bound(&r, 2.0, ClusterSearch::Exact).unwrap();
        assert!((b.value - 2f64.powf(-1.0 / 5.0)).abs() < 1e-12);

        let r = RootMultiset::simple([Complex64::new(2.0, 0.0), Complex64::new(0.01, 0.0)]);
        let b = phong_stein_bound(&r, 1.0, ClusterSearch::Exact).unwrap();
        // Singleton clusters give (1.99)^{-1/2}; the pair gives 1^{-1/3} = 1.
        assert!((b.value - 1.99f64.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn tier_guided_never_beats_exact() {
        let poly = SparsePolynomial::new(vec![0, 3, 7], vec![0.3, -2.0, 1.0]).unwrap();
        let roots = find_roots(&poly, &RootFindConfig::default()).unwrap();
        let e = phong_stein_bound(&roots, 1.0, ClusterSearch::Exact).unwrap().value;
        let g = phong_stein_bound(&roots, 1.0, ClusterSearch::TierGuided).unwrap().value;
        assert!(g >= e * (1.0 - 1e-12) && g <= 10.0 * e);
    }

    #[test]
    fn exact_capacity() {
        let r = RootMultiset::simple((0..25).map(|i| Complex64::from_polar(1.0, i as f64)));
        assert!(matches!(phong_stein_bound(&r, 1.0, ClusterSearch::Exact), Err(Error::Capacity { .. })));
    }

    #[test]
    fn airy_value() {
        let phase = PolyPhase::new(0.0, vec![1.0], vec![2]).unwrap();
        let target = 2.0 * std::f64::consts::PI * 0.355_028_053_887_817_2;
        for t in [20.0, 40.0] {
            let v = windowed_integral_default(&phase, t).unwrap();
            assert!((v.re - target).abs() < 1e-6, "T={t}: {v}");
            assert!(v.im.abs() < 1e-8);
        }
    }

    #[test]
    fn non_stationary_decay() {
        let mut last = f64::INFINITY;
        for x in [50.0, 200.0, 800.0] {
            let phase = PolyPhase::new(x, vec![1.0], vec![2]).unwrap();
            let v = windowed_integral_default(&phase, 4.0).unwrap().norm();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn taper_shape() {
        assert_eq!(taper(-1.0), 1.0);
        assert_eq!(taper(1.0), 0.0);
        assert!((taper(0.5) - 0.5).abs() < 1e-15);
        assert!(taper(0.2) > taper(0.3));
    }

    #[test]
    fn sharpness_phase_derivative() {
        let ph = sharpness_phase(2, 2, 3.0).unwrap();
        for t in [-1.3, 0.2, 1.0, 2.0] {
            let expect = 3.0 * (t * t - 1.0f64).powi(2);
            assert!((ph.slope(t) - expect).abs() < 1e-12);
        }
    }
}
