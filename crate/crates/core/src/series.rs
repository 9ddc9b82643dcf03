//! Exact combinatorics behind the single-tier cluster bound: the `a_m(j,l)`
//! recurrence and its closed form, the distinguished-root series residual,
//! and the cluster matrix `M`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::symmetric_all;

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `(-1)^{j-1} C(m-1+j, l-1) C(m-1+j-l, j-1)`.
pub fn a_closed(m: usize, j: usize, l: usize) -> Result<BigInt> {
    if m == 0 || j == 0 || l == 0 || l > m {
        return Err(Error::Index { index: l, max: m });
    }
    let (m, j, l) = (m as i64, j as i64, l as i64);
    let v = binomial(m - 1 + j, l - 1) * binomial(m - 1 + j - l, j - 1);
    Ok(if j % 2 == 1 { v } else { -v })
}

/// `a_m(j, l)` for `1 <= j <= D - m`, computed from the recurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub m: usize,
    pub d: usize,
    /// `b = max{1, m - (D - m) + 1}`.
    pub b: usize,
    /// `rows[j-1][l]` for `l = 0..=m + D - m + 1`.
    rows: Vec<Vec<BigInt>>,
}

impl CoefficientTable {
    pub fn j_max(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, j: usize, l: usize) -> BigInt {
        self.rows.get(j.wrapping_sub(1)).and_then(|r| r.get(l)).cloned().unwrap_or_default()
    }

    /// `a_m(j, m)`, the coefficients the series expansion uses.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (1..=self.j_max()).map(|j| self.get(j, self.m)).collect()
    }
}

fn boundary(m: usize, d: usize) -> usize {
    (2 * m + 1).saturating_sub(d).max(1)
}

pub fn a_recurrence_table(m: usize, d: usize) -> Result<CoefficientTable> {
    if m == 0 || m > d {
        return invalid(format!("need 1 <= m <= D, got m={m}, D={d}"));
    }
    let b = boundary(m, d);
    let jmax = d - m;
    let width = m + jmax + 2;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(jmax);
    if jmax == 0 {
        return Ok(CoefficientTable { m, d, b, rows });
    }
    let first: Vec<BigInt> = (0..width)
        .map(|l| if l >= b && l <= m { binomial(m as i64, l as i64 - 1) } else { BigInt::zero() })
        .collect();
    rows.push(first);
    for _ in 1..jmax {
        let prev = rows.last().unwrap();
        let diag = prev[m].clone();
        let next: Vec<BigInt> = (0..width)
            .map(|l| {
                let shifted = if l == 0 { BigInt::zero() } else { prev[l - 1].clone() };
                if l >= b && l <= m {
                    shifted - binomial(m as i64, l as i64 - 1) * &diag
                } else {
                    shifted
                }
            })
            .collect();
        rows.push(next);
    }
    Ok(CoefficientTable { m, d, b, rows })
}

/// Diagonal `a'_m(j, m)` of the recurrence that falls out of the elimination
/// procedure directly. Used only to confirm it agrees with the table's
/// diagonal.
pub(crate) fn derived_diagonal(m: usize, d: usize) -> Vec<BigInt> {
    let jmax = d - m;
    if jmax == 0 {
        return Vec::new();
    }
    // Second index p = m + 1 - l ranges down to m + 1 - (m + jmax).
    let lo = 1 - jmax as i64 - 1;
    let hi = m as i64 + 1;
    let width = (hi - lo + 1) as usize;
    let at = |p: i64| (p - lo) as usize;
    let mut row = vec![BigInt::zero(); width];
    for p in lo..=hi {
        let l = m as i64 + 1 - p;
        if l >= 1 && l <= (m.min(d - m)) as i64 {
            row[at(p)] = binomial(m as i64, l);
        }
    }
    let mut diag = vec![row[at(m as i64)].clone()];
    for j in 1..jmax {
        let top = (m as i64).min(d as i64 - m as i64 - j as i64);
        let am = row[at(m as i64)].clone();
        let mut next = vec![BigInt::zero(); width];
        for p in lo..=hi {
            let l = m as i64 + 1 - p;
            let mut v = if p - 1 >= lo { row[at(p - 1)].clone() } else { BigInt::zero() };
            if l >= 1 && l <= top {
                v -= binomial(m as i64, l) * &am;
            }
            next[at(p)] = v;
        }
        row = next;
        diag.push(row[at(m as i64)].clone());
    }
    diag
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TableComparison {
    pub entries_checked: usize,
    /// `(m, D, j, l, recurrence, closed)` for every disagreement off the diagonal.
    pub off_diagonal_mismatches: Vec<(usize, usize, usize, usize, String, String)>,
    pub diagonal_checked: usize,
    pub diagonal_mismatches: usize,
    /// Tables whose diagonal differs from the one the elimination yields.
    pub derived_diagonal_mismatches: usize,
}

/// Recurrence against closed form on `b <= l <= m`, `1 <= j <= D - m`, for all
/// `m <= m_max`, `m <= D <= d_max`.
pub fn compare_recurrence_closed(m_max: usize, d_max: usize) -> TableComparison {
    let mut out = TableComparison::default();
    for m in 1..=m_max {
        for d in m..=d_max {
            let t = a_recurrence_table(m, d).expect("valid range");
            if derived_diagonal(m, d) != t.diagonal() {
                out.derived_diagonal_mismatches += 1;
            }
            for j in 1..=t.j_max() {
                for l in t.b..=m {
                    let rec = t.get(j, l);
                    let closed = a_closed(m, j, l).expect("valid range");
                    if l == m {
                        out.diagonal_checked += 1;
                        if rec != closed {
                            out.diagonal_mismatches += 1;
                        }
                    } else if rec != closed {
                        out.off_diagonal_mismatches.push((m, d, j, l, rec.to_string(), closed.to_string()));
                    }
                    out.entries_checked += 1;
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResidual {
    pub residual: Complex64,
    /// `|ε|` over the summed magnitudes of the terms it is the difference of.
    pub relative: f64,
    /// `max |w - w'|` over highlighted pairs.
    pub diameter: f64,
    /// `|ε| / (diameter · h^{D-m-1})`; `None` when the diameter is 0.
    pub bound_ratio: Option<f64>,
}

/// `ε = S_{D-m}(T) - ∏_{excluded}(-w) - Σ_j a_m(j) (-w_1)^j S_{D-m-j}(T)`.
///
/// `highlighted` indexes into `tier`; its first entry is `w_1`.
pub fn expansion_residual(tier: &[Complex64], highlighted: &[usize]) -> Result<ExpansionResidual> {
    let d = tier.len();
    let m = highlighted.len();
    if m == 0 || m > d {
        return invalid(format!("need 1 <= m <= D, got m={m}, D={d}"));
    }
    let mut seen = vec![false; d];
    for &i in highlighted {
        if i >= d || seen[i] {
            return invalid("highlighted indices must be distinct and in range");
        }
        seen[i] = true;
    }
    let s = symmetric_all(tier);
    let w1 = tier[highlighted[0]];
    let excluded: Complex64 = (0..d).filter(|&i| !seen[i]).map(|i| -tier[i]).product();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mags = s[d - m].norm() + excluded.norm();
    for j in 1..=d - m {
        let a = binomial((m - 1 + j) as i64, (m - 1) as i64).to_f64().unwrap_or(f64::INFINITY);
        let a = if j % 2 == 1 { a } else { -a };
        let term = crate::poly::powi(-w1, j) * s[d - m - j] * a;
        mags += term.norm();
        sum += term;
    }
    let residual = s[d - m] - excluded - sum;
    let mut diameter: f64 = 0.0;
    for &i in highlighted {
        for &k in highlighted {
            diameter = diameter.max((tier[i] - tier[k]).norm());
        }
    }
    let h = tier.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound_ratio = (diameter > 0.0).then(|| {
        let scale = diameter * (((d - m) as f64 - 1.0) * h.ln()).exp();
        residual.norm() / scale
    });
    let relative = if mags > 0.0 { residual.norm() / mags } else { 0.0 };
    Ok(ExpansionResidual { residual, relative, diameter, bound_ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterMatrix {
    pub ktilde: Vec<u64>,
    /// Row `m-1`, column `b-1` holds `M(m, b)`.
    pub entries: Vec<Vec<BigInt>>,
    pub determinant: BigInt,
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `M(m,b) = (-1)^{k_{b-1} - m - 1} / (m-1)! · ∏_{i=1}^{m-1} (k_{b-1} - i)`.
pub fn cluster_matrix(ktilde: &[u64]) -> Result<ClusterMatrix> {
    if ktilde.first() != Some(&0) {
        return invalid("k~ must start at 0");
    }
    if ktilde.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("k~ must be strictly increasing");
    }
    let n = ktilde.len();
    let mut entries = vec![vec![BigInt::zero(); n]; n];
    for m in 1..=n {
        let fact = factorial(m as u64 - 1);
        for b in 1..=n {
            let k = ktilde[b - 1] as i64;
            let mut prod = BigInt::one();
            for i in 1..m as i64 {
                prod *= k - i;
            }
            debug_assert!((&prod % &fact).is_zero());
            let v = prod / &fact;
            let exponent = k - m as i64 - 1;
            entries[m - 1][b - 1] = if exponent.rem_euclid(2) == 0 { v } else { -v };
        }
    }
    let determinant = bareiss_determinant(&entries);
    Ok(ClusterMatrix { ktilde: ktilde.to_vec(), entries, determinant })
}

/// Fraction-free Gaussian elimination; exact for integer matrices.
pub fn bareiss_determinant(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantSweep {
    pub matrices: usize,
    /// Sequences whose matrix is singular.
    pub singular: Vec<Vec<u64>>,
    pub min_abs_determinant: String,
}

fn increasing_sequences(len: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64];
    fn rec(cur: &mut Vec<u64>, len: usize, max: u64, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len + 1 {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().unwrap() + 1;
        for k in start..=max {
            cur.push(k);
            rec(cur, len, max, out);
            cur.pop();
        }
    }
    rec(&mut cur, len, max, &mut out);
    out
}

/// Every `0 < k_1 < ... < k_L` with `1 <= L <= len_max` and `k_L <= k_max`.
pub fn sweep_cluster_determinants(len_max: usize, k_max: u64) -> DeterminantSweep {
    let seqs: Vec<Vec<u64>> = (1..=len_max).flat_map(|l| increasing_sequences(l, k_max)).collect();
    let dets: Vec<(Vec<u64>, BigInt)> = seqs
        .into_par_iter()
        .map(|k| {
            let det = cluster_matrix(&k).expect("valid sequence").determinant;
            (k, det)
        })
        .collect();
    let singular = dets.iter().filter(|(_, d)| d.is_zero()).map(|(k, _)| k.clone()).collect();
    let min_abs = dets.iter().map(|(_, d)| d.abs()).min().unwrap_or_default();
    DeterminantSweep { matrices: dets.len(), singular, min_abs_determinant: min_abs.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn closed_form_examples() {
        for m in 1..=10 {
            assert_eq!(a_closed(m, 1, m).unwrap(), bi(m as i64));
        }
        assert_eq!(a_closed(3, 2, 3).unwrap(), bi(-6));
        for j in 1..12 {
            assert_eq!(a_closed(1, j, 1).unwrap(), bi(if j % 2 == 1 { 1 } else { -1 }));
        }
        assert!(a_closed(2, 1, 3).is_err());
    }

    #[test]
    fn recurrence_examples() {
        let t = a_recurrence_table(1, 5).unwrap();
        for j in 1..=4 {
            assert_eq!(t.get(j, 1), bi(if j % 2 == 1 { 1 } else { -1 }));
        }
        let t = a_recurrence_table(2, 6).unwrap();
        for j in 1..=4 {
            let s = if j % 2 == 1 { 1 } else { -1 };
            assert_eq!(t.get(j, 2), bi(s * (j as i64 + 1)));
        }
    }

    #[test]
    fn off_diagonal_disagreement_when_boundary_is_active() {
        // b = 2 here; the recurrence and the closed form part ways at l = b.
        let t = a_recurrence_table(3, 5).unwrap();
        assert_eq!(t.b, 2);
        assert_eq!(t.get(2, 2), bi(-9));
        assert_eq!(a_closed(3, 2, 2).unwrap(), bi(-8));
        let t = a_recurrence_table(4, 6).unwrap();
        assert_eq!((t.get(2, 3), a_closed(4, 2, 3).unwrap()), (bi(-24), bi(-20)));
    }

    #[test]
    fn recurrence_matches_closed_form_when_b_is_one() {
        for m in 1..=8 {
            for d in 2 * m..=20 {
                let t = a_recurrence_table(m, d).unwrap();
                assert_eq!(t.b, 1);
                for j in 1..=t.j_max() {
                    for l in 1..=m {
                        assert_eq!(t.get(j, l), a_closed(m, j, l).unwrap(), "m={m} D={d} j={j} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn diagonals_agree_everywhere() {
        let cmp = compare_recurrence_closed(8, 20);
        assert_eq!(cmp.diagonal_mismatches, 0);
        for m in 1..=8 {
            for d in m..=20 {
                let t = a_recurrence_table(m, d).unwrap();
                assert_eq!(derived_diagonal(m, d), t.diagonal(), "m={m} D={d}");
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let k1 = 5i64;
        let k2 = 9i64;
        let m = cluster_matrix(&[0, k1 as u64, k2 as u64]).unwrap();
        let sgn = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        let expect = vec![
            vec![bi(1), bi(sgn(k1 - 2)), bi(sgn(k2 - 2))],
            vec![bi(1), bi(sgn(k1 - 3) * (k1 - 1)), bi(sgn(k2 - 3) * (k2 - 1))],
            vec![
                bi(1),
                bi(sgn(k1 - 4) * (k1 - 2) * (k1 - 1) / 2),
                bi(sgn(k2 - 4) * (k2 - 2) * (k2 - 1) / 2),
            ],
        ];
        assert_eq!(m.entries, expect);

        let m = cluster_matrix(&[0, 2, 7]).unwrap();
        assert_eq!(m.entries[1][1], bi(-1));
        assert_eq!(m.entries[2][1], bi(0));
        assert_eq!(m.entries[0][1], bi(1));

        for k in 1..40 {
            assert!(!cluster_matrix(&[0, k]).unwrap().determinant.is_zero());
        }
        assert!(cluster_matrix(&[0, 3, 3]).is_err());
        assert!(cluster_matrix(&[1, 3]).is_err());
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let a = vec![vec![bi(2), bi(-1), bi(0)], vec![bi(0), bi(0), bi(3)], vec![bi(1), bi(4), bi(5)]];
        // 2(0-12) - (-1)(0-3) + 0 = -27
        assert_eq!(bareiss_determinant(&a), bi(-27));
    }

    #[test]
    fn residual_zero_for_single_highlight() {
        let tier: Vec<Complex64> = (0..8).map(|i| Complex64::from_polar(1.0 + 0.01 * i as f64, i as f64)).collect();
        for h in 0..8 {
            let r = expansion_residual(&tier, &[h]).unwrap();
            assert!(r.relative < 1e-13);
        }
        let mut twin = tier.clone();
        twin[1] = twin[0];
        twin[2] = twin[0];
        let r = expansion_residual(&twin, &[0, 1, 2]).unwrap();
        assert!(r.relative < 1e-13);
        assert!(r.bound_ratio.is_none());
        assert!(expansion_residual(&tier, &[0, 0]).is_err());
    }
}
