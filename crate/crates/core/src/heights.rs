//! Height estimates from coefficient ratios, and the Newton polygon cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::poly::{index_table, SparsePolynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightProfile {
    /// `η_1 >= η_2 >= ... >= η_a`.
    pub etas: Vec<f64>,
    /// `α(0) = 0 < α(1) < ... < α(a) = L`.
    pub alphas: Vec<usize>,
    /// `D(α(b)) - D(α(b-1))`, the number of roots attributed to `η_b`.
    pub gaps: Vec<usize>,
}

impl HeightProfile {
    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

fn check(poly: &SparsePolynomial) -> Result<()> {
    if poly.l() == 0 {
        return invalid("polynomial has degree 0");
    }
    if poly.x() == 0.0 {
        return invalid("constant term is zero; deflate zero roots first");
    }
    Ok(())
}

/// `log|y_{L-j} / y_{L-a}| / (D(j) - D(a))`, the log of a candidate height.
fn log_ratio(poly: &SparsePolynomial, big_d: &[usize], a: usize, j: usize) -> f64 {
    let l = poly.l();
    (poly.y(l - j).abs().ln() - poly.y(l - a).abs().ln()) / (big_d[j] - big_d[a]) as f64
}

/// The height itself, taken from the coefficient ratio directly so that a
/// one-step gap is an exact division.
fn height(poly: &SparsePolynomial, big_d: &[usize], a: usize, j: usize) -> f64 {
    let l = poly.l();
    let g = big_d[j] - big_d[a];
    let ratio = (poly.y(l - j) / poly.y(l - a)).abs();
    if ratio.is_normal() {
        if g == 1 {
            ratio
        } else {
            ratio.powf(1.0 / g as f64)
        }
    } else {
        log_ratio(poly, big_d, a, j).exp()
    }
}

/// Greedy procedure: from `α(b)`, the next estimate is the largest of the
/// ratios over `j > α(b)`, and the maximiser becomes `α(b+1)`. Ties go to the
/// largest `j`.
pub fn estimate_heights(poly: &SparsePolynomial) -> Result<HeightProfile> {
    check(poly)?;
    let l = poly.l();
    let big_d = index_table(poly).big_d;
    let mut alphas = vec![0];
    let mut etas = Vec::new();
    let mut gaps = Vec::new();
    let mut a = 0;
    while a < l {
        let mut best = f64::NEG_INFINITY;
        let mut arg = a + 1;
        for j in a + 1..=l {
            let v = log_ratio(poly, &big_d, a, j);
            if v >= best {
                best = v;
                arg = j;
            }
        }
        etas.push(height(poly, &big_d, a, arg));
        gaps.push(big_d[arg] - big_d[a]);
        alphas.push(arg);
        a = arg;
    }
    Ok(HeightProfile { etas, alphas, gaps })
}

/// Same profile read off the upper convex hull of `(k_j, log|y_j|)`.
pub fn newton_polygon_heights(poly: &SparsePolynomial) -> Result<HeightProfile> {
    check(poly)?;
    let l = poly.l();
    let pts: Vec<(f64, f64)> =
        (0..=l).map(|i| (poly.k(i) as f64, poly.y(i).abs().ln())).collect();
    // Andrew's monotone chain, upper hull, right to left; collinear points dropped.
    let mut hull: Vec<usize> = Vec::new();
    for i in (0..=l).rev() {
        while hull.len() >= 2 {
            let o = pts[hull[hull.len() - 2]];
            let a = pts[hull[hull.len() - 1]];
            let b = pts[i];
            let cross = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let big_d = index_table(poly).big_d;
    let mut alphas = vec![0];
    let mut etas = Vec::new();
    let mut gaps = Vec::new();
    for w in hull.windows(2) {
        let (a, j) = (l - w[0], l - w[1]);
        etas.push(height(poly, &big_d, a, j));
        gaps.push(big_d[j] - big_d[a]);
        alphas.push(j);
    }
    Ok(HeightProfile { etas, alphas, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(e: &[usize], c: &[f64]) -> SparsePolynomial {
        SparsePolynomial::new(e.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let h = estimate_heights(&p(&[0, 6], &[-1.0, 1.0])).unwrap();
        assert_eq!((h.etas.clone(), h.alphas.clone()), (vec![1.0], vec![0, 1]));
        assert_eq!(newton_polygon_heights(&p(&[0, 6], &[-1.0, 1.0])).unwrap(), h);

        let poly = p(&[0, 1, 2], &[100.0, -101.0, 1.0]);
        let h = estimate_heights(&poly).unwrap();
        assert_eq!(h.alphas, vec![0, 1, 2]);
        assert!((h.etas[0] - 101.0).abs() < 1e-12);
        assert!((h.etas[1] - 100.0 / 101.0).abs() < 1e-14);
        assert_eq!(newton_polygon_heights(&poly).unwrap(), h);

        let h = estimate_heights(&p(&[0, 1, 2], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!((h.etas, h.alphas, h.gaps), (vec![1.0], vec![0, 2], vec![2]));
    }

    #[test]
    fn zero_constant_rejected() {
        let poly = SparsePolynomial::from_terms(vec![2, 5], vec![1.0, 1.0]).unwrap();
        assert!(estimate_heights(&poly).is_err());
        assert!(newton_polygon_heights(&poly).is_err());
    }

    #[test]
    fn rescaling_divides_heights() {
        let poly = p(&[0, 3, 7, 8], &[5.0, -2e3, 0.1, 1.0]);
        let h = estimate_heights(&poly).unwrap();
        let hs = estimate_heights(&poly.rescaled(10.0)).unwrap();
        assert_eq!(h.alphas, hs.alphas);
        for (a, b) in h.etas.iter().zip(&hs.etas) {
            assert!((a / 10.0 - b).abs() <= 1e-12 * b);
        }
    }
}
