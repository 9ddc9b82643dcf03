//! Independent root finder: Aberth iteration on the sparse form.
//!
//! Height estimates only place the starting circles; everything after that is
//! plain simultaneous iteration, inclusion-disk clustering and Newton polish.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::estimate_heights;
use crate::poly::{deflate_zero_roots, newton_ratio, RootMultiset, ScaledTerms, SparsePolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// One circle per height estimate.
    HeightCircles,
    /// Every start on one circle of radius `|x/y_L|^{1/k_L}`.
    SingleCircle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RootFindConfig {
    pub max_iterations: usize,
    /// Relative step size that counts as converged.
    pub tol: f64,
    /// Relative radius below which converged iterates are always merged.
    pub cluster_radius: f64,
    pub initial_guess: InitialGuess,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        Self { max_iterations: 2000, tol: 1e-14, cluster_radius: 1e-6, initial_guess: InitialGuess::HeightCircles }
    }
}

/// Residual threshold every returned root must meet.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

// 1/φ: irrational rotation between circles.
const ANGLE_OFFSET: f64 = 0.618_033_988_749_894_8;

fn initial_guesses(poly: &SparsePolynomial, how: InitialGuess) -> Result<Vec<Complex64>> {
    let n = poly.degree();
    let circles: Vec<(f64, usize)> = match how {
        InitialGuess::HeightCircles => {
            let prof = estimate_heights(poly)?;
            prof.etas.iter().cloned().zip(prof.gaps.iter().cloned()).collect()
        }
        InitialGuess::SingleCircle => {
            vec![((poly.x().abs().ln() - poly.leading().abs().ln()).exp().powf(1.0 / n as f64), n)]
        }
    };
    let mut z = Vec::with_capacity(n);
    for (b, &(r, count)) in circles.iter().enumerate() {
        let shift = ((b + 1) as f64 * ANGLE_OFFSET).fract() + 0.25;
        for i in 0..count {
            let theta = 2.0 * PI * (i as f64 + shift) / count as f64;
            z.push(Complex64::from_polar(r, theta));
        }
    }
    Ok(z)
}

fn converged_residual(st: &ScaledTerms) -> bool {
    st.relative_residual() <= 8.0 * st.terms.len() as f64 * f64::EPSILON
}

/// Aberth iteration on `poly`, which must have a nonzero constant term.
fn aberth(poly: &SparsePolynomial, cfg: &RootFindConfig) -> Result<Vec<Complex64>> {
    let n = poly.degree();
    let mut z = initial_guesses(poly, cfg.initial_guess)?;
    let mut done = vec![false; n];
    for _ in 0..cfg.max_iterations {
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
        let mut next = z.clone();
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, st) = newton_ratio(poly, z[i]);
            if converged_residual(&st) {
                done[i] = true;
                continue;
            }
            let Some(ratio) = ratio else {
                next[i] = z[i] * Complex64::from_polar(1.0 + 1e-7, 1e-7);
                continue;
            };
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.is_finite() && denom.norm() > 0.0 { ratio / denom } else { ratio };
            if !w.is_finite() {
                next[i] = z[i] * Complex64::from_polar(1.0 + 1e-7, 1e-7);
                continue;
            }
            next[i] = z[i] - w;
            if w.norm() <= cfg.tol * next[i].norm() {
                done[i] = true;
            }
        }
        z = next;
    }
    if z.iter().all(|&w| ScaledTerms::new(poly, w).relative_residual() <= RESIDUAL_LIMIT) {
        return Ok(z);
    }
    Err(Error::NonConvergence { iterations: cfg.max_iterations, best: z })
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = i;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Groups iterates whose inclusion disks overlap.
fn cluster(poly: &SparsePolynomial, z: &[Complex64], rel_radius: f64) -> Vec<Vec<usize>> {
    let n = z.len();
    let log_lead = poly.leading().abs().ln();
    let radius: Vec<f64> = (0..n)
        .map(|i| {
            let st = ScaledTerms::new(poly, z[i]);
            let p = st.sum().norm().max(4.0 * f64::EPSILON * st.abs_sum());
            let mut log_prod = 0.0;
            for j in 0..n {
                if j != i {
                    log_prod += (z[i] - z[j]).norm().ln();
                }
            }
            let r = ((n as f64).ln() + p.ln() + st.log_scale - log_lead - log_prod).exp();
            r.max(rel_radius * z[i].norm())
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radius[i] + radius[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Newton's method with step `m Ψ/Ψ'`, which restores quadratic convergence
/// at a root of multiplicity `m`. Stops at the rounding floor and returns the
/// iterate with the smallest residual.
pub fn polish_root(poly: &SparsePolynomial, z0: Complex64, m: usize) -> Result<Complex64> {
    let mut z = z0;
    let mut trajectory = vec![z0];
    let mut best = (ScaledTerms::new(poly, z0).relative_residual(), z0);
    let mut last_step = f64::INFINITY;
    for _ in 0..200 {
        let (ratio, st) = newton_ratio(poly, z);
        let res = st.relative_residual();
        if res < best.0 {
            best = (res, z);
        }
        if res == 0.0 {
            return Ok(z);
        }
        let Some(ratio) = ratio else { return Ok(best.1) };
        let step = ratio * m as f64;
        let next = z - step;
        trajectory.push(next);
        if !next.is_finite() || next.norm() > 1e6 * (z0.norm() + 1.0) {
            return Err(Error::Divergence { trajectory });
        }
        let size = step.norm();
        if size <= 4.0 * f64::EPSILON * next.norm() {
            let r = ScaledTerms::new(poly, next).relative_residual();
            return Ok(if r <= best.0 { next } else { best.1 });
        }
        if size >= last_step && trajectory.len() > 3 {
            return Ok(best.1);
        }
        last_step = size;
        z = next;
    }
    if best.0 <= RESIDUAL_LIMIT {
        Ok(best.1)
    } else {
        Err(Error::Divergence { trajectory })
    }
}

/// A root of multiplicity `m` is a simple root of `Ψ^{(m-1)}`, where Newton
/// reaches full precision; on `Ψ` itself rounding stalls at `ε^{1/m}`. Falls
/// back to `z0` if the step leaves the cluster.
fn polish_cluster(poly: &SparsePolynomial, z0: Complex64, m: usize) -> Complex64 {
    let mut d = poly.clone();
    for _ in 1..m {
        match d.derivative() {
            Some(next) => d = next,
            None => return z0,
        }
    }
    match polish_root(&d, z0, 1) {
        Ok(w) if (w - z0).norm() <= 1e-4 * z0.norm() => w,
        _ => z0,
    }
}

/// Relative accuracy to expect of a root of multiplicity `m`.
fn pairing_tolerance(m: usize) -> f64 {
    (1e2 * f64::EPSILON.powf(1.0 / m as f64)).max(1e-6)
}

/// Pairs each root in the upper half plane with its nearest mirror image and
/// averages them; unpaired roots close to the real axis are moved onto it.
fn symmetrize(poly: &SparsePolynomial, roots: Vec<(Complex64, usize)>) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| roots[b].0.im.total_cmp(&roots[a].0.im));
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (z, m) = roots[i];
        let tol = pairing_tolerance(m) * z.norm();
        let partner = (0..n)
            .filter(|&j| !used[j] && roots[j].1 == m)
            .min_by(|&a, &b| (roots[a].0 - z.conj()).norm().total_cmp(&(roots[b].0 - z.conj()).norm()));
        let near_real = z.im.abs() <= tol;
        match partner {
            Some(j) if !near_real && (roots[j].0 - z.conj()).norm() <= tol => {
                used[j] = true;
                let w = (z + roots[j].0.conj()) * 0.5;
                out.push((w, m));
                out.push((w.conj(), m));
            }
            _ if near_real => {
                let mut w = Complex64::new(z.re, 0.0);
                w = Complex64::new(polish_cluster(poly, w, m).re, 0.0);
                out.push((w, m));
            }
            _ => out.push((z, m)),
        }
    }
    out
}

/// All roots of `poly`, zero roots included.
pub fn find_roots(poly: &SparsePolynomial, cfg: &RootFindConfig) -> Result<RootMultiset> {
    let (p, m0) = deflate_zero_roots(poly)?;
    let mut roots: Vec<(Complex64, usize)> = Vec::new();
    if p.degree() >= 1 {
        let z = aberth(&p, cfg)?;
        for group in cluster(&p, &z, cfg.cluster_radius) {
            let m = group.len();
            let mean = group.iter().map(|&i| z[i]).sum::<Complex64>() / m as f64;
            let w = polish_cluster(&p, mean, m);
            roots.push((w, m));
        }
        roots = symmetrize(&p, roots);
        let bad: Vec<Complex64> = roots
            .iter()
            .map(|r| r.0)
            .filter(|&w| ScaledTerms::new(&p, w).relative_residual() > RESIDUAL_LIMIT)
            .collect();
        if !bad.is_empty() {
            return Err(Error::NonConvergence { iterations: cfg.max_iterations, best: z });
        }
    }
    if m0 > 0 {
        roots.push((Complex64::new(0.0, 0.0), m0));
    }
    let mut ms = RootMultiset::new(roots)?;
    ms.roots.sort_by(|a, b| {
        b.0.norm().total_cmp(&a.0.norm()).then(a.0.arg().total_cmp(&b.0.arg()))
    });
    Ok(ms)
}

/// Largest relative coefficient error of `∏(t - z)` against the monic input,
/// each coefficient measured against `e_i(|z|)`.
pub fn reconstruction_error(poly: &SparsePolynomial, roots: &RootMultiset) -> Result<f64> {
    let units = roots.units();
    let s = crate::poly::symmetric_all(&units);
    let scale = crate::poly::magnitude_scales(&units);
    let n = poly.degree();
    if units.len() != n {
        return crate::error::invalid("root count does not match degree");
    }
    let lead = poly.leading();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let target = poly.coefficient_of(n - i) / lead;
        let err = (s[i] - target).norm();
        worst = worst.max(if scale[i] > 0.0 { err / scale[i] } else { err });
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::evaluate;

    fn p(e: &[usize], c: &[f64]) -> SparsePolynomial {
        SparsePolynomial::new(e.to_vec(), c.to_vec()).unwrap()
    }

    fn cfg() -> RootFindConfig {
        RootFindConfig::default()
    }

    #[test]
    fn quadratic_fixture() {
        let r = find_roots(&p(&[0, 1, 2], &[100.0, -101.0, 1.0]), &cfg()).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0].0 - 100.0).norm() < 1e-12);
        assert!((r.roots[1].0 - 1.0).norm() < 1e-14);
    }

    #[test]
    fn ninth_roots() {
        let r = find_roots(&p(&[0, 9], &[-512.0, 1.0]), &cfg()).unwrap();
        assert_eq!(r.count(), 9);
        for &(z, m) in &r.roots {
            assert_eq!(m, 1);
            assert!((z.norm() - 2.0).abs() < 1e-13);
        }
        assert!(r.conjugate_defect() < 1e-12);
    }

    #[test]
    fn repeated_fifth_roots() {
        // (t^5 - 1e5)^2 (t^5 - 1)
        let poly = p(&[0, 5, 10, 15], &[-1e10, 1e10 + 2e5, -(2e5 + 1.0), 1.0]);
        let r = find_roots(&poly, &cfg()).unwrap();
        assert_eq!(r.count(), 15);
        let doubles: Vec<_> = r.roots.iter().filter(|x| x.1 == 2).collect();
        let singles: Vec<_> = r.roots.iter().filter(|x| x.1 == 1).collect();
        assert_eq!((doubles.len(), singles.len()), (5, 5));
        assert!(doubles.iter().all(|x| (x.0.norm() - 10.0).abs() < 1e-6));
        assert!(singles.iter().all(|x| (x.0.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_roots_reattached() {
        let poly = SparsePolynomial::from_terms(vec![3, 5], vec![1.0, 1.0]).unwrap();
        let r = find_roots(&poly, &cfg()).unwrap();
        assert_eq!(r.count(), 5);
        assert!(r.roots.iter().any(|&(z, m)| z.norm() == 0.0 && m == 3));
    }

    #[test]
    fn polish_examples() {
        let z = polish_root(&p(&[0, 1, 2], &[1.0, -2.0, 1.0]), Complex64::new(1.001, 0.0), 2).unwrap();
        assert!((z - 1.0).norm() < 1e-8);
        let z = polish_root(&p(&[0, 9], &[-512.0, 1.0]), Complex64::new(2.1, 0.0), 1).unwrap();
        assert!((z - 2.0).norm() < 1e-14);
        // (t^3 - 8)^3 = t^9 - 24 t^6 + 192 t^3 - 512
        let cube = p(&[0, 3, 6, 9], &[-512.0, 192.0, -24.0, 1.0]);
        let z = polish_root(&cube, Complex64::new(2.05, 0.0), 3).unwrap();
        assert!((z - 2.0).norm() < 1e-4);
        assert!(evaluate(&cube, z).norm() < 1e-9);
    }

    #[test]
    fn reconstruction_small() {
        let poly = p(&[0, 2, 7, 11], &[3.0, -40.0, 0.5, 2.0]);
        let r = find_roots(&poly, &cfg()).unwrap();
        assert!(reconstruction_error(&poly, &r).unwrap() < 1e-10);
        assert!(r.conjugate_defect() < 1e-10);
    }
}
