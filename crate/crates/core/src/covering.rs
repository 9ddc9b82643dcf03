//! Cells around root clusters built with a ladder of scales, and their checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::RootMultiset;

/// `ε_1 = ε_f^{1/L}`, `ε_{j+1} = ε_j^{1/L}`, plus a coarse `ε_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonLadder {
    pub l: usize,
    pub epsilon_f: f64,
    /// `ε_1, ..., ε_{L+1}`.
    pub eps: Vec<f64>,
    pub epsilon_c: f64,
    /// `ε_j / ε_{j+1}`.
    pub ratios: Vec<f64>,
    pub strictly_increasing: bool,
}

impl EpsilonLadder {
    /// `ε_b` for `1 <= b <= L + 1`.
    pub fn eps(&self, b: usize) -> f64 {
        self.eps[b - 1]
    }
}

pub const DEFAULT_EPSILON_F: f64 = 1e-4;

/// Default fine parameter for tiers whose smallest height ratio is `gap`.
pub fn default_epsilon_f(gap: f64) -> f64 {
    if gap.is_finite() && gap > 1.0 {
        DEFAULT_EPSILON_F.min(1.0 / gap)
    } else {
        DEFAULT_EPSILON_F
    }
}

pub fn build_ladder(l: usize, epsilon_f: f64) -> Result<EpsilonLadder> {
    if l == 0 {
        return invalid("L must be at least 1");
    }
    if !(epsilon_f > 0.0 && epsilon_f < 1.0) {
        return invalid("epsilon_f must lie in (0, 1)");
    }
    let mut eps = vec![epsilon_f.powf(1.0 / l as f64)];
    for _ in 0..l {
        let e = eps.last().unwrap().powf(1.0 / l as f64);
        eps.push(e);
    }
    let epsilon_c = eps[l].sqrt();
    let ratios: Vec<f64> = eps.windows(2).map(|w| w[0] / w[1]).collect();
    let strictly_increasing =
        epsilon_f < eps[0] && eps.windows(2).all(|w| w[0] < w[1]) && eps[l] < epsilon_c && epsilon_c < 1.0;
    Ok(EpsilonLadder { l, epsilon_f, eps, epsilon_c, ratios, strictly_increasing })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// 0-based tier index.
    pub tier: usize,
    pub center: Complex64,
    pub radius: f64,
    pub members: Vec<(Complex64, usize)>,
    /// Member count with multiplicity.
    pub b: usize,
}

impl Cell {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellCovering {
    pub cells: Vec<Cell>,
    pub heights: Vec<f64>,
    pub ladder: EpsilonLadder,
}

/// Canonical order: magnitude, then argument, then real part.
fn canonical(units: &mut [Complex64]) {
    units.sort_by(|a, b| {
        a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())).then(a.re.total_cmp(&b.re))
    });
}

fn mean(units: &[Complex64], members: &[usize]) -> Complex64 {
    let mut idx = members.to_vec();
    idx.sort_unstable();
    idx.iter().map(|&i| units[i]).sum::<Complex64>() / idx.len() as f64
}

/// Seed ball: grow from `seed` by repeatedly adding the nearest root within
/// `ε_{b+1} h` of the running mean.
fn accrete(units: &[Complex64], seed: usize, h: f64, ladder: &EpsilonLadder) -> Result<Vec<usize>> {
    let mut members = vec![seed];
    let mut inside = vec![false; units.len()];
    inside[seed] = true;
    loop {
        let b = members.len();
        let centre = mean(units, &members);
        let reach = ladder.eps(b + 1) * h;
        let next = (0..units.len())
            .filter(|&i| !inside[i])
            .map(|i| (i, (units[i] - centre).norm()))
            .filter(|&(_, d)| d < reach)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((i, _)) = next else { break };
        if b + 1 > ladder.l {
            return Err(Error::StructuralViolation(format!(
                "cell around {} would hold {} > L = {} roots",
                units[seed],
                b + 1,
                ladder.l
            )));
        }
        inside[i] = true;
        members.push(i);
    }
    members.sort_unstable();
    Ok(members)
}

fn group(units: &[Complex64], members: &[usize]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &i in members {
        match out.last_mut() {
            Some((z, m)) if *z == units[i] => *m += 1,
            _ => out.push((units[i], 1)),
        }
    }
    out
}

/// One tier's cells: a seed ball from every root, then the maximal balls.
fn tier_cells(tier: usize, roots: &RootMultiset, h: f64, ladder: &EpsilonLadder) -> Result<Vec<Cell>> {
    let mut units = roots.units();
    canonical(&mut units);
    let mut balls: Vec<Vec<usize>> = Vec::new();
    for seed in 0..units.len() {
        if seed > 0 && units[seed] == units[seed - 1] {
            continue;
        }
        let m = accrete(&units, seed, h, ladder)?;
        if !balls.contains(&m) {
            balls.push(m);
        }
    }
    balls.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut kept: Vec<(Vec<usize>, Complex64, f64)> = Vec::new();
    for m in balls {
        let centre = mean(&units, &m);
        let radius = ladder.eps(m.len()) * h;
        let mut absorbed = false;
        for (k, c, r) in &kept {
            let subset = m.iter().all(|i| k.contains(i));
            if subset {
                absorbed = true;
                break;
            }
            let shares = m.iter().any(|i| k.contains(i));
            let overlaps = (centre - c).norm() < radius + r;
            if shares || overlaps {
                return Err(Error::StructuralViolation(format!(
                    "terminal balls at {centre} and {c} overlap without containment"
                )));
            }
        }
        if !absorbed {
            kept.push((m, centre, radius));
        }
    }
    Ok(kept
        .into_iter()
        .map(|(m, center, radius)| Cell { tier, center, radius, b: m.len(), members: group(&units, &m) })
        .collect())
}

/// Cells for every tier. `heights[r]` is `h(T_r)`.
pub fn build_covering(tiers: &[RootMultiset], heights: &[f64], ladder: &EpsilonLadder) -> Result<CellCovering> {
    if tiers.len() != heights.len() {
        return invalid("one height per tier required");
    }
    let mut cells = Vec::new();
    for (r, (roots, &h)) in tiers.iter().zip(heights).enumerate() {
        cells.extend(tier_cells(r, roots, h, ladder)?);
    }
    cells.sort_by(|a, b| {
        a.tier
            .cmp(&b.tier)
            .then(b.center.norm().total_cmp(&a.center.norm()))
            .then(a.center.arg().total_cmp(&b.center.arg()))
    });
    Ok(CellCovering { cells, heights: heights.to_vec(), ladder: ladder.clone() })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub unique_membership: bool,
    pub max_b: usize,
    pub b_within_l: bool,
    pub separated: bool,
    /// Smallest `distance / (ε_{b+1} h / 4)` over same-tier pairs.
    pub separation_margin: Option<f64>,
    pub centred: bool,
    /// Largest `|z - centre| / ((b-1)/b · ε_b h)` over members of cells with `b >= 2`.
    pub centre_margin: f64,
    pub witnesses: Vec<String>,
    pub passed: bool,
}

pub fn verify_covering(cov: &CellCovering) -> CoveringReport {
    let ladder = &cov.ladder;
    let mut rep = CoveringReport::default();
    rep.unique_membership = true;
    for cell in &cov.cells {
        for &(z, _) in &cell.members {
            let holders = cov.cells.iter().filter(|c| c.contains(z)).count();
            if holders != 1 || !cell.contains(z) {
                rep.unique_membership = false;
                rep.witnesses.push(format!("root {z} lies in {holders} cells"));
            }
        }
    }
    rep.max_b = cov.cells.iter().map(|c| c.b).max().unwrap_or(0);
    rep.b_within_l = cov.cells.iter().all(|c| c.b >= 1 && c.b <= ladder.l);
    if !rep.b_within_l {
        rep.witnesses.push(format!("cell with b = {} > L = {}", rep.max_b, ladder.l));
    }
    rep.separated = true;
    for (i, a) in cov.cells.iter().enumerate() {
        for c in &cov.cells[i + 1..] {
            if a.tier != c.tier {
                continue;
            }
            let b = a.b.max(c.b);
            if b + 1 > ladder.l + 1 {
                continue;
            }
            let h = cov.heights[a.tier];
            let need = 0.25 * ladder.eps(b + 1) * h;
            let dist = (a.center - c.center).norm() - a.radius - c.radius;
            rep.separation_margin = Some(rep.separation_margin.map_or(dist / need, |m| m.min(dist / need)));
            if dist < need {
                rep.separated = false;
                rep.witnesses.push(format!("cells at {} and {} are {dist:.3e} apart, need {need:.3e}", a.center, c.center));
            }
        }
    }
    rep.centred = true;
    for cell in &cov.cells {
        if cell.b < 2 || cell.b > ladder.l + 1 {
            continue;
        }
        let h = cov.heights[cell.tier];
        let bound = (cell.b - 1) as f64 / cell.b as f64 * ladder.eps(cell.b) * h;
        for &(z, _) in &cell.members {
            let d = (z - cell.center).norm();
            rep.centre_margin = rep.centre_margin.max(d / bound);
            if d > bound * (1.0 + 1e-12) {
                rep.centred = false;
                rep.witnesses.push(format!("root {z} is {d:.3e} from its centre, bound {bound:.3e}"));
            }
        }
    }
    rep.passed = rep.unique_membership && rep.b_within_l && rep.separated && rep.centred;
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellCounts {
    pub counts: Vec<usize>,
    pub uncovered: Vec<(Complex64, usize)>,
}

impl CellCounts {
    pub fn all_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Multiplicity-weighted number of `roots` in each cell; a root in no cell is
/// reported as uncovered. A root inside several cells goes to the nearest centre.
pub fn count_roots_in_cells(cov: &CellCovering, roots: &RootMultiset) -> CellCounts {
    let mut counts = vec![0; cov.cells.len()];
    let mut uncovered = Vec::new();
    for &(z, m) in &roots.roots {
        let best = cov
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(z))
            .min_by(|a, b| (z - a.1.center).norm().total_cmp(&(z - b.1.center).norm()));
        match best {
            Some((i, _)) => counts[i] += m,
            None => uncovered.push((z, m)),
        }
    }
    CellCounts { counts, uncovered }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ladder_examples() {
        let l = build_ladder(1, 1e-4).unwrap();
        assert_eq!(l.eps, vec![1e-4, 1e-4]);
        assert!(!l.strictly_increasing);
        let l = build_ladder(2, 1e-8).unwrap();
        for (a, b) in l.eps.iter().zip([1e-4, 1e-2, 1e-1]) {
            assert!((a - b).abs() < 1e-12 * b);
        }
        assert!(l.strictly_increasing);
        let l = build_ladder(3, 1e-27).unwrap();
        for (a, b) in l.eps.iter().zip([1e-9, 1e-3, 1e-1, 10f64.powf(-1.0 / 3.0)]) {
            assert!((a - b).abs() < 1e-12 * b);
        }
        assert!(build_ladder(2, 1.0).is_err());
    }

    #[test]
    fn singleton_cells() {
        let ladder = build_ladder(2, 1e-4).unwrap();
        let tiers = vec![RootMultiset::simple([c(100.0, 0.0)]), RootMultiset::simple([c(1.0, 0.0)])];
        let cov = build_covering(&tiers, &[100.0, 1.0], &ladder).unwrap();
        assert_eq!(cov.cells.len(), 2);
        assert!((cov.cells[0].radius - ladder.eps(1) * 100.0).abs() < 1e-12);
        assert!((cov.cells[1].radius - ladder.eps(1)).abs() < 1e-14);
        assert!(verify_covering(&cov).passed);
    }

    #[test]
    fn coincident_pairs_share_cells() {
        // (t^9 - a)^2 roots with a = 1.
        let roots: Vec<(Complex64, usize)> =
            (0..9).map(|i| (Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / 9.0), 2)).collect();
        let tier = RootMultiset::new(roots).unwrap();
        let ladder = build_ladder(2, 1e-4).unwrap();
        let cov = build_covering(&[tier.clone()], &[1.0], &ladder).unwrap();
        assert_eq!(cov.cells.len(), 9);
        assert!(cov.cells.iter().all(|c| c.b == 2));
        let rep = verify_covering(&cov);
        assert!(rep.passed, "{:?}", rep.witnesses);
        let counts = count_roots_in_cells(&cov, &tier);
        assert!(counts.counts.iter().all(|&n| n == 2));
    }

    #[test]
    fn too_many_members_is_a_violation() {
        let tier = RootMultiset::new(vec![(c(1.0, 0.0), 3)]).unwrap();
        let ladder = build_ladder(2, 1e-4).unwrap();
        assert!(matches!(build_covering(&[tier], &[1.0], &ladder), Err(Error::StructuralViolation(_))));
    }

    #[test]
    fn coarse_ladder_fails_separation() {
        let tier = RootMultiset::simple([c(1.0, 0.0), c(1.48, 0.0)]);
        let ladder = build_ladder(2, 0.04).unwrap();
        let cov = build_covering(&[tier], &[1.0], &ladder).unwrap();
        let rep = verify_covering(&cov);
        assert!(!rep.separated);
        assert!(!rep.witnesses.is_empty());
    }

    #[test]
    fn uncovered_root_reported() {
        let ladder = build_ladder(1, 1e-2).unwrap();
        let tier = RootMultiset::simple([c(1.0, 0.0)]);
        let cov = build_covering(&[tier], &[1.0], &ladder).unwrap();
        let counts = count_roots_in_cells(&cov, &RootMultiset::simple([c(1.5, 0.0)]));
        assert!(!counts.all_covered());
    }
}
