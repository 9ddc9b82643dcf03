// Rough factorisation into one factor per tier, with its error on annuli and
// the root counts it preserves cell by cell.

use tierroots::corpus::constructed;
use tierroots::covering::{build_covering, build_ladder, default_epsilon_f};
use tierroots::factorization::{
    factor_roots, match_root_counts, relative_error_outside_cells, rough_factor_normalized, verify_error_bound,
};
use tierroots::oracle::{find_roots, RootFindConfig};
use tierroots::tiers::{assign_roots, decompose};

fn main() -> tierroots::Result<()> {
    let case = constructed(3, &[1e18, 1e9, -1.0], &[1, 2, 1])?;
    let poly = &case.poly;
    let (_, dec) = decompose(poly, 1e2)?;
    let rf = rough_factor_normalized(poly, &dec)?;
    for (i, f) in rf.factors.iter().enumerate() {
        println!("factor {} degree {}: exps {:?} coefs {:?}", i + 1, f.degree(), f.exponents(), f.coefficients());
    }

    for a in verify_error_bound(poly, &rf, 64, 5) {
        println!("annulus {} [{:.1e}, {:.1e}]: observed eps_f {:.3e}", a.r, a.inner, a.outer, a.observed_epsilon_f);
    }

    let cfg = RootFindConfig::default();
    let roots = find_roots(poly, &cfg)?;
    let cov = build_covering(
        &assign_roots(&dec, &roots)?.tiers,
        &dec.heights(),
        &build_ladder(poly.l(), default_epsilon_f(dec.min_gap()))?,
    )?;
    let tilde = factor_roots(&rf, &cfg)?;
    let m = match_root_counts(&roots, &tilde, &cov, poly.l());
    println!("cell counts {:?} vs {:?}, equal {}", m.psi_counts, m.tilde_counts, m.equal);
    let out = relative_error_outside_cells(poly, &rf, &cov, 64)?;
    println!("max |E|/|Psi| outside cells {:.3e} over {} points", out.max_ratio, out.samples_used);
    Ok(())
}
